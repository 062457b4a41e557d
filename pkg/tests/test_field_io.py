import json

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp
from PIL import Image

from cloudscope.errors import DataError, ImageFormatError
from cloudscope.field_io import ScalarField, load_field, load_image, save_image, sidecar_path


def write_pgm(path, width, height, pixels, maxval=255):
    header = f"P5\n{width} {height}\n{maxval}\n".encode()
    if maxval > 255:
        body = np.asarray(pixels, dtype=">u2").tobytes()
    else:
        body = bytes(pixels)
    path.write_bytes(header + body)


def test_hand_written_pgm(tmp_path):
    p = tmp_path / "a.pgm"
    write_pgm(p, 2, 2, [0, 128, 128, 255])
    f = load_image(p, 7.2)
    np.testing.assert_array_equal(f.values, [[0.0, 128.0], [128.0, 255.0]])
    assert f.pixel_size == 7.2
    assert f.kind == "gray_image"
    assert f.meta["depth"] == 8


def test_hand_written_16bit_pgm(tmp_path):
    p = tmp_path / "b.pgm"
    write_pgm(p, 3, 2, [0, 1, 300, 40000, 65535, 7], maxval=65535)
    f = load_image(p, 1.0)
    np.testing.assert_array_equal(f.values, [[0, 1, 300], [40000, 65535, 7]])


def test_large_16bit_png(tmp_path):
    codes = np.random.default_rng(0).integers(0, 65536, size=(1500, 2048), dtype=np.uint16)
    p = tmp_path / "big.png"
    Image.fromarray(codes).save(p)
    f = load_image(p, 7.2)
    assert (f.width, f.height) == (2048, 1500)
    assert f.values.size == 3_072_000
    np.testing.assert_array_equal(f.values, codes)


def test_rgb_rejected(tmp_path):
    p = tmp_path / "rgb.png"
    Image.fromarray(np.zeros((4, 4, 3), dtype=np.uint8)).save(p)
    with pytest.raises(ImageFormatError, match="multi-channel"):
        load_image(p, 1.0)


def test_garbage_rejected(tmp_path):
    p = tmp_path / "x.png"
    p.write_bytes(b"not an image at all")
    with pytest.raises(ImageFormatError):
        load_image(p, 1.0)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_image(tmp_path / "nope.png", 1.0)


@pytest.mark.parametrize("px", [0.0, -1.0, float("nan")])
def test_bad_pixel_size(tmp_path, px):
    p = tmp_path / "a.pgm"
    write_pgm(p, 2, 2, [1, 2, 3, 4])
    with pytest.raises(DataError):
        load_image(p, px)


def test_field_invariants():
    with pytest.raises(DataError):
        ScalarField(np.zeros(4), 1.0)
    with pytest.raises(DataError):
        ScalarField(np.zeros((1, 4)), 1.0)
    with pytest.raises(DataError):
        ScalarField(np.array([[0.0, np.nan], [1, 2]]), 1.0)
    with pytest.raises(DataError):
        ScalarField(np.array([[0.0, -1.0], [1, 2]]), 1.0, "gray_image")
    with pytest.raises(DataError):
        ScalarField(np.array([[0.0, 1.0], [1, 2]]), 1.0, "normalized_weight")
    f = ScalarField(np.array([[1.0, 2.0], [3.0, 4.0]]), 2.0)
    assert not f.values.flags.writeable


def test_constant_field_saves_mid_gray(tmp_path):
    f = ScalarField(np.full((4, 5), 3.7), 1.0)
    p = tmp_path / "c.png"
    save_image(f, p, depth=8)
    codes = np.asarray(Image.open(p))
    assert codes.dtype == np.uint8
    assert np.all(codes == 128)
    np.testing.assert_allclose(load_field(p).values, 3.7)


def test_endpoint_mapping(tmp_path):
    f = ScalarField(np.array([[0.0, 0.6931], [0.3, 0.6931]]), 1.0)
    p = tmp_path / "e.pgm"
    mapping = save_image(f, p, depth=8)
    codes = np.asarray(Image.open(p))
    assert codes[0, 0] == 0 and codes[0, 1] == 255
    assert mapping == {"min": 0.0, "max": 0.6931, "depth": 8}
    side = json.loads(sidecar_path(p).read_text())
    assert side["min"] == 0.0 and side["max"] == 0.6931 and side["depth"] == 8


def test_verbatim_gray_range(tmp_path):
    g = np.array([[0, 17], [255, 100]], dtype=float)
    p = tmp_path / "v.png"
    save_image(ScalarField(g, 1.0, "gray_image"), p, depth=8, value_range=(0, 255))
    np.testing.assert_array_equal(load_image(p, 1.0).values, g)


def test_out_of_range_rejected(tmp_path):
    f = ScalarField(np.array([[0.0, 2.0], [1, 1]]), 1.0)
    with pytest.raises(DataError):
        save_image(f, tmp_path / "o.png", value_range=(0, 1))


@given(hnp.arrays(np.float64, (32, 32), elements=st.floats(-1e6, 1e6)),
       st.sampled_from([8, 16]), st.sampled_from([".png", ".pgm"]))
def test_round_trip_within_quantization(tmp_path_factory, x, depth, ext):
    p = tmp_path_factory.mktemp("rt") / f"f{ext}"
    f = ScalarField(x, 3.0)
    save_image(f, p, depth=depth)
    back = load_field(p)
    assert back.pixel_size == 3.0
    assert not np.isnan(back.values).any()
    step = (x.max() - x.min()) / ((1 << depth) - 1)
    assert np.max(np.abs(back.values - x)) <= step / 2 * (1 + 1e-9) + 1e-9 * max(1.0, np.abs(x).max())


def test_load_field_pixel_size_override(tmp_path):
    f = ScalarField(np.arange(6.0).reshape(2, 3), 3.0)
    p = tmp_path / "f.png"
    save_image(f, p, depth=16)
    assert load_field(p, pixel_size=5.0).pixel_size == 5.0
    (tmp_path / "g.png").write_bytes(p.read_bytes())
    with pytest.raises(DataError):
        load_field(tmp_path / "g.png")
