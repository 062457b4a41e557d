import json

import numpy as np
import pytest
from PIL import Image

from cloudscope.cli import run


def write_gray(path, seed=0, shape=(96, 128), zero=False):
    codes = np.random.default_rng(seed).integers(1000, 60000, size=shape).astype(np.uint16)
    if zero:
        codes[3, 3] = 0
    Image.fromarray(codes).save(path)
    return path


@pytest.fixture
def images(tmp_path):
    return [str(write_gray(tmp_path / f"img{i}.png", seed=i)) for i in range(3)]


def test_analyze_report(tmp_path, images):
    out, csv = tmp_path / "r.json", tmp_path / "r.csv"
    rc = run(["analyze", *images, "--pixel-size", "7.2", "--band", "0.1:0.3",
              "--out", str(out), "--csv", str(csv), "--svg", str(tmp_path / "b.svg")])
    assert rc == 0
    d = json.loads(out.read_text())
    assert d["n_images"] == 3 and len(d["per_image"]) == 3
    assert d["band_rho_per_um"] == [0.1, 0.3]
    assert len(csv.read_text().splitlines()) == 4
    assert (tmp_path / "b.svg").read_text().count('class="box"') == 1


def test_analyze_glob_and_wavelengths(tmp_path, images, capsys):
    rc = run(["analyze", str(tmp_path / "img*.png"), "--pixel-size", "7.2",
              "--wavelengths", "20.943951:62.831853", "--mode", "mean"])
    assert rc == 0
    d = json.loads(capsys.readouterr().out)
    assert d["band_rho_per_um"] == pytest.approx([0.1, 0.3])
    assert d["per_image"] == [] and d["aggregate_cli"] is not None


def test_nyquist_violation_exit_2(images, capsys):
    rc = run(["analyze", *images, "--pixel-size", "7.2", "--band", "0.5:0.6"])
    assert rc == 2
    assert "0.43633" in capsys.readouterr().err


def test_usage_errors_exit_1(images):
    assert run(["analyze", *images]) == 1
    assert run(["analyze", *images, "--pixel-size", "7.2", "--band", "abc"]) == 1
    assert run(["frobnicate"]) == 1
    assert run(["simulate", "--preset", "sim2", "--out", "x.png", "--size", "7"]) == 1


def test_zero_pixel_policy(tmp_path, capsys):
    p = str(write_gray(tmp_path / "z.png", zero=True))
    assert run(["analyze", p, "--pixel-size", "7.2", "--band", "0.1:0.3"]) == 2
    capsys.readouterr()
    assert run(["analyze", p, "--pixel-size", "7.2", "--band", "0.1:0.3", "--zero-policy", "clamp"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert any("clamped" in w for w in d["warnings"])


def test_missing_file_exit_2(tmp_path):
    assert run(["analyze", str(tmp_path / "none.png"), "--pixel-size", "1"]) == 2


def test_simulate_deterministic(tmp_path):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    for p in (a, b):
        assert run(["simulate", "--preset", "sim3", "--seed", "42", "--out", str(p),
                    "--size", "96x64"]) == 0
    assert a.read_bytes() == b.read_bytes()
    side = json.loads((tmp_path / "a.png.json").read_text())
    assert side["preset"] == "sim3" and side["seed"] == 42
    arr = np.asarray(Image.open(a))
    assert arr.shape == (64, 96) and arr.min() > 0


def test_simulate_then_analyze(tmp_path, capsys):
    for s in range(2):
        assert run(["simulate", "--preset", "sim2", "--seed", str(s), "--out",
                    str(tmp_path / f"s{s}.png"), "--size", "256x256"]) == 0
    rc = run(["analyze", str(tmp_path / "s*.png"), "--pixel-size", "7", "--band", "0.02:0.1"])
    assert rc == 0
    d = json.loads(capsys.readouterr().out)
    assert all(0 <= e["cli"] <= 1 for e in d["per_image"])


def test_radial_and_plot(tmp_path, images):
    csv = tmp_path / "r.csv"
    assert run(["radial", images[0], "--pixel-size", "7.2", "--csv", str(csv),
                "--svg", str(tmp_path / "r.svg")]) == 0
    rows = csv.read_text().splitlines()
    assert rows[0] == "rho_per_um,k1_um2,count,error_weight" and len(rows) > 10
    assert run(["plot", str(csv), "--svg", str(tmp_path / "p.svg")]) == 0
    assert 'class="point"' in (tmp_path / "p.svg").read_text()


def test_batch_groups(tmp_path, images):
    other = [str(write_gray(tmp_path / f"o{i}.png", seed=10 + i)) for i in range(3)]
    out, csv, svg = tmp_path / "g.json", tmp_path / "g.csv", tmp_path / "g.svg"
    rc = run(["batch", f"A={tmp_path}/img*.png", f"B={tmp_path}/o*.png", "--pixel-size", "7.2",
              "--band", "0.1:0.3", "--out", str(out), "--csv", str(csv), "--svg", str(svg)])
    assert rc == 0
    d = json.loads(out.read_text())
    assert set(d["groups"]) == {"A", "B"}
    assert len(csv.read_text().splitlines()) == 7
    assert svg.read_text().count('class="box"') == 2
    assert run(["plot", str(out), "--svg", str(tmp_path / "again.svg")]) == 0
    assert run(["batch", "nogroup", "--pixel-size", "7.2"]) == 1


def test_thread_env(monkeypatch, images, capsys):
    monkeypatch.setenv("CLOUDSCOPE_THREADS", "1")
    assert run(["analyze", *images, "--pixel-size", "7.2", "--band", "0.1:0.3"]) == 0
    a = capsys.readouterr().out
    monkeypatch.setenv("CLOUDSCOPE_THREADS", "3")
    assert run(["analyze", *images, "--pixel-size", "7.2", "--band", "0.1:0.3"]) == 0
    assert capsys.readouterr().out == a
