"""Scalar fields on a pixel grid and their PGM/PNG representation.

Pixel size is always supplied by the caller; image headers are never
trusted to carry it.  Gray values are kept in their native integer range
(0..255 or 0..65535) as floats, because the Beer-Lambert transform needs
the raw intensities.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Literal

import numpy as np
from PIL import Image

from .errors import DataError, ImageFormatError

Kind = Literal["gray_image", "weight_field", "normalized_weight", "simulated"]
KINDS = ("gray_image", "weight_field", "normalized_weight", "simulated")

_SUFFIXES = {".png": "PNG", ".pgm": "PPM", ".pnm": "PPM"}
_GRAY_MODES = {"L": 8, "I;16": 16, "I;16B": 16, "I;16L": 16, "I": 16}


@dataclass(frozen=True)
class ScalarField:
    """Real-valued grid with a physical pixel size in micrometres.

    ``values`` has shape ``(height, width)`` and is stored read-only.
    """

    values: np.ndarray
    pixel_size: float
    kind: Kind = "weight_field"
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise DataError(f"field must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 2 or arr.shape[1] < 2:
            raise DataError(f"field must be at least 2x2, got {arr.shape[1]}x{arr.shape[0]}")
        if not np.isfinite(arr).all():
            raise DataError("field contains NaN or infinite values")
        if not self.pixel_size > 0:
            raise DataError(f"pixel size must be positive, got {self.pixel_size}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.kind == "gray_image" and arr.min() < 0:
            raise DataError("gray image has negative values")
        if self.kind == "normalized_weight":
            if abs(arr.mean()) > 1e-9 or abs(arr.std() - 1.0) > 1e-6:
                raise DataError("normalized weight field must have mean 0 and standard deviation 1")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "pixel_size", float(self.pixel_size))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def with_values(self, values, kind: Kind | None = None) -> "ScalarField":
        return replace(self, values=values, kind=kind or self.kind)


def load_image(path, pixel_size: float) -> ScalarField:
    """Read an 8- or 16-bit single-channel PGM or PNG as a gray image.

    Values are returned as stored: 0..255 for 8-bit and 0..65535 for
    16-bit files, without rescaling.
    """
    if not pixel_size > 0:
        raise DataError(f"pixel size must be positive, got {pixel_size}")
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            bands = im.getbands()
            arr = np.asarray(im)
    except FileNotFoundError:
        raise
    except OSError as exc:
        raise ImageFormatError(f"{path}: unreadable image ({exc})") from exc
    if len(bands) > 1:
        raise ImageFormatError(f"{path}: multi-channel unsupported (mode {mode})")
    if mode not in _GRAY_MODES:
        raise ImageFormatError(f"{path}: unsupported pixel mode {mode}")
    if arr.size == 0:
        raise ImageFormatError(f"{path}: zero-area image")
    if mode == "I" and (arr.min() < 0 or arr.max() > 65535):
        raise ImageFormatError(f"{path}: pixel values exceed 16-bit range")
    return ScalarField(arr.astype(np.float64), pixel_size, "gray_image",
                       meta={"source": str(path), "depth": _GRAY_MODES[mode]})


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def quantize(values: np.ndarray, lo: float, hi: float, depth: int) -> np.ndarray:
    """Linear map of ``[lo, hi]`` onto the integer codes of ``depth`` bits.

    A degenerate range (``lo == hi``) maps every value to mid-gray
    (128 for 8 bit, 32768 for 16 bit).
    """
    top = (1 << depth) - 1
    dtype = np.uint8 if depth == 8 else np.uint16
    if hi == lo:
        return np.full(values.shape, 1 << (depth - 1), dtype=dtype)
    codes = np.rint((values - lo) / (hi - lo) * top)
    return np.clip(codes, 0, top).astype(dtype)


def dequantize(codes: np.ndarray, lo: float, hi: float, depth: int) -> np.ndarray:
    top = (1 << depth) - 1
    codes = np.asarray(codes, dtype=np.float64)
    if hi == lo:
        return np.full(codes.shape, float(lo))
    return lo + codes / top * (hi - lo)


def save_image(f: ScalarField, path, depth: int = 8, value_range=None,
               metadata: dict | None = None, sidecar: bool = True) -> dict:
    """Write ``f`` as PGM or PNG (chosen by extension) and return the mapping.

    Values are mapped linearly from ``value_range`` (default: the field's
    min and max) onto the full ``depth``-bit range.  Pass
    ``value_range=(0, 2**depth - 1)`` to store gray images verbatim.  The
    mapping ``{"min", "max", "depth"}`` plus ``metadata`` goes to a
    ``<path>.json`` sidecar so :func:`load_field` can undo it.
    """
    if depth not in (8, 16):
        raise ValueError(f"depth must be 8 or 16, got {depth}")
    path = Path(path)
    fmt = _SUFFIXES.get(path.suffix.lower())
    if fmt is None:
        raise ValueError(f"{path}: extension must be one of {sorted(_SUFFIXES)}")
    values = f.values
    if value_range is None:
        lo, hi = float(values.min()), float(values.max())
    else:
        lo, hi = map(float, value_range)
        if values.min() < lo or values.max() > hi:
            raise DataError(f"field values outside the requested range [{lo}, {hi}]")
    codes = quantize(values, lo, hi, depth)
    Image.fromarray(codes).save(path, format=fmt)
    mapping = {"min": lo, "max": hi, "depth": depth}
    if sidecar:
        meta = dict(mapping)
        meta["kind"] = f.kind
        meta["pixel_size"] = f.pixel_size
        if metadata:
            meta.update(metadata)
        sidecar_path(path).write_text(json.dumps(meta, indent=2) + "\n")
    return mapping


def load_field(path, pixel_size: float | None = None) -> ScalarField:
    """Load an image written by :func:`save_image`, undoing the value map.

    Falls back to the raw gray values when no sidecar is present.  The
    pixel size recorded in the sidecar is used only when ``pixel_size`` is
    not given.
    """
    side = sidecar_path(path)
    meta = json.loads(side.read_text()) if side.exists() else None
    if pixel_size is None:
        if meta is None or "pixel_size" not in meta:
            raise DataError(f"{path}: pixel size not given and no sidecar to read it from")
        pixel_size = meta["pixel_size"]
    raw = load_image(path, pixel_size)
    if meta is None:
        return raw
    values = dequantize(raw.values, meta["min"], meta["max"], meta["depth"])
    kind = meta.get("kind", "simulated")
    if kind == "normalized_weight":
        # quantization breaks the exact zero-mean/unit-variance invariant
        kind = "weight_field"
    return ScalarField(values, pixel_size, kind, meta=meta)
