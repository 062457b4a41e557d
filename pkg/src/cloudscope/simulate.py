"""Synthetic nonwoven fields: dilated Poisson segments plus random-wave GRFs.

Fibers are modeled as segments with exponential length and uniform
orientation, dilated by a disk; the field value at a pixel counts the
covering fibers.  Large-scale cloudiness is added by superposing a Gaussian
random field with Bessel autocorrelation, generated by the spectral
(random-wave) method.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np

from .errors import DataError
from .field_io import ScalarField

#: Mean number of fibers covering a pixel when no intensity is given.
DEFAULT_COVERAGE = 3.0


@dataclass
class SegmentModelParams:
    fiber_diameter: float = 42.0
    mean_length: float = 896.0
    intensity: float | None = None  # segments per um^2
    seed: int = 0

    def __post_init__(self):
        if not (self.fiber_diameter > 0 and self.mean_length > 0):
            raise ValueError("fiber diameter and mean length must be positive")
        if self.intensity is None:
            self.intensity = DEFAULT_COVERAGE / self.mean_grain_area
        if not self.intensity > 0:
            raise ValueError("segment intensity must be positive")

    @property
    def mean_grain_area(self) -> float:
        """Expected area of one disk-dilated segment in um^2."""
        d = self.fiber_diameter
        return self.mean_length * d + math.pi * d * d / 4.0


@dataclass
class BesselGrfParams:
    wavelength: float  # um; 0 gives a constant field
    n_waves: int = 256
    seed: int = 0

    def __post_init__(self):
        if self.wavelength < 0:
            raise ValueError(f"GRF wavelength must be nonnegative, got {self.wavelength}")
        if self.n_waves < 16:
            raise ValueError("need at least 16 waves")


@dataclass
class SuperpositionSpec:
    """Mixing weights for fiber and GRF components.

    With ``ratio="variance"`` (default) the weights are shares of the
    variance: 2:1 puts one third of the fluctuation energy into the GRF.
    ``ratio="amplitude"`` treats them as standard-deviation weights instead.
    """

    fiber_weight: float = 1.0
    grf_weight: float = 0.0
    ratio: Literal["variance", "amplitude"] = "variance"

    def __post_init__(self):
        if not self.fiber_weight > 0:
            raise ValueError("fiber weight must be positive")
        if self.grf_weight < 0:
            raise ValueError("GRF weight must be nonnegative")
        if self.ratio not in ("variance", "amplitude"):
            raise ValueError(f"unknown ratio convention {self.ratio!r}")


@dataclass(frozen=True)
class SimPreset:
    name: str
    grf_wavelength: float
    fiber_weight: float
    grf_weight: float
    width: int = 1024
    height: int = 1024
    pixel_size: float = 7.0
    fiber_diameter: float = 42.0
    mean_length: float = 896.0


PRESETS = {
    "sim1": SimPreset("sim1", 0.0, 1.0, 0.0),
    "sim2": SimPreset("sim2", 875.0, 2.0, 1.0),
    "sim3": SimPreset("sim3", 1750.0, 2.0, 1.0),
    "sim4": SimPreset("sim4", 1750.0, 3.0, 1.0),
}


def _linear_interval(coef, lo, hi):
    """Solutions s of ``lo <= coef*s <= hi``; empty sets come back as (inf, -inf)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        a, b = lo / coef, hi / coef
    pos, neg = coef > 0, coef < 0
    zero_ok = (lo <= 0) & (hi >= 0)
    s_lo = np.where(pos, a, np.where(neg, b, np.where(zero_ok, -np.inf, np.inf)))
    s_hi = np.where(pos, b, np.where(neg, a, np.where(zero_ok, np.inf, -np.inf)))
    return s_lo, s_hi


def rasterize_segments(segments, width: int, height: int, pixel_size: float,
                       diameter: float) -> np.ndarray:
    """Count, per pixel, the disk-dilated segments covering its center.

    ``segments`` is an ``(n, 4)`` array of endpoints ``(ax, ay, bx, by)`` in
    um; pixel ``(j, i)`` has its center at ``((i + .5) p, (j + .5) p)``.  A
    pixel is covered when its center lies within ``diameter/2`` of the
    segment.
    """
    seg = np.asarray(segments, dtype=float).reshape(-1, 4)
    out_shape = (height, width)
    if len(seg) == 0:
        return np.zeros(out_shape)
    p, r = float(pixel_size), diameter / 2.0
    ax, ay, bx, by = seg.T
    j0 = np.ceil((np.minimum(ay, by) - r) / p - 0.5).astype(np.int64)
    j1 = np.floor((np.maximum(ay, by) + r) / p - 0.5).astype(np.int64)
    j0 = np.maximum(j0, 0)
    j1 = np.minimum(j1, height - 1)
    nrows = np.maximum(j1 - j0 + 1, 0)
    total = int(nrows.sum())
    if total == 0:
        return np.zeros(out_shape)
    k = np.repeat(np.arange(len(seg)), nrows)
    start = np.cumsum(nrows) - nrows
    row = j0[k] + (np.arange(total) - start[k])
    yc = (row + 0.5) * p

    ax, ay, bx, by = ax[k], ay[k], bx[k], by[k]
    dya, dyb = yc - ay, yc - by
    lows, highs = [], []
    for cx, dy in ((ax, dya), (bx, dyb)):
        h2 = r * r - dy * dy
        h = np.sqrt(np.maximum(h2, 0.0))
        lows.append(np.where(h2 >= 0, cx - h, np.inf))
        highs.append(np.where(h2 >= 0, cx + h, -np.inf))
    length = np.hypot(bx - ax, by - ay)
    safe = np.where(length > 0, length, 1.0)
    ux, uy = (bx - ax) / safe, (by - ay) / safe
    # along the axis: 0 <= (x-ax)ux + dya*uy <= L ; across: |-(x-ax)uy + dya*ux| <= r
    lo1, hi1 = _linear_interval(ux, -dya * uy, length - dya * uy)
    lo2, hi2 = _linear_interval(-uy, -r - dya * ux, r - dya * ux)
    body_lo = np.maximum(lo1, lo2) + ax
    body_hi = np.minimum(hi1, hi2) + ax
    body_ok = (length > 0) & (body_lo <= body_hi)
    lows.append(np.where(body_ok, body_lo, np.inf))
    highs.append(np.where(body_ok, body_hi, -np.inf))
    x_lo = np.minimum.reduce(lows)
    x_hi = np.maximum.reduce(highs)

    with np.errstate(invalid="ignore"):
        i0 = np.ceil(x_lo / p - 0.5)
        i1 = np.floor(x_hi / p - 0.5)
    ok = np.isfinite(i0) & np.isfinite(i1)
    i0 = np.clip(i0[ok], 0, width).astype(np.int64)
    i1 = np.clip(i1[ok], -1, width - 1).astype(np.int64)
    row = row[ok]
    keep = i0 <= i1
    row, i0, i1 = row[keep], i0[keep], i1[keep]
    stride = width + 1
    diff = np.bincount(row * stride + i0, minlength=height * stride).astype(np.float64)
    diff -= np.bincount(row * stride + i1 + 1, minlength=height * stride)
    return np.cumsum(diff.reshape(height, stride), axis=1)[:, :width]


def sample_segments(params: SegmentModelParams, width: int, height: int,
                    pixel_size: float) -> np.ndarray:
    """Poisson germs on the window grown by ``mean_length + fiber_diameter``.

    Germs are segment midpoints; the enlarged window keeps segments that
    enter the image from outside (minus-sampling).
    """
    rng = np.random.default_rng(params.seed)
    margin = params.mean_length + params.fiber_diameter
    x0, y0 = -margin, -margin
    x1, y1 = width * pixel_size + margin, height * pixel_size + margin
    n = rng.poisson(params.intensity * (x1 - x0) * (y1 - y0))
    cx = rng.uniform(x0, x1, n)
    cy = rng.uniform(y0, y1, n)
    theta = rng.uniform(0.0, math.pi, n)
    half = 0.5 * rng.exponential(params.mean_length, n)
    dx, dy = half * np.cos(theta), half * np.sin(theta)
    return np.column_stack([cx - dx, cy - dy, cx + dx, cy + dy])


def simulate_segment_field(params: SegmentModelParams, width: int, height: int,
                           pixel_size: float) -> ScalarField:
    """Fiber-count field of the dilated Poisson segment model."""
    if width < 2 or height < 2 or not pixel_size > 0:
        raise DataError("degenerate simulation window")
    expected = params.intensity * width * height * pixel_size ** 2
    if expected < 10:
        warnings.warn(f"expected segment count {expected:.3g} per image is below 10", stacklevel=2)
    segs = sample_segments(params, width, height, pixel_size)
    counts = rasterize_segments(segs, width, height, pixel_size, params.fiber_diameter)
    meta = {"model": "segments", **asdict(params), "n_segments": int(len(segs))}
    return ScalarField(counts, pixel_size, "simulated", meta=meta)


def bessel_ring_wavenumber(wavelength: float) -> float:
    """Angular wavenumber of a GRF with autocorrelation ``J0(2 pi r / wavelength)``.

    All spectral energy of such a field sits on the ring ``rho = 2 pi / wavelength``.
    """
    return 2.0 * math.pi / wavelength


def simulate_bessel_grf(params: BesselGrfParams, width: int, height: int,
                        pixel_size: float) -> ScalarField:
    """Random-wave GRF ``sqrt(2/n) * sum cos(k_i . x + phi_i)`` with ``|k_i|`` fixed.

    Zero mean, unit variance and Bessel autocorrelation as the number of
    waves grows.  A wavelength of 0 gives the all-zero field.
    """
    meta = {"model": "bessel_grf", **asdict(params)}
    if params.wavelength == 0:
        return ScalarField(np.zeros((height, width)), pixel_size, "simulated", meta=meta)
    rng = np.random.default_rng(params.seed)
    n = params.n_waves
    theta = rng.uniform(0.0, 2.0 * math.pi, n)
    phase = rng.uniform(0.0, 2.0 * math.pi, n)
    k = bessel_ring_wavenumber(params.wavelength)
    x = (np.arange(width) + 0.5) * pixel_size
    y = (np.arange(height) + 0.5) * pixel_size
    arg_x = (k * np.cos(theta))[:, None] * x[None, :] + phase[:, None]
    arg_y = (k * np.sin(theta))[:, None] * y[None, :]
    # cos(a + b) = cos a cos b - sin a sin b, summed over waves as two matrix products
    z = np.cos(arg_y).T @ np.cos(arg_x) - np.sin(arg_y).T @ np.sin(arg_x)
    z *= math.sqrt(2.0 / n)
    return ScalarField(z, pixel_size, "simulated", meta=meta)


def _standardize(values: np.ndarray) -> np.ndarray:
    centered = values - values.mean()
    std = math.sqrt(float(np.mean(centered * centered)))
    if std == 0.0:
        return np.zeros_like(values)
    return centered / std


def superpose(fiber: ScalarField, grf: ScalarField, spec: SuperpositionSpec) -> ScalarField:
    """Mix the standardized fiber and GRF fields (a constant GRF adds nothing)."""
    if fiber.shape != grf.shape or fiber.pixel_size != grf.pixel_size:
        raise DataError("fiber and GRF fields differ in shape or pixel size")
    if np.ptp(fiber.values) == 0:
        raise DataError("constant fiber field cannot be standardized")
    f, g = _standardize(fiber.values), _standardize(grf.values)
    wf, wg = spec.fiber_weight, spec.grf_weight
    if spec.ratio == "variance":
        out = (math.sqrt(wf) * f + math.sqrt(wg) * g) / math.sqrt(wf + wg)
    else:
        out = (wf * f + wg * g) / (wf + wg)
    meta = {"superposition": asdict(spec)}
    return ScalarField(out, fiber.pixel_size, "simulated", meta=meta)


def to_transmission_image(f: ScalarField, g0: float, absorption: float) -> ScalarField:
    """Beer-Lambert forward model ``g0 * exp(-absorption * (w - min w))``."""
    if not (g0 > 0 and absorption >= 0):
        raise DataError("g0 must be positive and absorption nonnegative")
    w = f.values
    g = g0 * np.exp(-absorption * (w - w.min()))
    if g.min() < 1.0:
        raise DataError(f"absorption {absorption} drives gray values below 1 "
                        f"(minimum {g.min():.3g}); lower it or raise g0")
    return ScalarField(g, f.pixel_size, "gray_image", meta={"g0": g0, "absorption": absorption})


def preset_seeds(seed: int) -> tuple[int, int]:
    """Independent fiber and GRF seeds derived from one user seed."""
    a, b = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)
    return int(a), int(b)


def simulate_preset(name: str, seed: int, n_waves: int = 256, intensity: float | None = None,
                    size: tuple[int, int] | None = None) -> ScalarField:
    """Weight field of one of the SIM-1..SIM-4 configurations.

    Presets sharing a seed share the fiber realization, and sim3/sim4 also
    share the GRF, so they differ only in the mixing.
    """
    try:
        pre = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    width, height = size or (pre.width, pre.height)
    fiber_seed, grf_seed = preset_seeds(seed)
    fiber = simulate_segment_field(
        SegmentModelParams(pre.fiber_diameter, pre.mean_length, intensity, fiber_seed),
        width, height, pre.pixel_size)
    grf = simulate_bessel_grf(BesselGrfParams(pre.grf_wavelength, n_waves, grf_seed),
                              width, height, pre.pixel_size)
    out = superpose(fiber, grf, SuperpositionSpec(pre.fiber_weight, pre.grf_weight))
    out.meta.update({"preset": asdict(pre), "seed": seed, "n_waves": n_waves,
                     "fiber": fiber.meta, "grf": grf.meta})
    return out
