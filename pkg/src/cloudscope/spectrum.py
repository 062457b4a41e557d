"""Windowed periodogram, rotation mean and the band-integrated cloudiness index.

Frequencies in the public API are angular, ``rho = 2*pi*f`` in 1/um, so a
band edge converts to a wavelength as ``2*pi/rho``.  FFT bins are ordinary
frequencies internally; :func:`to_angular` is the only place the two meet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from .errors import DataError
from .field_io import ScalarField

TWO_PI = 2.0 * math.pi

BandStatus = Literal["unchecked", "valid", "below_low_limit", "above_nyquist", "inverted"]


def to_angular(freq):
    """Ordinary frequency (cycles/um) to angular frequency rho (1/um)."""
    return TWO_PI * freq


def wavelength(rho):
    """Wavelength in um of angular frequency ``rho``."""
    return TWO_PI / rho


@dataclass(frozen=True)
class WindowSpec:
    kind: Literal["none", "hann"] = "hann"
    energy_compensation: bool = True

    def __post_init__(self):
        if self.kind not in ("none", "hann"):
            raise ValueError(f"unknown window {self.kind!r}")


@dataclass
class FrequencyBand:
    """Half-open band ``[rho_lo, rho_hi)`` of angular frequencies in 1/um."""

    rho_lo: float
    rho_hi: float
    status: BandStatus = "unchecked"
    warnings: list[str] = field(default_factory=list)
    rho_min_valid: float | None = None
    rho_max_valid: float | None = None

    @classmethod
    def from_wavelengths(cls, shortest: float, longest: float) -> "FrequencyBand":
        """Band between two wavelengths in um (order does not matter)."""
        lo, hi = sorted((shortest, longest))
        if lo <= 0:
            raise ValueError("wavelengths must be positive")
        return cls(wavelength(hi), wavelength(lo))

    @property
    def wavelengths(self) -> tuple[float, float]:
        """(shortest, longest) wavelength in um."""
        return wavelength(self.rho_hi), wavelength(self.rho_lo)

    def contains(self, rho):
        return (rho >= self.rho_lo) & (rho < self.rho_hi)


@dataclass(frozen=True)
class PowerSpectrum2D:
    """Periodogram in FFT layout (DC at index [0, 0]).

    ``energies`` holds the normalized non-DC energies (they sum to one) with
    the DC entry set to zero; the DC energy is kept in ``dc_energy`` in the
    same normalized units.  ``total_fluctuation_energy`` is the non-DC sum
    before normalization, which equals the population variance of the
    windowed field.
    """

    energies: np.ndarray
    pixel_size: float
    dc_energy: float
    total_fluctuation_energy: float
    window: WindowSpec
    normalized: bool = True

    @property
    def height(self) -> int:
        return self.energies.shape[0]

    @property
    def width(self) -> int:
        return self.energies.shape[1]

    @property
    def df_x(self) -> float:
        return 1.0 / (self.width * self.pixel_size)

    @property
    def df_y(self) -> float:
        return 1.0 / (self.height * self.pixel_size)

    @property
    def rho(self) -> np.ndarray:
        return radial_frequency(self.width, self.height, self.pixel_size)

    @property
    def raw_energies(self) -> np.ndarray:
        return self.energies * self.total_fluctuation_energy


@dataclass(frozen=True)
class RadialSpectrum:
    """Rotation mean of a normalized spectrum, one entry per non-empty annulus.

    ``density`` is in um^2: the mean bin energy divided by the area of one
    FFT bin in angular-frequency space (``bin_area``), so that
    ``sum(density * count * bin_area) == 1``.
    """

    rho: np.ndarray
    density: np.ndarray
    count: np.ndarray
    error_weight: np.ndarray
    delta_rho: float
    bin_area: float

    def __len__(self):
        return len(self.rho)


@lru_cache(maxsize=16)
def _frequency_grids(width: int, height: int, pixel_size: float):
    fx = np.fft.fftfreq(width, d=pixel_size)
    fy = np.fft.fftfreq(height, d=pixel_size)
    rho = to_angular(np.hypot(fx[None, :], fy[:, None]))
    rho.setflags(write=False)
    return fx, fy, rho


def radial_frequency(width: int, height: int, pixel_size: float) -> np.ndarray:
    """Angular frequency magnitude of every FFT bin, shape ``(height, width)``."""
    return _frequency_grids(int(width), int(height), float(pixel_size))[2]


def hann(n: int) -> np.ndarray:
    """Symmetric Hann taper, zero at both ends."""
    if n < 2:
        return np.ones(n)
    i = np.arange(n)
    return 0.5 * (1.0 - np.cos(TWO_PI * i / (n - 1)))


def apply_window(f: ScalarField, window: WindowSpec) -> ScalarField:
    """Taper ``f`` with a separable window.

    With energy compensation the result is divided by the RMS of the 2-D
    window, which preserves the expected total power.
    """
    if window.kind == "none":
        return f
    if min(f.shape) < 3:
        raise DataError("a Hann window needs at least 3 pixels along each axis")
    hy, hx = hann(f.height), hann(f.width)
    w2d = hy[:, None] * hx[None, :]
    out = f.values * w2d
    if window.energy_compensation:
        out = out / math.sqrt(float(np.mean(w2d * w2d)))
    kind = "weight_field" if f.kind == "normalized_weight" else f.kind
    return ScalarField(out, f.pixel_size, kind)


def power_spectrum_2d(f: ScalarField, window: WindowSpec | None = None) -> PowerSpectrum2D:
    """Normalized periodogram ``|FFT|^2 / N^2`` of the windowed field.

    Scaling by ``1/N^2`` makes the sum over all bins the mean square of the
    windowed samples, so the non-DC sum is their population variance.
    """
    window = window or WindowSpec()
    if np.ptp(f.values) == 0.0:
        raise DataError("zero fluctuation energy: constant field")
    x = apply_window(f, window).values
    n = x.size
    spec = np.fft.fft2(x)
    e = (spec.real ** 2 + spec.imag ** 2) / (n * n)
    dc = float(e[0, 0])
    e[0, 0] = 0.0
    total = float(e.sum())
    if not total > 0.0:
        raise DataError("zero fluctuation energy after windowing")
    e /= total
    e.setflags(write=False)
    return PowerSpectrum2D(e, f.pixel_size, dc / total, total, window)


def radial_mean(ps: PowerSpectrum2D) -> RadialSpectrum:
    """Average the spectrum over annuli of width ``2*pi*max(df_x, df_y)``.

    Annulus ``i`` holds bins with ``(i - 1/2) <= rho/delta_rho < (i + 1/2)``
    and is reported at ``rho = i*delta_rho``.  Non-DC bins that would fall
    in annulus 0 (possible only for strongly elongated images) are merged
    into annulus 1.
    """
    if not ps.normalized:
        raise ValueError("radial mean needs a normalized spectrum")
    delta_rho = to_angular(max(ps.df_x, ps.df_y))
    idx = np.floor(ps.rho / delta_rho + 0.5).astype(np.int64)
    idx = np.maximum(idx, 1)
    nondc = np.ones(ps.energies.shape, dtype=bool)
    nondc[0, 0] = False
    idx = idx[nondc]
    e = ps.energies[nondc]
    sums = np.bincount(idx, weights=e)
    counts = np.bincount(idx)
    keep = np.nonzero(counts)[0]
    bin_area = to_angular(ps.df_x) * to_angular(ps.df_y)
    rho = keep * delta_rho
    density = sums[keep] / (counts[keep] * bin_area)
    weights = error_weight(ps.width, ps.height, ps.pixel_size, rho)
    return RadialSpectrum(rho, density, counts[keep], np.atleast_1d(weights), delta_rho, bin_area)


def valid_band(band: FrequencyBand, width: int, height: int, pixel_size: float) -> FrequencyBand:
    """Check a band against the measurable range of an image geometry.

    The longest usable wavelength is the half diagonal of the image and the
    shortest is two pixels.  Soft warnings flag bands whose longest
    wavelength exceeds a quarter of the half diagonal, or whose shortest is
    below four pixels.
    """
    if width <= 0 or height <= 0 or pixel_size <= 0:
        raise ValueError("image dimensions and pixel size must be positive")
    gamma_max = math.hypot(width, height) * pixel_size / 2.0
    gamma_min = 2.0 * pixel_size
    rho_min, rho_max = wavelength(gamma_max), wavelength(gamma_min)
    lo, hi = band.rho_lo, band.rho_hi
    warnings = []
    if not (0 < lo < hi):
        status = "inverted"
    elif wavelength(lo) > gamma_max:
        status = "below_low_limit"
        warnings.append(f"band lower edge {lo:.6g} 1/um is below the half-diagonal limit "
                        f"{rho_min:.6g} 1/um (wavelength {gamma_max:.6g} um)")
    elif wavelength(hi) < gamma_min:
        status = "above_nyquist"
        warnings.append(f"band upper edge {hi:.6g} 1/um exceeds the Nyquist-side limit "
                        f"{rho_max:.5f} 1/um (wavelength {gamma_min:.6g} um)")
    else:
        status = "valid"
    if status == "valid":
        if wavelength(lo) > gamma_max / 4.0:
            warnings.append(f"longest band wavelength {wavelength(lo):.6g} um exceeds a quarter of "
                            f"the image half diagonal ({gamma_max:.6g} um): large statistical error")
        if wavelength(hi) < 4.0 * pixel_size:
            warnings.append(f"shortest band wavelength {wavelength(hi):.6g} um is below four pixels "
                            f"({4.0 * pixel_size:.6g} um): resolution bias likely")
    return FrequencyBand(lo, hi, status, warnings, rho_min, rho_max)


def full_band(ps: PowerSpectrum2D) -> FrequencyBand:
    """Band covering every non-DC bin of ``ps``, including the corners."""
    rho = ps.rho
    lo = float(rho[rho > 0].min())
    hi = float(np.nextafter(rho.max(), np.inf))
    return FrequencyBand(lo, hi)


def cloudiness_index(ps: PowerSpectrum2D, band: FrequencyBand, strict: bool = True) -> float:
    """Fraction of fluctuation energy with ``rho`` in ``[rho_lo, rho_hi)``.

    Summed directly over the 2-D bins, so there is no radial binning error.
    With ``strict`` the band must be valid for the spectrum's geometry;
    otherwise any band with ``0 < rho_lo < rho_hi`` is accepted (useful for
    the full band, whose corners lie beyond the Nyquist-side limit).
    """
    if not ps.normalized:
        raise ValueError("cloudiness index needs a normalized spectrum")
    if strict:
        checked = valid_band(band, ps.width, ps.height, ps.pixel_size)
        if checked.status != "valid":
            detail = "; ".join(checked.warnings) or f"band status {checked.status}"
            raise DataError(f"invalid frequency band: {detail}")
    elif not (0 < band.rho_lo < band.rho_hi):
        raise DataError(f"invalid frequency band [{band.rho_lo}, {band.rho_hi})")
    value = float(ps.energies[band.contains(ps.rho)].sum())
    return min(value, 1.0)


def box_transfer(freq: np.ndarray, side: float) -> np.ndarray:
    """Transfer function of a moving average over ``side`` pixels.

    ``freq`` is in cycles per pixel.  This is the discrete (Dirichlet)
    kernel ``sin(pi f a) / (a sin(pi f))``; it is exact for the cyclic box
    mean at integer ``side`` and tends to ``sinc(pi f a)`` at low frequency.
    """
    freq = np.asarray(freq, dtype=float)
    s = np.sin(np.pi * freq)
    out = np.ones_like(freq)
    nz = s != 0
    out[nz] = np.sin(np.pi * freq[nz] * side) / (side * s[nz])
    return out


def window_integral_variance(ps: PowerSpectrum2D, window_side: float) -> float:
    """Variance of the normalized weight averaged over a square window.

    ``window_side`` is in um.  Computed as the spectrum weighted by the
    squared box transfer function along both axes, DC excluded.  Sides
    below one pixel are treated as one pixel, where the value is 1.
    """
    if not ps.normalized:
        raise ValueError("window variance needs a normalized spectrum")
    extent = min(ps.width, ps.height) * ps.pixel_size
    if not (0 < window_side <= extent):
        raise DataError(f"window side must lie in (0, {extent}] um, got {window_side}")
    a = max(window_side / ps.pixel_size, 1.0)
    tx = box_transfer(np.fft.fftfreq(ps.width), a)
    ty = box_transfer(np.fft.fftfreq(ps.height), a)
    gain = (ty * ty)[:, None] * (tx * tx)[None, :]
    return float(np.sum(ps.energies * gain))


def error_weight(width: int, height: int, pixel_size: float, rho, n_orientations: int = 256):
    """Relative precision of the spectrum estimate at angular frequency ``rho``.

    Ratio of the field-of-view area eroded by a segment of length
    ``2*pi/rho`` (averaged over segment orientations) to the full area.
    Returns 1 at zero wavelength and 0 once the wavelength reaches the
    image diagonal.
    """
    if n_orientations < 64:
        raise ValueError("need at least 64 orientation samples")
    rho = np.asarray(rho, dtype=float)
    big_w, big_h = width * pixel_size, height * pixel_size
    diag = math.hypot(big_w, big_h)
    with np.errstate(divide="ignore"):
        gamma = np.where(rho > 0, TWO_PI / np.where(rho > 0, rho, 1.0), np.inf)
    theta = (np.arange(n_orientations) + 0.5) * (math.pi / n_orientations)
    c, s = np.abs(np.cos(theta)), np.abs(np.sin(theta))
    g = np.where(np.isfinite(gamma), gamma, 0.0)[..., None]
    area = np.maximum(big_w - g * c, 0.0) * np.maximum(big_h - g * s, 0.0)
    out = area.mean(axis=-1) / (big_w * big_h)
    out = np.where(gamma >= diag, 0.0, out)
    return float(out) if out.ndim == 0 else out
