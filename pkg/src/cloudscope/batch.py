"""Cloudiness of image sets: per-image CLIs, the CLI of the averaged image, box-plot statistics."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Literal, Sequence

from .errors import DataError
from .field_io import ScalarField
from .spectrum import FrequencyBand, WindowSpec, cloudiness_index, power_spectrum_2d, valid_band
from .weight import TransformOptions, log_attenuation, normalize_relative_weight, pixelwise_mean

Mode = Literal["per_image", "pixelwise_mean", "both"]

#: Disagreement between the two averaging orders that triggers a warning.
ORDER_TOLERANCE = 0.01


@dataclass
class SummaryStats:
    n: int
    mean: float
    stddev: float
    min: float
    median: float
    max: float
    q1: float | None = None
    q3: float | None = None

    def to_dict(self) -> dict:
        keys = ("n", "mean", "stddev", "min", "q1", "median", "q3", "max")
        return {k: getattr(self, k) for k in keys if getattr(self, k) is not None}


def _median(sorted_values: Sequence[float]) -> float:
    n = len(sorted_values)
    mid = n // 2
    if n % 2:
        return sorted_values[mid]
    return 0.5 * (sorted_values[mid - 1] + sorted_values[mid])


def summary_stats(values: Sequence[float]) -> SummaryStats:
    """Mean, population standard deviation, extremes and quartiles.

    Quartiles use the inclusive median-of-halves rule: for odd ``n`` the
    median belongs to both halves, and each quartile is the median of its
    half (averaging the two middle values when the half has even length).
    Quartiles are reported only for ``n >= 3``.
    """
    v = sorted(float(x) for x in values)
    n = len(v)
    if n == 0:
        raise ValueError("summary statistics of an empty list")
    mean = math.fsum(v) / n
    stddev = math.sqrt(math.fsum((x - mean) ** 2 for x in v) / n)
    stats = SummaryStats(n, mean, stddev, v[0], _median(v), v[-1])
    if n >= 3:
        half = (n + 1) // 2
        stats.q1 = _median(v[:half])
        stats.q3 = _median(v[n - half:])
    return stats


@dataclass
class ImageResult:
    id: str
    cli: float
    weight_mean: float
    weight_std: float
    warnings: list[str] = field(default_factory=list)


@dataclass
class CliReport:
    band: FrequencyBand
    window: WindowSpec
    transform: dict
    n_images: int
    per_image: list[ImageResult] = field(default_factory=list)
    aggregate_cli: float | None = None
    aggregate_cli_other_order: float | None = None
    stats: SummaryStats | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def per_image_cli(self) -> list[tuple[str, float]]:
        return [(r.id, r.cli) for r in self.per_image]

    def to_dict(self) -> dict:
        """JSON-ready mapping with a fixed key order."""
        return {
            "n_images": self.n_images,
            "band_rho_per_um": [self.band.rho_lo, self.band.rho_hi],
            "window": asdict(self.window),
            "transform": dict(self.transform),
            "per_image": [{"id": r.id, "cli": r.cli} for r in self.per_image],
            "aggregate_cli": self.aggregate_cli,
            "stats": self.stats.to_dict() if self.stats else None,
            "warnings": list(self.warnings),
            "band_wavelengths_um": list(self.band.wavelengths),
            "normalization": [{"id": r.id, "mean": r.weight_mean, "stddev": r.weight_std}
                              for r in self.per_image],
        }


def default_threads() -> int:
    env = os.environ.get("CLOUDSCOPE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _weight_warnings(image_id: str, weight: ScalarField) -> list[str]:
    out = []
    clamped = weight.meta.get("clamped_pixels", 0)
    if clamped:
        out.append(f"{image_id}: {clamped} zero pixel(s) clamped to the smallest positive value")
    if weight.meta.get("g0_below_max"):
        out.append(f"{image_id}: incident intensity {weight.meta['g0']:g} is below the "
                   "brightest pixel; some weights are negative")
    return out


def _cli_of_weight(weight: ScalarField, window: WindowSpec, band: FrequencyBand):
    normalized, mean, std = normalize_relative_weight(weight)
    ps = power_spectrum_2d(normalized, window)
    return cloudiness_index(ps, band), mean, std


def image_cli(image: ScalarField, opts: TransformOptions, window: WindowSpec,
              band: FrequencyBand, image_id: str = "image") -> ImageResult:
    """Full pipeline for one image: weight, normalization, spectrum, CLI."""
    try:
        weight = log_attenuation(image, opts)
        cli, mean, std = _cli_of_weight(weight, window, band)
    except DataError as exc:
        raise DataError(f"{image_id}: {exc}") from exc
    return ImageResult(image_id, cli, mean, std, _weight_warnings(image_id, weight))


def _check_geometry(images: Sequence[ScalarField], ids: Sequence[str]):
    first = images[0]
    for image_id, im in zip(ids, images):
        if im.shape != first.shape or im.pixel_size != first.pixel_size:
            raise DataError(f"{image_id}: geometry {im.width}x{im.height} at {im.pixel_size} um "
                            f"differs from {first.width}x{first.height} at {first.pixel_size} um")


def analyze_set(images: Sequence[ScalarField], opts: TransformOptions | None = None,
                window: WindowSpec | None = None, band: FrequencyBand | None = None,
                mode: Mode = "both", ids: Sequence[str] | None = None,
                average_after_log: bool = False, threads: int | None = None) -> CliReport:
    """CLI of every image and/or of their pixel-wise mean.

    Images are processed in ``ids`` order regardless of input order, so
    shuffling the input changes nothing in the report.  In pixel-wise mode
    gray images are averaged before the log transform unless
    ``average_after_log`` is set; the other order is computed too and a
    warning is added when the two differ by more than one percentage point.
    """
    opts = opts or TransformOptions()
    window = window or WindowSpec()
    band = band or FrequencyBand(0.02, 0.10)
    if mode not in ("per_image", "pixelwise_mean", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    if len(images) == 0:
        raise DataError("no images to analyze")
    if ids is None:
        ids = [im.meta.get("source") or f"image{i:04d}" for i, im in enumerate(images)]
    if len(ids) != len(images):
        raise ValueError("need one id per image")
    if len(set(ids)) != len(ids):
        raise ValueError("image ids must be unique")
    order = sorted(range(len(ids)), key=lambda i: ids[i])
    ids = [ids[i] for i in order]
    images = [images[i] for i in order]
    _check_geometry(images, ids)

    first = images[0]
    checked = valid_band(band, first.width, first.height, first.pixel_size)
    if checked.status != "valid":
        raise DataError("invalid frequency band: " + "; ".join(checked.warnings or [checked.status]))

    transform = opts.summary()
    transform["average_after_log"] = average_after_log
    report = CliReport(checked, window, transform, len(images), warnings=list(checked.warnings))

    if mode in ("per_image", "both"):
        workers = max(1, min(threads or default_threads(), len(images)))
        if workers == 1:
            results = [image_cli(im, opts, window, checked, i) for i, im in zip(ids, images)]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda a: image_cli(a[1], opts, window, checked, a[0]),
                                        zip(ids, images)))
        report.per_image = results
        for r in results:
            report.warnings.extend(r.warnings)
        report.stats = summary_stats([r.cli for r in results])
        transform["clamped_images"] = sum(1 for r in results if any("clamped" in w for w in r.warnings))

    if mode in ("pixelwise_mean", "both"):
        before, after = _aggregate(images, opts, window, checked)
        primary, other = (after, before) if average_after_log else (before, after)
        report.aggregate_cli = primary
        report.aggregate_cli_other_order = other
        if other is not None and abs(primary - other) > ORDER_TOLERANCE:
            report.warnings.append(
                f"averaging before the log transform gives CLI {before:.6f}, after it "
                f"{after:.6f}; the two orders differ by more than "
                f"{100 * ORDER_TOLERANCE:g} percentage point")
    return report


def _aggregate(images, opts, window, band) -> tuple[float, float | None]:
    """CLI of the mean image, averaging before and after the log transform."""
    try:
        mean_gray = pixelwise_mean(images)
        weight = log_attenuation(mean_gray, opts)
        before, _, _ = _cli_of_weight(weight, window, band)
        if opts.mode == "linear":
            return before, None
        if len(images) == 1:
            return before, before
        weights = [log_attenuation(im, opts) for im in images]
        after, _, _ = _cli_of_weight(pixelwise_mean(weights), window, band)
    except DataError as exc:
        raise DataError(f"pixel-wise mean: {exc}") from exc
    return before, after
