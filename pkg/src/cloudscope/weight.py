"""Gray values to relative local areal weight.

Under Beer-Lambert attenuation the local areal weight is proportional to
``-ln(g / g0)``.  The proportionality constant is never estimated: it
cancels once the weight is standardized to zero mean and unit variance.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import DataError
from .field_io import ScalarField


@dataclass
class TransformOptions:
    """How gray images become weight fields.

    ``incident_intensity`` (g0) defaults to the image maximum.  A g0 below
    the brightest pixel is allowed but flagged, since it produces weights of
    physically impossible sign.
    """

    mode: Literal["beer_lambert", "linear"] = "beer_lambert"
    incident_intensity: float | None = None
    zero_policy: Literal["error", "clamp_to_min_positive"] = "error"

    def __post_init__(self):
        if self.mode not in ("beer_lambert", "linear"):
            raise ValueError(f"unknown transform mode {self.mode!r}")
        if self.zero_policy not in ("error", "clamp_to_min_positive"):
            raise ValueError(f"unknown zero policy {self.zero_policy!r}")
        if self.incident_intensity is not None and not self.incident_intensity > 0:
            raise ValueError("incident intensity must be positive")

    def summary(self) -> dict:
        return asdict(self)


def log_attenuation(image: ScalarField, opts: TransformOptions | None = None) -> ScalarField:
    """Weight field ``-ln(g / g0)``, or the values unchanged in linear mode.

    The returned field's ``meta`` records ``g0``, the number of clamped
    zero pixels and whether g0 lies below the image maximum.
    """
    opts = opts or TransformOptions()
    g = image.values
    if opts.mode == "linear":
        return image.with_values(g, kind="weight_field")
    if image.kind != "gray_image":
        raise DataError(f"Beer-Lambert transform needs a gray image, got {image.kind}")
    if g.min() < 0:
        raise DataError("negative gray values")
    zeros = int(np.count_nonzero(g == 0))
    if zeros:
        if opts.zero_policy == "error":
            raise DataError(f"{zeros} zero-valued pixel(s): Beer-Lambert transform undefined "
                            "(use zero policy 'clamp' to substitute the smallest positive value)")
        positive = g[g > 0]
        if positive.size == 0:
            raise DataError("image has no positive pixels")
        g = np.where(g == 0, positive.min(), g)
    gmax = float(g.max())
    g0 = float(opts.incident_intensity) if opts.incident_intensity is not None else gmax
    w = -np.log(g / g0)
    meta = {"g0": g0, "clamped_pixels": zeros, "g0_below_max": g0 < gmax}
    out = ScalarField(w, image.pixel_size, "weight_field", meta=meta)
    return out


def normalize_relative_weight(f: ScalarField) -> tuple[ScalarField, float, float]:
    """Standardize to zero mean and unit variance (population convention).

    Returns the normalized field with the mean and standard deviation used,
    i.e. the estimates of the areal weight and its fluctuation up to the
    unknown absorption constant.
    """
    w = f.values
    mean = float(w.mean())
    centered = w - mean
    std = float(np.sqrt(np.mean(centered * centered)))
    if std == 0.0 or np.ptp(w) == 0.0:
        raise DataError("zero variance: cloudiness undefined")
    out = ScalarField(centered / std, f.pixel_size, "normalized_weight", meta=dict(f.meta))
    return out, mean, std


def pixelwise_mean(fields: Sequence[ScalarField]) -> ScalarField:
    """Per-pixel arithmetic mean, accumulated in list order for reproducibility."""
    if len(fields) == 0:
        raise DataError("pixelwise mean of an empty list")
    first = fields[0]
    for i, f in enumerate(fields[1:], start=1):
        if f.shape != first.shape:
            raise DataError(f"field {i} has shape {f.width}x{f.height}, "
                            f"expected {first.width}x{first.height}")
        if f.pixel_size != first.pixel_size:
            raise DataError(f"field {i} has pixel size {f.pixel_size}, expected {first.pixel_size}")
        if f.kind != first.kind:
            raise DataError(f"field {i} has kind {f.kind}, expected {first.kind}")
    if len(fields) == 1:
        return first
    acc = np.zeros(first.shape)
    for f in fields:
        acc += f.values
    return ScalarField(acc / len(fields), first.pixel_size, first.kind)
