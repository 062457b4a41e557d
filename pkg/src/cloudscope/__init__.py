"""Cloudiness of nonwoven images from the band-integrated power spectrum."""

__version__ = "0.1.0"

from .errors import DataError, ImageFormatError
from .field_io import ScalarField, load_field, load_image, save_image
from .weight import TransformOptions, log_attenuation, normalize_relative_weight, pixelwise_mean
from .spectrum import (
    FrequencyBand,
    PowerSpectrum2D,
    RadialSpectrum,
    WindowSpec,
    apply_window,
    cloudiness_index,
    error_weight,
    power_spectrum_2d,
    radial_mean,
    valid_band,
    window_integral_variance,
)
from .simulate import (
    PRESETS,
    BesselGrfParams,
    SegmentModelParams,
    SuperpositionSpec,
    simulate_bessel_grf,
    simulate_preset,
    simulate_segment_field,
    superpose,
    to_transmission_image,
)
from .batch import CliReport, analyze_set, summary_stats

__all__ = [
    "DataError", "ImageFormatError", "ScalarField", "load_field", "load_image", "save_image",
    "TransformOptions", "log_attenuation", "normalize_relative_weight", "pixelwise_mean",
    "FrequencyBand", "PowerSpectrum2D", "RadialSpectrum", "WindowSpec", "apply_window",
    "cloudiness_index", "error_weight", "power_spectrum_2d", "radial_mean", "valid_band",
    "window_integral_variance", "PRESETS", "BesselGrfParams", "SegmentModelParams",
    "SuperpositionSpec", "simulate_bessel_grf", "simulate_preset", "simulate_segment_field",
    "superpose", "to_transmission_image", "CliReport", "analyze_set", "summary_stats",
]
