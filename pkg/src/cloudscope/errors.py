"""Exception types shared across the pipeline."""


class DataError(ValueError):
    """Input data violates a precondition of the analysis.

    Raised for zero pixels under a strict zero policy, constant fields,
    geometry mismatches and frequency bands outside the measurable range.
    The command-line front end maps it to exit code 2.
    """


class ImageFormatError(DataError):
    """Image file is readable but not a supported single-channel format."""
