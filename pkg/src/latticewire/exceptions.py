"""Exception hierarchy.

Configuration problems (bad scheme names, inconsistent bit lengths, bad
config files) derive from :class:`ConfigurationError`; failures inside the
simulated signal chain derive from :class:`PipelineError`. The CLI maps the
first family to exit status 2 and the second to exit status 3.
"""


class ConfigurationError(ValueError):
    pass


class InvalidPointError(ValueError):
    """A lattice point lies outside the box or outside every coset."""


class ImageFormatError(ConfigurationError, OSError):
    pass


class PipelineError(RuntimeError):
    pass


class FramingError(PipelineError):
    pass


class ProcessingError(PipelineError):
    pass


class AGCError(PipelineError):
    pass


class SyncError(PipelineError):
    pass


class MeasurementError(PipelineError):
    pass


class DecodeError(PipelineError):
    pass


class EstimationQualityWarning(UserWarning):
    """Raised (as a warning) when a histogram estimate has too few occupied bins."""
