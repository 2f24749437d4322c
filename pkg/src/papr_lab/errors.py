class PaprLabError(Exception):
    """Base class for all library errors."""


class LengthError(PaprLabError, ValueError):
    """A buffer has an unusable length (empty, not a power of two, mismatched)."""


class ConfigError(PaprLabError, ValueError):
    """Invalid parameters or experiment configuration."""


class NumericalError(PaprLabError, RuntimeError):
    """A numerical procedure produced an unusable result, e.g. an unstable filter."""
