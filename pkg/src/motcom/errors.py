"""Exception types shared across the package."""


class MotcomError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(MotcomError, ValueError):
    """A ground-truth or metadata file could not be parsed."""


class ValidationError(MotcomError, ValueError):
    """Parsed data violates a structural invariant (bad geometry, duplicates, ...)."""


class MissingFrameError(MotcomError, FileNotFoundError):
    """An image file for a required frame index does not exist."""


class BackendError(MotcomError, RuntimeError):
    """An embedding backend could not be initialized or failed during inference."""
