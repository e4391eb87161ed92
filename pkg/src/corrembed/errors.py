"""Exception types shared across the package."""


class CorrEmbedError(Exception):
    """Base class for every error this package raises deliberately."""


class DataError(CorrEmbedError):
    """Malformed, mismatched, or unreadable input data. CLI exit code 1."""


class DegenerateInputError(CorrEmbedError):
    """Structurally valid input that admits no meaningful score. CLI exit code 2."""
