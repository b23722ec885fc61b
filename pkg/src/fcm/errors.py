"""Exception types shared across the package."""


class FcmError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(FcmError):
    """Invalid parameters, grid/domain mismatch, or malformed config input."""


class OutOfDomainError(FcmError):
    """A point was evaluated outside the admissible region."""


class UnsupportedTopologyError(FcmError):
    """An element/domain intersection is outside the supported single-chain,
    star-shaped class (e.g. a boundary crossing one element twice)."""


class DataError(FcmError):
    """User-supplied data (callbacks, CSV input) produced invalid values."""


class SingularSystemError(FcmError):
    """Factorization broke down or a solve failed its residual check."""


class IndefiniteSystemError(FcmError):
    """A matrix expected to be positive definite was detected not to be."""


class CapabilityError(FcmError):
    """The request exceeds a documented size/feature limit."""
