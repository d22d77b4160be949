"""Exception types shared across the package."""


class BiphaseError(Exception):
    """Base class for every library-specific failure."""


class UsageError(BiphaseError, ValueError):
    """An operation was called outside its documented contract."""


class BasisMismatchError(UsageError):
    """Operands carry incompatible basis tags."""


class NumericError(BiphaseError, ArithmeticError):
    """A numeric input or intermediate value left its valid domain."""


class IndeterminatePhaseError(NumericError):
    """A relative phase was requested between nearly orthogonal states."""


class DegenerateRayError(UsageError):
    """A geodesic was requested between two representatives of one ray."""


class ConvergenceError(NumericError):
    """A matrix decomposition failed to meet its residual tolerance."""


class ConfigError(BiphaseError, ValueError):
    """A scenario configuration is missing, malformed, or inconsistent."""
