"""Exception types shared across the package."""


class InterpConstError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(InterpConstError, ValueError):
    """A caller-supplied parameter is outside its admissible range."""


class DegenerateShapeError(InterpConstError, ValueError):
    """A triangle (or sub-triangle) is degenerate for the requested operation."""


class NotSPDError(InterpConstError, RuntimeError):
    """A matrix expected to be symmetric positive definite failed to factorize."""


class VacuousBoundError(InterpConstError, ValueError):
    """A bound evaluates to something vacuous (e.g. division by a zero seminorm)."""


class InsufficientDataError(InterpConstError, ValueError):
    """Not enough data points to determine the requested fit."""
