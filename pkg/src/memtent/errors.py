"""Exception hierarchy shared by the library and the CLI."""


class MemtentError(Exception):
    """Base class for all library errors."""


class DomainError(MemtentError, ValueError):
    """Input outside the domain of a map (e.g. tent argument not in [0, 1])."""


class ParameterError(MemtentError, ValueError):
    """Invalid map parameter (alpha outside (0, 1), negative discriminant...)."""


class RegimeError(ParameterError):
    """Parameter valid in general but outside the regime an operation needs."""


class SingularityError(MemtentError, ArithmeticError):
    """A direction transform was evaluated at (or next to) its pole."""


class AdmissibilityError(MemtentError, ValueError):
    """A backward branch sequence has no realizing preimages."""


class DegenerateInputError(MemtentError, ValueError):
    """Geometry too small to be processed (zero-length segment, ...)."""


class InconclusiveError(MemtentError, RuntimeError):
    """A Monte Carlo probe accepted too few samples to say anything."""
