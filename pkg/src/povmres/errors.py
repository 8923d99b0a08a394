"""Exception hierarchy."""


class PovmError(Exception):
    """Base class for all package errors."""


class ValidationError(PovmError, ValueError):
    """Input violates a structural invariant (shape, Hermiticity, completeness)."""


class DomainError(PovmError, ValueError):
    """Input is outside the domain of a function (e.g. a negative eigenvalue)."""


class FreeOperationError(PovmError, ValueError):
    """A channel offered as a free operation fails the unital/detection-incoherent test."""


class TheoremViolation(PovmError, RuntimeError):
    """A proven inequality failed numerically; indicates an implementation bug."""
