"""Error types raised by blochsim.

Every validation failure derives from :class:`ValidationError` so callers
(and the command line runner) can map it to a single exit status.
"""


class BlochSimError(Exception):
    """Base class for all package errors."""


class ValidationError(BlochSimError, ValueError):
    """An input violates a documented precondition."""


class InvalidDimensionError(ValidationError):
    pass


class UnsupportedDimensionError(ValidationError):
    pass


class NotHermitianError(ValidationError):
    pass


class NotAStateError(ValidationError):
    """Raised when a matrix or Bloch vector does not describe a density operator.

    The offending diagnostics are kept on the instance so they can be
    reported without recomputation.
    """

    def __init__(self, message, trace_error=None, min_eigenvalue=None, hermiticity_error=None):
        super().__init__(message)
        self.trace_error = trace_error
        self.min_eigenvalue = min_eigenvalue
        self.hermiticity_error = hermiticity_error


class NotOrthonormalError(ValidationError):
    pass


class NotUnitaryError(ValidationError):
    pass


class PartitionError(ValidationError):
    pass


class DegenerateSimplexError(ValidationError):
    pass


class BranchImpossibleError(ValidationError):
    """The requested outcome has zero probability for the given state."""


class DegenerateCompressionError(ValidationError):
    """The projected state has zero trace, so no renormalization exists."""


class BoundaryDegenerateError(ValidationError):
    """The state lies on a face where the tie-breaking rule is ambiguous."""


class UnstableEquilibriumError(ValidationError):
    """The state sits exactly on a zero-width disintegration point."""


class InvalidDensityError(ValidationError):
    pass


class UnstableEquilibriumWarning(UserWarning):
    """An atom of the disintegration density sits exactly on the split point."""


class ResourceCapError(BlochSimError):
    """A requested computation exceeds a hard size limit."""
