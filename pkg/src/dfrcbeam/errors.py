"""Exception types shared across the library."""


class DfrcBeamError(Exception):
    """Base class for all library-specific errors."""


class DimensionMismatchError(DfrcBeamError, ValueError):
    """Operands have inconsistent shapes."""


class NotPositiveDefiniteError(DfrcBeamError):
    """A matrix required to be Hermitian positive definite is not."""


class DegenerateSteeringError(DfrcBeamError):
    """The effective target channel applied to the transmit signal is (near) zero."""


class InfeasibleError(DfrcBeamError):
    """The requested SINR constraints cannot be met within the power budget."""


class NoConvergenceError(DfrcBeamError):
    """An iterative solver hit its iteration cap.

    The best iterate found so far is attached as ``solution``.
    """

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class NumericalBreakdownError(DfrcBeamError):
    """A numerical procedure lost the precision required to continue."""


class RankDeficiencyError(DfrcBeamError):
    """A matrix block stayed numerically above rank one after the reduction step."""
