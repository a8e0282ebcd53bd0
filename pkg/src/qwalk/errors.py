"""Exception hierarchy for qwalk."""


class QWalkError(Exception):
    """Base class for all qwalk errors."""


class NotUnitary(QWalkError, ValueError):
    """Coin matrix fails the unitarity check."""


class TrivialCoin(QWalkError, ValueError):
    """A coin entry vanishes, so the walk decouples into free motion."""


class OutOfRegime(QWalkError, ValueError):
    """Quantity requested outside the frequency region where it is defined."""


class InconsistentScaling(QWalkError, ValueError):
    """Scaling protocol does not match the regime it is applied to."""


class Unsupported(QWalkError, ValueError):
    """Operation has no meaning for the given limit law."""


class NumericalFailure(QWalkError, RuntimeError):
    """Base class for failures of a numerical procedure."""


class NoConvergence(NumericalFailure):
    """Time evolution did not settle within the step budget.

    The best iterate is kept on the exception so callers can still
    inspect it.
    """

    def __init__(self, message, phi=None, residual=float("nan"), t=0):
        super().__init__(message)
        self.phi = phi
        self.residual = residual
        self.t = t


class SingularSystem(NumericalFailure):
    """Stationary linear system is numerically singular."""


class ZeroField(QWalkError, ValueError):
    """Field has no weight to normalize."""
