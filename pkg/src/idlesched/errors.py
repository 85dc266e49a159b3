"""Exception hierarchy shared across the package."""


class IdleSchedError(Exception):
    """Base class for all package-specific errors."""


class InfeasibleOrder(IdleSchedError):
    """A propagated execution window is shorter than the processing time."""


class InvalidSchedule(IdleSchedError):
    """Start times violate windows, ordering, or overlap constraints."""


class DegenerateHorizon(IdleSchedError):
    """Scheduling horizon has zero length."""


class NegativeDuration(IdleSchedError):
    """An idle-period length must be non-negative."""


class NonConcaveFunction(IdleSchedError):
    """Energy function rejected by the concavity check."""


class NonConcaveInduced(NonConcaveFunction):
    """Gap-cost function induced by a transition graph is not concave."""


class OutOfRange(IdleSchedError):
    """Requested state lies outside the model's admissible range."""


class NotAdmissible(IdleSchedError):
    """Model parameters violate the admissibility condition."""


class SingularSystem(IdleSchedError):
    """Regressor matrix is rank deficient; parameters unidentifiable."""


class TooShortSeries(IdleSchedError):
    """Not enough samples for the requested fitting window."""


class DivisionByZeroTemperature(IdleSchedError):
    """Measured series contains a zero temperature sample."""


class TooLarge(IdleSchedError):
    """Instance exceeds the brute-force guard limits."""


class NoPath(IdleSchedError):
    """Energy graph has no source-to-sink path."""


class NotATaskVertex(IdleSchedError):
    """Operation requires a release/deadline vertex, not source/sink."""


class FullyUtilised(IdleSchedError):
    """No idle capacity; average idle power undefined."""
