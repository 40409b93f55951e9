"""Exception types shared across the package."""


class EffpotError(Exception):
    """Base class for computational failures raised by this package."""


class NonConvergence(EffpotError):
    """Quadrature did not reach the requested tolerance.

    Carries the best available value and the achieved error estimate so
    callers can decide whether the partial result is still usable.
    """

    def __init__(self, message, value=None, estimate=None):
        super().__init__(message)
        self.value = value
        self.estimate = estimate


class NonPositiveMass(EffpotError):
    """The position-dependent mass is not positive somewhere.

    The reduced model is meaningless at such parameter points, so this is
    raised at model construction or on evaluation, never silently clamped.
    """


class DomainError(EffpotError):
    """An input lies outside the mathematical domain of an operation."""


class InconsistentEnergy(EffpotError):
    """Initial data does not reproduce the stated conserved energy."""


class StepFailure(EffpotError):
    """Adaptive step-size control could not meet its tolerance."""


class DidNotResolve(EffpotError):
    """A scattering trajectory ended without reaching either asymptotic exit."""
