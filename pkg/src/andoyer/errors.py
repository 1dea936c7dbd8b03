"""Exception types shared across the package."""


class AndoyerError(Exception):
    """Base class for all package errors."""


class ChartSingular(AndoyerError):
    """A coordinate chart is undefined at the requested state (node line degenerate)."""


class ZeroMomentum(AndoyerError):
    pass


class FixtureError(AndoyerError):
    """Random fixture generation could not satisfy its contract."""


class StepTooSmall(AndoyerError):
    """Finite-difference estimate is dominated by rounding noise or truncation error.

    ``spread`` is the disagreement between the estimates at ``h`` and ``h/2``.
    """

    def __init__(self, message, spread=float("inf")):
        super().__init__(message)
        self.spread = spread


class SingularInertia(AndoyerError):
    pass


class SingularBandReached(AndoyerError):
    """Integration entered the |L| > 0.999 G band; the partial trajectory is attached."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory
