"""Exception hierarchy shared by the solver modules."""


class ScatteringError(Exception):
    """Base class for numerical failures raised by :mod:`scatter1d`."""


class AnalyticOnlyError(ScatteringError, ValueError):
    """A distributional potential was sampled pointwise."""


class GridCollisionError(ScatteringError):
    """The on-shell momentum coincides with a quadrature node."""


class SingularSystemError(ScatteringError):
    """The discretized Lippmann-Schwinger matrix could not be factorized."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ResolutionError(ScatteringError):
    """Two resolutions of the same calculation disagree beyond tolerance."""
