"""Exception and warning types shared across the package."""


class HyperballsError(Exception):
    """Base class for all errors raised by hyperballs."""


class DomainError(HyperballsError, ValueError):
    """A point lies outside the domain it was evaluated in."""


class ValidityError(HyperballsError, ValueError):
    """A radius (or other parameter) is outside the range where a formula holds."""


class ConfigurationError(HyperballsError, ValueError):
    """Incompatible metric/domain combination or malformed configuration."""


class UnreachableOnRay(HyperballsError):
    """The target metric value is not attained before the ray leaves the domain."""


class EmptyBoundaryError(HyperballsError):
    """Every sampling ray was unreachable, so no boundary point was found."""


class NoConvergence(HyperballsError):
    """An iterative solver hit its iteration cap.

    ``best`` and ``gap`` carry the best value found and the last improvement.
    """

    def __init__(self, message, best=None, gap=None):
        super().__init__(message)
        self.best = best
        self.gap = gap


class InternalConsistencyError(HyperballsError, RuntimeError):
    """A computed value contradicts a proven bound; indicates a solver bug."""


class MonotonicityWarning(UserWarning):
    """Metric values along a ray were not monotone before the first crossing."""
