"""Exception types shared across the library."""


class LieMechError(Exception):
    """Base class for library errors."""


class DimensionError(LieMechError, ValueError):
    """Input has the wrong dimension for the algebra or base space."""


class CutLocusError(LieMechError):
    """Logarithm requested too close to the cut locus; re-seed the caller."""


class HyperregularityError(LieMechError):
    """Legendre transform is (numerically) degenerate for this model."""


class DegeneracyError(LieMechError):
    """Highest-order solve is degenerate (e.g. lambda1 = 0 with a jerk slot)."""


class DivergenceError(LieMechError):
    """Integration produced a non-finite state."""

    def __init__(self, t, message=None):
        self.t = t
        super().__init__(message or f"non-finite state at t={t:.6g}")


class NonconvergenceError(LieMechError):
    """Iterative solver exceeded its budget."""

    def __init__(self, residual, iterations, message=None):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            message
            or f"no convergence after {iterations} iterations (residual {residual:.3e})"
        )
