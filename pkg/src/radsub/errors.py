"""Exception types raised by the solver package."""


class SolverError(Exception):
    """Base class for every error raised by radsub."""


class DimensionMismatch(SolverError, ValueError):
    """Vector or matrix shapes do not agree."""


class RankDeficient(SolverError):
    """The Gram matrix of a linear map is numerically singular."""


class RadialUndefined(SolverError):
    """Radial projection requested at a point with lambda_min >= 1."""


class Unsupported(SolverError):
    """Operation not available for this cone oracle."""


class BadWarmStart(SolverError):
    """The warm-start point does not improve on the distinguished direction."""


class ZeroProjectedGradient(SolverError):
    """Projected supgradient vanished at a non-optimal iterate.

    The partially built report is attached as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DomainError(SolverError, ValueError):
    """Arguments outside the domain of an iteration-bound formula."""


class InsufficientTrace(SolverError):
    """Too few positive gaps recorded to fit a convergence rate."""


class InvalidQuery(SolverError, ValueError):
    """Line-search query with t >= f_hat."""


class UnboundedRay(SolverError):
    """Neither the set nor the epigraph boundary was found along a ray."""


class OracleGap(SolverError):
    """The function oracle could not supply a subgradient or normal."""


class StalledStep(SolverError):
    """Algorithm B reached alpha == 1 while the gap is still large."""


class InvalidProblem(SolverError, ValueError):
    """Problem data violate a documented invariant."""


class TooLarge(SolverError):
    """Problem exceeds the size handled by brute-force oracles."""


class Infeasible(SolverError):
    """No feasible point exists."""


class Unbounded(SolverError):
    """Objective is unbounded below on the feasible set."""


class DegenerateGeometry(SolverError):
    """Sampling found no usable points for a geometric estimate."""
