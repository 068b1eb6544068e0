"""Supgradient methods for ``min c.x  s.t.  Ax = b, x in K``.

Both algorithms work on the equivalent problem of maximizing
``lambda_min`` over the slice ``Affine_z = {x : Ax = b, c.x = z}`` and
map iterates back to feasible points with :func:`radial_project`.
Supgradients are projected onto ``ker [A; c^T]`` so iterates never leave
their slice.
"""

from __future__ import annotations

import math
import time
from typing import NamedTuple, Optional

import numpy as np

from .cones import ConeOracle, radial_project
from .errors import (BadWarmStart, DomainError, InsufficientTrace, InvalidProblem,
                     ZeroProjectedGradient)
from .linalg import LinearMap, as_vector, build_projector
from .report import IterRecord, SolveReport, SolverConfig

FOUR_THIRDS = 4.0 / 3.0


class ConicProgram:
    """``inf c.x`` over ``{x : A x = b} ∩ K`` with a strictly feasible ``e``.

    ``e`` is the cone's distinguished direction. Construction builds the
    projector onto ``ker [A; c^T]`` and fails with ``RankDeficient`` if
    ``c`` lies in the row space of ``A``.
    """

    def __init__(self, c, A, b, cone: ConeOracle, name="conic", feas_tol=1e-10):
        self.cone = cone
        n = cone.dim
        self.c = as_vector(c, n)
        self.A = A if isinstance(A, LinearMap) else LinearMap(A, n=n)
        if self.A.n != n:
            raise InvalidProblem(f"A has {self.A.n} columns, cone has dimension {n}")
        self.b = as_vector(b, self.A.m)
        self.name = name
        e = cone.direction
        resid = self.A @ e - self.b
        scale = max(1.0, float(np.max(np.abs(self.b))) if self.b.size else 1.0)
        if resid.size and np.max(np.abs(resid)) > feas_tol * scale:
            raise InvalidProblem(f"A e != b (max residual {np.max(np.abs(resid)):.3e})")
        if not cone.lambda_min(e) > 0.0:
            raise InvalidProblem("distinguished direction is not interior to the cone")
        self.affine_projector = build_projector(self.A)
        self.projector = build_projector(self.A.stacked(self.c))
        self.ce = float(self.c @ e)

    @property
    def e(self):
        return self.cone.direction

    @property
    def n(self):
        return self.cone.dim

    def objective(self, x) -> float:
        return float(self.c @ x)

    def slice_rhs(self, z):
        return np.append(self.b, z)

    def residual(self, x) -> float:
        if self.A.m == 0:
            return 0.0
        return float(np.linalg.norm(self.A @ x - self.b))

    def project_supgradient(self, g):
        return self.projector.apply(g)

    def default_warm_start(self):
        """``e - P(c)``: an affine point with ``c.x < c.e``."""
        return self.e - self.affine_projector.apply(self.c)

    def __repr__(self):
        return f"ConicProgram(name={self.name!r}, n={self.n}, m={self.A.m})"


def _check_warm_start(prog, x_bar):
    x_bar = as_vector(x_bar, prog.n)
    if not prog.objective(x_bar) < prog.ce:
        raise BadWarmStart(
            f"need c.x_bar < c.e, got {prog.objective(x_bar):.6g} >= {prog.ce:.6g}")
    return x_bar


def algorithm1(prog: ConicProgram, z_star: float, x_bar, cfg: Optional[SolverConfig] = None) -> SolveReport:
    """Supgradient method with Polyak steps when the optimal value is known.

    Iterates stay on ``Affine_{z*}``; each is pushed by
    ``-lambda_min(x)/||P g||^2 * P g`` and the iterate is optimal exactly
    when ``lambda_min`` reaches zero.
    """
    cfg = cfg or SolverConfig()
    x_bar = _check_warm_start(prog, x_bar)
    cone, e, ce = prog.cone, prog.e, prog.ce
    z_star = float(z_star)
    if not z_star < ce:
        raise InvalidProblem("z_star must be below c.e")
    x = e + ((ce - z_star) / (ce - prog.objective(x_bar))) * (x_bar - e)
    rhs = prog.slice_rhs(z_star)
    report = SolveReport("1", optimal_value=z_star, tolerances={
        "optimality_tol": cfg.optimality_tol, "zero_gradient_tol": cfg.zero_gradient_tol})
    start = time.perf_counter_ns()
    for k in range(cfg.max_iterations + 1):
        lam = cone.lambda_min(x)
        pi = radial_project(cone, x, lam)
        obj = prog.objective(pi)
        rec = IterRecord(k, lam, obj, (obj - z_star) / (ce - z_star),
                         wall_ns=time.perf_counter_ns() - start,
                         x=x.copy() if cfg.keep_points else None,
                         point=pi if cfg.keep_points else None)
        report.add(rec, pi)
        if lam >= -cfg.optimality_tol:
            report.termination = "optimal"
            break
        if k == cfg.max_iterations:
            report.termination = "max_iterations"
            break
        pg = prog.project_supgradient(cone.supgradient(x))
        nrm2 = float(pg @ pg)
        rec.step_norm = math.sqrt(nrm2)
        if rec.step_norm <= cfg.zero_gradient_tol:
            report.termination = "zero_projected_gradient"
            raise ZeroProjectedGradient(
                f"projected supgradient vanished at k={k} with lambda_min={lam:.3e}; "
                "z_star is probably below the true optimal value", report)
        x = x - (lam / nrm2) * pg
        if (k + 1) % cfg.reorthogonalize_every == 0:
            x = prog.projector.restore(x, rhs)
    return report


def algorithm2(prog: ConicProgram, epsilon: float, x_bar, cfg: Optional[SolverConfig] = None,
               z_star: Optional[float] = None) -> SolveReport:
    """Fixed-step supgradient method with radial restarts.

    Steps have length ``epsilon / (2 ||P g||)``. Whenever the radial
    projection of the trial point improves ``c.e - c.x`` by a factor of at
    least 4/3, the iterate jumps to the boundary and a new outer iteration
    begins on a lower objective slice.

    ``z_star`` is optional and used only for reporting gaps and for
    stopping once the gap is at most ``epsilon``.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError("epsilon must lie in (0, 1)")
    cfg = cfg or SolverConfig()
    x_bar = _check_warm_start(prog, x_bar)
    cone, e, ce, c = prog.cone, prog.e, prog.ce, prog.c

    def gap(obj):
        return math.nan if z_star is None else (obj - z_star) / (ce - z_star)

    lam = cone.lambda_min(x_bar)
    x = radial_project(cone, x_bar, lam)
    outer = 1
    rhs = prog.slice_rhs(prog.objective(x))
    report = SolveReport("2", optimal_value=z_star, tolerances={
        "epsilon": epsilon, "zero_gradient_tol": cfg.zero_gradient_tol})
    start = time.perf_counter_ns()
    rec = IterRecord(0, lam, prog.objective(x), gap(prog.objective(x)), outer_idx=outer,
                     x=x.copy() if cfg.keep_points else None,
                     point=x.copy() if cfg.keep_points else None)
    report.add(rec, x)
    if rec.gap_rel <= epsilon:
        report.termination = "target_reached"
        return report
    for k in range(cfg.max_iterations):
        pg = prog.project_supgradient(cone.supgradient(x))
        nrm2 = float(pg @ pg)
        rec.step_norm = math.sqrt(nrm2)
        if rec.step_norm <= cfg.zero_gradient_tol:
            # x maximizes lambda_min on its slice, so pi(x) is optimal
            report.termination = "optimal"
            return report
        x_trial = x + (epsilon / (2.0 * nrm2)) * pg
        lam = cone.lambda_min(x_trial)
        pi = radial_project(cone, x_trial, lam)
        if c @ (e - pi) >= FOUR_THIRDS * (c @ (e - x_trial)):
            x = pi
            outer += 1
            rhs = prog.slice_rhs(prog.objective(pi))
        else:
            x = x_trial
        if (k + 1) % cfg.reorthogonalize_every == 0:
            x = prog.projector.restore(x, rhs)
        obj = prog.objective(pi)
        rec = IterRecord(k + 1, lam, obj, gap(obj), outer_idx=outer,
                         wall_ns=time.perf_counter_ns() - start,
                         x=x.copy() if cfg.keep_points else None,
                         point=pi if cfg.keep_points else None)
        report.add(rec, pi)
        if rec.gap_rel <= epsilon:
            report.termination = "target_reached"
            return report
    report.termination = "max_iterations"
    return report


def _check_bound_args(M, Dist, epsilon, gap0):
    if not (M > 0 and Dist > 0):
        raise DomainError("M and Dist must be positive")
    if not 0.0 < epsilon < gap0 < 1.0:
        raise DomainError(f"need 0 < epsilon < gap0 < 1, got epsilon={epsilon}, gap0={gap0}")


def iteration_bound_alg1(M: float, Dist: float, epsilon: float, gap0: float) -> float:
    """Iteration count after which Algorithm 1 is guaranteed an ``epsilon``-gap.

    ``gap0`` is the relative gap of the starting boundary point.
    """
    _check_bound_args(M, Dist, epsilon, gap0)
    q = (1.0 - epsilon) / epsilon
    return (2.0 * M * Dist) ** 2 * (
        FOUR_THIRDS * q ** 2 + 4.0 * q
        + math.log2(gap0 / epsilon) + math.log2((1.0 - epsilon) / (1.0 - gap0)) + 1.0)


def iteration_bound_alg2(M: float, Dist: float, epsilon: float, gap0: float) -> float:
    """Iteration count after which Algorithm 2 is guaranteed an ``epsilon``-gap."""
    _check_bound_args(M, Dist, epsilon, gap0)
    log43 = math.log(1.0 / (1.0 - gap0)) / math.log(FOUR_THIRDS)
    return 8.0 * (M * Dist) ** 2 * (1.0 / epsilon ** 2 + log43 / epsilon)


class LinearRateFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float

    @property
    def c1(self):
        """Iterations per unit of ``log(1/eps)``."""
        return -1.0 / self.slope

    @property
    def c2(self):
        return -self.intercept / self.slope


def fit_linear_rate(report, min_points=10) -> LinearRateFit:
    """Least-squares fit of ``log(best gap_k)`` against ``k``.

    Accepts a :class:`SolveReport` or a plain sequence of gaps. Fitting
    stops at the first non-positive gap.
    """
    if isinstance(report, SolveReport):
        gaps = report.best_gaps()
    else:
        gaps = np.fmin.accumulate(np.asarray(report, dtype=float))
    usable = []
    for g in gaps:
        if not g > 0.0:
            break
        usable.append(g)
    if len(usable) < min_points:
        raise InsufficientTrace(f"need {min_points} positive gaps, have {len(usable)}")
    y = np.log(np.array(usable))
    k = np.arange(y.size, dtype=float)
    slope, intercept = np.polyfit(k, y, 1)
    resid = y - (slope * k + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return LinearRateFit(float(slope), float(intercept), r2)
