"""General convex problems ``min f(x)  s.t.  x in S, Ax = b`` via oracles.

Everything here works along rays from the anchor ``(e_bar, f_hat)``: the
line search finds where ``(e_bar, f_hat) + a*((x, t) - (e_bar, f_hat))``
leaves ``S x R`` or the epigraph of ``f``. Algorithms A and B are
supgradient methods in disguise; :func:`lift_to_conic` exposes the conic
program they are secretly solving.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cones import ConeOracle
from .conic import FOUR_THIRDS, ConicProgram
from .errors import (DomainError, InvalidProblem, InvalidQuery, OracleGap, StalledStep,
                     UnboundedRay, ZeroProjectedGradient)
from .linalg import LinearMap, as_vector, build_projector
from .oracles import ConvexFunction, ConvexSet, bisect_exit
from .report import IterRecord, SolveReport, SolverConfig

EXPANSION_CAP = 1e12
BISECT_RTOL = 1e-10
MAX_HALVINGS = 200
# alpha1 and alpha2 closer than this (relative) count as a corner hit
TIE_RTOL = 1e-9
PROBE_REL = 1e-6

HIT_SET = "set"
HIT_EPIGRAPH = "epigraph"
HIT_BOTH = "both"


class ConvexProgram:
    """Oracle description of ``min f(x)`` over ``{x in S : Ax = b}``.

    ``e_bar`` must be feasible and interior to ``S`` and to the domain of
    ``f``; ``f_hat`` is any level above ``f(e_bar)``. Interiority is
    checked with finite probes only.
    """

    def __init__(self, f: ConvexFunction, S: ConvexSet, e_bar, f_hat, A=None, b=None,
                 name="convex", f_star=None, x_star=None, feas_tol=1e-10):
        self.f = f
        self.S = S
        self.e_bar = as_vector(e_bar)
        n = self.e_bar.size
        self.e_bar.setflags(write=False)
        if A is None:
            A = np.zeros((0, n))
        self.A = A if isinstance(A, LinearMap) else LinearMap(A, n=n)
        self.b = as_vector(np.zeros(self.A.m) if b is None else b, self.A.m)
        self.name = name
        self.f_star = None if f_star is None else float(f_star)
        self.x_star = None if x_star is None else as_vector(x_star, n)

        resid = self.A @ self.e_bar - self.b
        if resid.size and np.max(np.abs(resid)) > feas_tol * max(1.0, np.max(np.abs(self.b))):
            raise InvalidProblem("A e_bar != b")
        self.f_bar = float(f(self.e_bar))
        if not math.isfinite(self.f_bar):
            raise InvalidProblem("f(e_bar) is not finite")
        self.f_hat = float(f_hat)
        if not self.f_hat > self.f_bar:
            raise InvalidProblem(f"need f_hat > f(e_bar) = {self.f_bar:.6g}, got {self.f_hat:.6g}")
        delta = PROBE_REL * max(1.0, float(np.max(np.abs(self.e_bar))))
        for u in np.eye(n):
            for probe in (self.e_bar + delta * u, self.e_bar - delta * u):
                if not S.contains(probe, tol=0.0) or not math.isfinite(f(probe)):
                    raise InvalidProblem("e_bar is not interior to S and dom(f) (probe failed)")
        self.projector = build_projector(self.A)

    @property
    def n(self):
        return self.e_bar.size

    def project(self, v):
        return self.projector.apply(v)

    def residual(self, x) -> float:
        if self.A.m == 0:
            return 0.0
        return float(np.linalg.norm(self.A @ x - self.b))

    def relative_gap(self, value) -> float:
        if self.f_star is None:
            return math.nan
        return (value - self.f_star) / (self.f_hat - self.f_star)

    def __repr__(self):
        return f"ConvexProgram(name={self.name!r}, n={self.n}, m={self.A.m})"


@dataclass
class LineSearchResult:
    alpha: float
    alpha1: float
    alpha2: float
    hit: str
    x: np.ndarray
    t: float

    @property
    def point(self):
        return self.x, self.t


def _epigraph_exit(prog: ConvexProgram, x, t) -> float:
    """``sup{a : f(x(a)) <= t(a)}``; no requirement that ``t < f_hat``."""
    e_bar, f_hat, f = prog.e_bar, prog.f_hat, prog.f
    d = x - e_bar
    if not np.any(d):
        # f is constant along the ray, so the root is linear in a
        return (f_hat - prog.f_bar) / (f_hat - t) if t < f_hat else math.inf
    exact = f.epigraph_exit(e_bar, f_hat, x, t)
    if exact is not None:
        return exact

    def inside(a):
        return f(e_bar + a * d) <= f_hat + a * (t - f_hat)

    return bisect_exit(inside, cap=EXPANSION_CAP, rtol=BISECT_RTOL, max_halvings=MAX_HALVINGS)


def ray_search(prog: ConvexProgram, x, t) -> LineSearchResult:
    """Exit point of the ray from ``(e_bar, f_hat)`` through ``(x, t)``.

    Unlike :func:`line_search` this accepts any ``t`` and returns an
    infinite ``alpha`` when the ray never leaves.
    """
    x = np.asarray(x, dtype=float)
    t = float(t)
    a1 = prog.S.ray_exit(prog.e_bar, x - prog.e_bar)
    a2 = _epigraph_exit(prog, x, t)
    alpha = min(a1, a2)
    if not math.isfinite(alpha):
        return LineSearchResult(math.inf, a1, a2, HIT_BOTH, x.copy(), t)
    if abs(a1 - a2) <= TIE_RTOL * alpha:
        hit = HIT_BOTH
    else:
        hit = HIT_SET if a1 < a2 else HIT_EPIGRAPH
    if 1.0 <= alpha <= 1.0 + BISECT_RTOL:
        # query already on the boundary (to tolerance) and feasible: keep it exactly
        return LineSearchResult(1.0, a1, a2, hit, x.copy(), t)
    xp = prog.e_bar + alpha * (x - prog.e_bar)
    tp = prog.f_hat + alpha * (t - prog.f_hat)
    return LineSearchResult(alpha, a1, a2, hit, xp, tp)


def line_search(prog: ConvexProgram, x, t) -> LineSearchResult:
    """``alpha(x, t) = min(alpha1, alpha2)`` and the boundary point ``pi'(x, t)``.

    ``alpha1`` is where the ray leaves ``S``, ``alpha2`` where it leaves the
    epigraph. Closed-form exits are used when the oracles offer them;
    otherwise doubling from 1 brackets the root and bisection narrows it
    to relative width ``BISECT_RTOL``, keeping the feasible endpoint.
    """
    x = as_vector(x, prog.n)
    if not t < prog.f_hat:
        raise InvalidQuery(f"need t < f_hat = {prog.f_hat:.6g}, got {t:.6g}")
    res = ray_search(prog, x, t)
    if not math.isfinite(res.alpha):
        raise UnboundedRay("ray leaves neither S nor epi(f) before the expansion cap")
    return res


def _g_parts(prog: ConvexProgram, res: LineSearchResult):
    """``(g', s_part, t_part)`` describing the chosen element of G.

    The lifted supgradient of ``lambda_min`` at the matching conic point is
    ``(-g', s_part, t_part)``.
    """
    xp, tp = res.x, res.t
    to_anchor = prog.e_bar - xp
    if res.hit == HIT_SET:
        v = np.asarray(prog.S.normal(xp), dtype=float)
        den = float(v @ to_anchor)
        g = -v / den
        return g, -float(xp @ v) / den, 0.0
    f = prog.f
    if f.in_domain_interior(xp):
        u = np.asarray(f.subgradient(xp), dtype=float)
        fx = f(xp)
        scale = 1.0 / (prog.f_hat - fx - float(u @ to_anchor))
        g = scale * u
        return g, float(xp @ g) - fx * scale, scale
    v, delta = f.epigraph_normal(xp, tp)
    v = np.asarray(v, dtype=float)
    den = float(v @ to_anchor) + (prog.f_hat - tp) * delta
    if den == 0.0:
        raise OracleGap("epigraph normal is orthogonal to the anchor direction")
    g = -v / den
    return g, (-float(xp @ v) - tp * delta) / den, delta / den


def select_g(prog: ConvexProgram, res: LineSearchResult) -> np.ndarray:
    """One element ``g'`` of ``G(x', t')``.

    Set hits use the set's outward normal; epigraph hits use a subgradient
    of ``f`` (or an epigraph normal when ``x'`` is on the domain boundary).
    Corner hits fall back to the epigraph element.
    """
    return _g_parts(prog, res)[0]


def lifted_supgradient(prog: ConvexProgram, res: LineSearchResult) -> np.ndarray:
    """Supgradient of the lifted ``lambda_min`` matching :func:`select_g`."""
    g, s_part, t_part = _g_parts(prog, res)
    return np.concatenate([-g, [s_part, t_part]])


class LiftedCone(ConeOracle):
    """Closure of ``{(x, s, t) : s > 0, x/s in S, f(x/s) <= t/s}``.

    The distinguished direction is ``(e_bar, 1, f_hat)``. ``lambda_min`` is
    computed from the line search: after shifting ``s`` to 1 along ``e``,
    ``lambda_min = 1 - 1/alpha``.
    """

    def __init__(self, prog: ConvexProgram):
        self.prog = prog
        self.direction = np.concatenate([prog.e_bar, [1.0, prog.f_hat]])
        self.direction.setflags(write=False)

    def _unit_slice(self, y):
        y = np.asarray(y, dtype=float)
        n = self.prog.n
        tau = y[n] - 1.0
        x = y[:n] - tau * self.prog.e_bar
        t = y[n + 1] - tau * self.prog.f_hat
        return tau, x, t

    def _search(self, y):
        tau, x, t = self._unit_slice(y)
        if not np.any(x - self.prog.e_bar) and not t < self.prog.f_hat:
            return tau, None
        res = ray_search(self.prog, x, t)
        if not math.isfinite(res.alpha):
            raise UnboundedRay("lifted ray never leaves the cone within the expansion cap")
        return tau, res

    def lambda_min(self, y) -> float:
        tau, res = self._search(y)
        if res is None:
            # (e_bar, 1, t) with t >= f_hat: y - lam*e stays in the cone for all lam < 1
            return 1.0 + tau
        return (res.alpha - 1.0) / res.alpha + tau

    def boundary_point(self, y, lam) -> np.ndarray:
        tau, res = self._search(y)
        if tau != 0.0 or res is None:
            return super().boundary_point(y, lam)
        # on the slice s = 1 the radial projection is the line-search point
        return lifted_point(self.prog, res.x, res.t)

    def supgradient(self, y) -> np.ndarray:
        _, res = self._search(y)
        if res is None:
            raise UnboundedRay("no boundary in the direction of y")
        return lifted_supgradient(self.prog, res)

    def contains(self, y) -> bool:
        y = np.asarray(y, dtype=float)
        n = self.prog.n
        s = float(y[n])
        if s > 0.0:
            x = y[:n] / s
            return bool(self.prog.S.contains(x, tol=0.0) and self.prog.f(x) <= y[n + 1] / s)
        return self.lambda_min(y) >= 0.0


def lift_to_conic(prog: ConvexProgram) -> ConicProgram:
    """``min t  s.t.  Ax = b, s = 1, (x, s, t) in LiftedCone``."""
    n, m = prog.n, prog.A.m
    A = np.zeros((m + 1, n + 2))
    A[:m, :n] = prog.A.matrix
    A[m, n] = 1.0
    b = np.append(prog.b, 1.0)
    c = np.zeros(n + 2)
    c[-1] = 1.0
    return ConicProgram(c, A, b, LiftedCone(prog), name=f"lifted:{prog.name}")


def lifted_point(prog: ConvexProgram, x, t) -> np.ndarray:
    return np.concatenate([np.asarray(x, dtype=float), [1.0, float(t)]])


def _record(prog, k, lam, res, x, t, outer, start, cfg):
    fx = prog.f(res.x)
    return IterRecord(k, lam, fx, prog.relative_gap(fx), outer_idx=outer,
                      wall_ns=time.perf_counter_ns() - start,
                      x=x.copy() if cfg.keep_points else None,
                      point=res.x.copy() if cfg.keep_points else None,
                      t=t, t_point=res.t, alpha=res.alpha)


def _anchor_result(prog: ConvexProgram, t) -> LineSearchResult:
    return line_search(prog, prog.e_bar, t)


def algorithm_a(prog: ConvexProgram, epsilon: float, cfg: Optional[SolverConfig] = None,
                stop_at_target: bool = True) -> SolveReport:
    """Algorithm A: needs only ``epsilon``, not the optimal value.

    Each step moves ``x`` against the projected ``g'`` by
    ``epsilon / (2 ||P g'||)``. If the new point's ray parameter
    ``alpha(x_trial, t)`` is at least 4/3, the iterate jumps to the
    boundary point and the level ``t`` drops; otherwise ``t`` is kept.

    Stops on a relative gap ``<= epsilon`` when ``prog.f_star`` is known
    and ``stop_at_target`` is set.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError("epsilon must lie in (0, 1)")
    cfg = cfg or SolverConfig()
    x = prog.e_bar.copy()
    t = prog.f_bar
    res = _anchor_result(prog, t)
    outer = 1
    report = SolveReport("A", optimal_value=prog.f_star, tolerances={
        "epsilon": epsilon, "bisect_rtol": BISECT_RTOL, "tie_rtol": TIE_RTOL,
        "zero_gradient_tol": cfg.zero_gradient_tol})
    start = time.perf_counter_ns()
    rec = _record(prog, 0, (res.alpha - 1.0) / res.alpha, res, x, t, outer, start, cfg)
    report.add(rec, res.x)
    if stop_at_target and rec.gap_rel <= epsilon:
        report.termination = "target_reached"
        return report
    for k in range(cfg.max_iterations):
        pg = prog.project(select_g(prog, res))
        nrm2 = float(pg @ pg)
        rec.step_norm = math.sqrt(nrm2)
        if rec.step_norm <= cfg.zero_gradient_tol:
            report.termination = "optimal"
            return report
        x_trial = x - (epsilon / (2.0 * nrm2)) * pg
        res = line_search(prog, x_trial, t)
        if res.alpha >= FOUR_THIRDS:
            x, t = res.x.copy(), res.t
            outer += 1
        else:
            x = x_trial
        assert t < prog.f_hat
        if (k + 1) % cfg.reorthogonalize_every == 0:
            x = prog.projector.restore(x, prog.b)
        rec = _record(prog, k + 1, (res.alpha - 1.0) / res.alpha, res, x, t, outer, start, cfg)
        report.add(rec, res.x)
        if stop_at_target and rec.gap_rel <= epsilon:
            report.termination = "target_reached"
            return report
    report.termination = "max_iterations"
    return report


def algorithm_b(prog: ConvexProgram, f_star: float, cfg: Optional[SolverConfig] = None) -> SolveReport:
    """Algorithm B: Polyak-type steps using the known optimal value ``f_star``.

    The level stays at ``f_star``; ``(alpha_k - 1)/alpha_k`` is the lifted
    ``lambda_min`` at ``(x_k, 1, f_star)`` and reaches 0 at optimality.
    """
    cfg = cfg or SolverConfig()
    f_star = float(f_star)
    if not f_star < prog.f_hat:
        raise InvalidProblem("f_star must be below f_hat")

    def gap(v):
        return (v - f_star) / (prog.f_hat - f_star)

    x = prog.e_bar.copy()
    report = SolveReport("B", optimal_value=f_star, tolerances={
        "optimality_tol": cfg.optimality_tol, "bisect_rtol": BISECT_RTOL,
        "tie_rtol": TIE_RTOL, "zero_gradient_tol": cfg.zero_gradient_tol})
    start = time.perf_counter_ns()
    for k in range(cfg.max_iterations + 1):
        if k:
            x = x + (lam / nrm2) * pg
            if k % cfg.reorthogonalize_every == 0:
                x = prog.projector.restore(x, prog.b)
        res = line_search(prog, x, f_star)
        alpha = res.alpha
        lam = (alpha - 1.0) / alpha
        fx = prog.f(res.x)
        rec = IterRecord(k, lam, fx, gap(fx), outer_idx=0,
                         wall_ns=time.perf_counter_ns() - start,
                         x=x.copy() if cfg.keep_points else None,
                         point=res.x.copy() if cfg.keep_points else None,
                         t=f_star, t_point=res.t, alpha=alpha)
        report.add(rec, res.x)
        if alpha == 1.0 and rec.gap_rel > cfg.optimality_tol:
            report.termination = "stalled"
            raise StalledStep(f"alpha = 1 at k={k} but gap {rec.gap_rel:.3e} > tolerance")
        if lam >= -cfg.optimality_tol:
            report.termination = "optimal"
            break
        if k == cfg.max_iterations:
            report.termination = "max_iterations"
            break
        pg = prog.project(select_g(prog, res))
        nrm2 = float(pg @ pg)
        rec.step_norm = math.sqrt(nrm2)
        if rec.step_norm <= cfg.zero_gradient_tol:
            report.termination = "zero_projected_gradient"
            raise ZeroProjectedGradient(
                f"projected g' vanished at k={k}; f_star is probably below the optimum", report)
    return report


def _check_ab_bound_args(D, r, epsilon):
    if not (D > 0 and r > 0):
        raise DomainError("D and r must be positive")
    if not 0.0 < epsilon < 1.0:
        raise DomainError("epsilon must lie in (0, 1)")


def iteration_bound_a(D: float, r: float, epsilon: float) -> float:
    """Steps after which Algorithm A has an ``epsilon`` relative gap; ``D/r`` is the condition ratio."""
    _check_ab_bound_args(D, r, epsilon)
    ratio = D / r
    return 8.0 * ratio ** 2 * (1.0 / epsilon ** 2
                               + math.log(1.0 + ratio) / math.log(FOUR_THIRDS) / epsilon)


def iteration_bound_b(D: float, r: float, epsilon: float) -> float:
    """Steps after which Algorithm B has an ``epsilon`` relative gap."""
    _check_ab_bound_args(D, r, epsilon)
    ratio = D / r
    q = (1.0 - epsilon) / epsilon
    return 4.0 * ratio ** 2 * (FOUR_THIRDS * q ** 2 + 4.0 * q + math.log2(q)
                               + math.log2(ratio) + 1.0)
