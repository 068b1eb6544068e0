"""Invariant suites shared by ``radsub verify`` and the test-suite.

Each check returns a :class:`CheckResult`; nothing raises on a failed
check, so a suite always reports every line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import numpy as np
import scipy.linalg as sla

from .cones import ConeOracle, radial_project
from .conic import algorithm1, algorithm2, iteration_bound_alg1, iteration_bound_alg2
from .convex import (LiftedCone, algorithm_a, algorithm_b, iteration_bound_a, iteration_bound_b,
                     lift_to_conic, lifted_point, line_search)
from .errors import SolverError, ZeroProjectedGradient
from .problem_io import Problem
from .report import SolverConfig
from .verify import (DEFAULT_SEED, estimate_geometry, grid_alpha, grid_max_lambda, hull_distance,
                     level_vertices, maximizer_vertices, slice_basis, slice_point)

BOUND_SLACK = 1.05
IDENTITY_TOL = 1e-9
EQUIVALENCE_TOL = 1e-9
GRID_ALPHA_RTOL = 1e-6


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    value: float = math.nan

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _guard(name, fn) -> CheckResult:
    try:
        return fn()
    except SolverError as exc:
        return CheckResult(name, False, f"{type(exc).__name__}: {exc}")


def membership_lambda(cone: ConeOracle, y, iters=200) -> float:
    """``sup{lam < 1 : y - lam*e in K}`` by bisection on membership alone.

    Meant for points with ``lambda_min(y) < 1``, such as lifted points with
    ``s = 1``.
    """
    e = cone.direction
    y = np.asarray(y, dtype=float)
    lo = -1.0
    while not cone.contains(y - lo * e):
        lo *= 2.0
        if lo < -1e12:
            raise SolverError("membership bisection found no interior shift")
    hi = 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if cone.contains(y - mid * e):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, abs(lo)):
            break
    return lo


# --- conic checks ------------------------------------------------------------------------

def _run_alg1(prob: Problem, max_iterations=2000):
    cfg = SolverConfig(max_iterations=max_iterations)
    try:
        return algorithm1(prob.conic, prob.z_star, prob.x_bar, cfg)
    except ZeroProjectedGradient as exc:
        return exc.report


def check_gap_identity(prob: Problem) -> CheckResult:
    """``(c.pi_k - z*)/(c.e - z*) = -lam_k/(1 - lam_k)`` along Algorithm 1."""
    rep = _run_alg1(prob)
    err = max(abs(r.gap_rel + r.lambda_min / (1.0 - r.lambda_min)) for r in rep.records)
    return CheckResult("alg1-gap-identity", err <= IDENTITY_TOL,
                       f"max error {err:.2e} over {len(rep.records)} iterates (tol {IDENTITY_TOL:g})", err)


def check_affine_invariance(prob: Problem) -> CheckResult:
    rep = _run_alg1(prob)
    conic = prob.conic
    scale = max(1.0, abs(prob.z_star))
    res = max(conic.residual(r.x) for r in rep.records)
    obj = max(abs(conic.objective(r.x) - prob.z_star) for r in rep.records) / scale
    ok = res <= 1e-8 and obj <= 1e-8
    return CheckResult("alg1-affine-invariance", ok,
                       f"max ||Ax-b|| {res:.2e}, max |c.x-z*|/scale {obj:.2e}", max(res, obj))


def check_optimal_value_characterization(prob: Problem, count=9, tol=1e-4) -> CheckResult:
    """Grid maximum of ``lambda_min`` on ``Affine_z`` equals ``(z - z*)/(c.e - z*)``."""
    conic = prob.conic
    dim = slice_basis(conic).shape[1]
    if dim > 3:
        return CheckResult("optimal-value-characterization", True,
                           f"skipped: slice dimension {dim} too large for the grid oracle")
    span = conic.ce - prob.z_star
    worst = 0.0
    for frac in np.linspace(0.1, 0.9, count):
        z = prob.z_star + frac * span
        val, _ = grid_max_lambda(conic, z, refinements=10, budget=10000)
        worst = max(worst, abs(val - frac))
    return CheckResult("optimal-value-characterization", worst <= tol,
                       f"max |grid max - (z-z*)/(c.e-z*)| = {worst:.2e} over {count} levels", worst)


def _slice_samples(conic, z, rng, count, scale):
    N = slice_basis(conic)
    base = slice_point(conic, z)
    return [base + N @ (rng.normal(size=N.shape[1]) * scale) for _ in range(count)]


def check_accuracy_equivalence(prob: Problem, rng, count=300) -> CheckResult:
    """Both sides of the accuracy characterization agree as booleans."""
    conic = prob.conic
    ce, zs = conic.ce, prob.z_star
    mismatches = tested = 0
    for _ in range(count):
        z = zs + rng.uniform(0.05, 0.95) * (ce - zs)
        x = _slice_samples(conic, z, rng, 1, rng.uniform(0.1, 2.0) * np.linalg.norm(conic.e))[0]
        lam = conic.cone.lambda_min(x)
        if lam >= 0.99:
            continue
        eps = rng.uniform(0.01, 0.99)
        lhs_val = (conic.objective(radial_project(conic.cone, x, lam)) - zs) / (ce - zs)
        lam_star = (z - zs) / (ce - zs)
        rhs_val = lam_star - lam - eps / (1 - eps) * (ce - z) / (ce - zs)
        if abs(lhs_val - eps) < 1e-10 or abs(rhs_val) < 1e-10:
            continue
        tested += 1
        mismatches += (lhs_val <= eps) != (rhs_val <= 0)
    return CheckResult("accuracy-equivalence", mismatches == 0,
                       f"{mismatches} disagreements in {tested} samples", mismatches)


def check_cone_properties(cone: ConeOracle, points, rng, tol=IDENTITY_TOL) -> List[CheckResult]:
    e = cone.direction
    shift = grad = sup = 0.0
    for x in points:
        lam = cone.lambda_min(x)
        t = rng.normal()
        shift = max(shift, abs(cone.lambda_min(x + t * e) - lam - t))
        g = cone.supgradient(x)
        grad = max(grad, abs(float(e @ g) - 1.0))
        y = points[rng.integers(len(points))]
        sup = max(sup, cone.lambda_min(y) - lam - float(g @ (y - x)))
    return [
        CheckResult("shift-identity", shift <= tol, f"max error {shift:.2e}", shift),
        CheckResult("supgradient-normalization", grad <= tol, f"max |<e,g> - 1| {grad:.2e}", grad),
        CheckResult("supgradient-inequality", sup <= tol, f"max violation {max(sup, 0.0):.2e}", sup),
    ]


def check_radial_boundary(conic, points) -> CheckResult:
    worst, used = 0.0, 0
    for x in points:
        lam = conic.cone.lambda_min(x)
        if lam >= 0.99:
            continue
        used += 1
        worst = max(worst, abs(conic.cone.lambda_min(radial_project(conic.cone, x, lam))))
    return CheckResult("radial-projection-boundary", worst <= 1e-8,
                       f"max |lambda_min(pi(x))| {worst:.2e} over {used} points", worst)


def check_distance_scaling(prob: Problem, rng, count=30) -> CheckResult:
    """``dist_{z*}(x) = (1 - lambda_min(x)) dist_{c.pi}(pi)`` for ``x`` in ``Affine_{z*}``."""
    conic = prob.conic
    opt = level_vertices(conic, prob.z_star)
    worst = 0.0
    for x in _slice_samples(conic, prob.z_star, rng, count, np.linalg.norm(conic.e)):
        lam = conic.cone.lambda_min(x)
        pi = radial_project(conic.cone, x, lam)
        left = hull_distance(maximizer_vertices(conic, prob.z_star, prob.z_star, opt), x)
        right = (1 - lam) * hull_distance(
            maximizer_vertices(conic, conic.objective(pi), prob.z_star, opt), pi)
        worst = max(worst, abs(left - right))
    return CheckResult("distance-scaling", worst <= 1e-6, f"max error {worst:.2e}", worst)


# --- lifted-cone checks -------------------------------------------------------------------

def _convex_queries(prog, rng, count):
    N = sla.null_space(prog.A.matrix) if prog.A.m else np.eye(prog.n)
    reach = 2.0 * max(1.0, float(np.linalg.norm(prog.e_bar)))
    low = prog.f_star if prog.f_star is not None else prog.f_bar - 1.0
    out = []
    for _ in range(count):
        x = prog.e_bar + N @ (rng.normal(size=N.shape[1]) * reach * rng.uniform(0.05, 1.0))
        t = prog.f_hat - rng.uniform(0.02, 1.5) * (prog.f_hat - low)
        out.append((x, t))
    return out


def check_line_search_vs_grid(prog, rng, count=100) -> CheckResult:
    worst = 0.0
    for x, t in _convex_queries(prog, rng, count):
        a = line_search(prog, x, t).alpha
        worst = max(worst, abs(a - grid_alpha(prog, x, t)) / a)
    return CheckResult("line-search-vs-grid", worst <= GRID_ALPHA_RTOL,
                       f"max relative difference {worst:.2e} over {count} queries", worst)


def lifted_identity_checks(prog, rng, count=40) -> List[CheckResult]:
    cone = LiftedCone(prog)
    queries = _convex_queries(prog, rng, count)
    pts = [lifted_point(prog, x, t) for x, t in queries]
    results = check_cone_properties(cone, pts, rng)
    results = [CheckResult("lifted-" + r.name, r.passed, r.detail, r.value) for r in results]

    worst_pi = worst_mem = 0.0
    for (x, t), y in zip(queries, pts):
        res = line_search(prog, x, t)
        lam = cone.lambda_min(y)
        # the generic formula e + (y - e)/(1 - lam), not the cone's shortcut
        pi = ConeOracle.boundary_point(cone, y, lam)
        worst_pi = max(worst_pi, float(np.max(np.abs(np.delete(pi, prog.n) - np.append(res.x, res.t)))))
        worst_mem = max(worst_mem, abs(lam - membership_lambda(cone, y)))
    results.append(CheckResult("pi-prime-consistency", worst_pi <= IDENTITY_TOL,
                               f"max |pi(x,1,t) - pi'(x,t)| {worst_pi:.2e}", worst_pi))
    results.append(CheckResult("lifted-lambda-vs-membership", worst_mem <= 1e-8,
                               f"max |lambda_min - membership bisection| {worst_mem:.2e}", worst_mem))
    if prog.f_star is not None:
        rep = algorithm_b(prog, prog.f_star, SolverConfig(max_iterations=200))
        worst = max(abs(r.lambda_min - membership_lambda(cone, lifted_point(prog, r.x, prog.f_star)))
                    for r in rep.records)
        results.append(CheckResult("alg-b-alpha-identity", worst <= IDENTITY_TOL,
                                   f"max |(a-1)/a - lambda_min(x,1,f*)| {worst:.2e} "
                                   f"over {len(rep.records)} iterates", worst))
    return results


# --- suites -------------------------------------------------------------------------------

def identity_suite(prob: Problem, seed=DEFAULT_SEED) -> List[CheckResult]:
    rng = np.random.default_rng(seed)
    out = []
    if prob.kind == "lp":
        conic = prob.conic
        out.append(_guard("alg1-gap-identity", lambda: check_gap_identity(prob)))
        out.append(_guard("alg1-affine-invariance", lambda: check_affine_invariance(prob)))
        out.append(_guard("optimal-value-characterization",
                          lambda: check_optimal_value_characterization(prob)))
        out.append(_guard("accuracy-equivalence", lambda: check_accuracy_equivalence(prob, rng)))
        pts = [conic.e + rng.normal(size=conic.n) * 2.0 for _ in range(500)]
        out.extend(check_cone_properties(conic.cone, pts, rng))
        out.append(check_radial_boundary(conic, _slice_samples(conic, conic.ce - 0.5 * (conic.ce - prob.z_star),
                                                               rng, 200, 2.0)))
        out.append(_guard("distance-scaling", lambda: check_distance_scaling(prob, rng)))
    else:
        out.extend(lifted_identity_checks(prob.convex, rng))
        out.append(_guard("line-search-vs-grid",
                          lambda: check_line_search_vs_grid(prob.convex, rng, count=20)))
    return out


def _first_within(rep, eps):
    k = rep.first_index_within(eps)
    return math.inf if k is None else k


def _first_within_budget(run, eps, bound, probe=2000):
    """First ``k`` with gap <= eps, trying a short run before the full budget.

    The solvers are deterministic, so a prefix of the full run is the short run.
    """
    full = max(1, int(math.ceil(bound)) + 1)
    for cap in sorted({min(probe, full), full}):
        k = _first_within(run(SolverConfig(max_iterations=cap, keep_points=False)), eps)
        if k <= bound:
            return k
    return k


def conic_bound_checks(prob: Problem, epsilons=(0.5, 0.25, 0.1), seed=DEFAULT_SEED,
                       algorithms=("2", "1")):
    conic, zs = prob.conic, prob.z_star
    out = []
    for eps in epsilons if "2" in algorithms else ():
        name = f"alg2-bound eps={eps:g}"
        try:
            probe = algorithm2(conic, eps, prob.x_bar, SolverConfig(max_iterations=1), z_star=zs)
            gap0 = probe.records[0].gap_rel
            if gap0 <= eps:
                out.append(CheckResult(name, True, f"gap0 {gap0:.3g} <= eps at k=0", 0))
                continue
            geo = estimate_geometry(conic, seed=seed, z=probe.records[0].objective, z_star=zs)
            bound = iteration_bound_alg2(geo.M_est * BOUND_SLACK, geo.Dist_est * BOUND_SLACK, eps, gap0)
            rep = algorithm2(conic, eps, prob.x_bar,
                             SolverConfig(max_iterations=int(math.ceil(bound)) + 1, keep_points=False),
                             z_star=zs)
            k = _first_within(rep, eps)
            out.append(CheckResult(name, k <= bound,
                                   f"reached gap <= eps at k={k}, bound {bound:.1f} "
                                   f"(M {geo.M_est:.4g}, Dist {geo.Dist_est:.4g}, gap0 {gap0:.3g})", k))
        except SolverError as exc:
            out.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
    for eps in epsilons if "1" in algorithms else ():
        name = f"alg1-bound eps={eps:g}"
        try:
            rep = _run_alg1(prob, max_iterations=20000)
            gap0 = rep.records[0].gap_rel
            if gap0 <= eps:
                out.append(CheckResult(name, True, f"gap0 {gap0:.3g} <= eps at k=0", 0))
                continue
            geo = estimate_geometry(conic, seed=seed, z=rep.records[0].objective, z_star=zs)
            bound = iteration_bound_alg1(geo.M_est * BOUND_SLACK, geo.Dist_est * BOUND_SLACK, eps, gap0)
            k = _first_within(rep, eps)
            out.append(CheckResult(name, k <= bound,
                                   f"reached gap <= eps at k={k}, bound {bound:.1f}", k))
        except SolverError as exc:
            out.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
    return out


def convex_bound_checks(prog, epsilons=(0.5, 0.1), seed=DEFAULT_SEED, samples=400):
    out = []
    if prog.f_star is None:
        return [CheckResult("convex-bounds", True, "skipped: optimal value unknown")]
    geo = estimate_geometry(prog, samples=samples, seed=seed)
    D, r = geo.D_est * BOUND_SLACK, geo.r_est / BOUND_SLACK
    for eps in epsilons:
        for label, bound_fn, run in (
                ("A", iteration_bound_a, lambda cfg: algorithm_a(prog, eps, cfg)),
                ("B", iteration_bound_b, lambda cfg: algorithm_b(prog, prog.f_star, cfg))):
            name = f"alg{label}-bound eps={eps:g}"
            try:
                bound = bound_fn(D, r, eps)
                k = _first_within_budget(run, eps, bound)
                out.append(CheckResult(name, k <= bound,
                                       f"reached gap <= eps at k={k}, bound {bound:.1f} "
                                       f"(D {geo.D_est:.4g}, r {geo.r_est:.4g})", k))
            except SolverError as exc:
                out.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
    return out


def bound_suite(prob: Problem, seed=DEFAULT_SEED) -> List[CheckResult]:
    if prob.kind == "lp":
        return conic_bound_checks(prob, seed=seed)
    return convex_bound_checks(prob.convex, seed=seed)


def trace_discrepancy(convex_rep, conic_rep, n):
    """Largest coordinate difference between matched iterates and boundary points."""
    worst = 0.0
    for a, b in zip(convex_rep.records, conic_rep.records):
        worst = max(worst,
                    float(np.max(np.abs(np.append(a.x, a.t) - np.delete(b.x, n)))),
                    float(np.max(np.abs(np.append(a.point, a.t_point) - np.delete(b.point, n)))))
    return worst


def equivalence_checks(prog, steps=50, epsilons=(0.5, 0.25, 0.1)) -> List[CheckResult]:
    lifted = lift_to_conic(prog)
    x_bar = lifted_point(prog, prog.e_bar, prog.f_bar)
    cfg = SolverConfig(max_iterations=steps)
    out = []
    for eps in epsilons:
        name = f"A-vs-2 eps={eps:g}"
        try:
            ra = algorithm_a(prog, eps, cfg, stop_at_target=False)
            rc = algorithm2(lifted, eps, x_bar, cfg)
            dev = trace_discrepancy(ra, rc, prog.n)
            same = len(ra.records) == len(rc.records)
            out.append(CheckResult(name, same and dev <= EQUIVALENCE_TOL,
                                   f"max discrepancy {dev:.2e} over {len(ra.records) - 1} steps"
                                   f"{'' if same else ' (trace lengths differ)'}", dev))
        except SolverError as exc:
            out.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
    if prog.f_star is None:
        out.append(CheckResult("B-vs-1", True, "skipped: optimal value unknown"))
        return out
    try:
        rb = algorithm_b(prog, prog.f_star, cfg)
        r1 = algorithm1(lifted, prog.f_star, x_bar, cfg)
        dev = trace_discrepancy(rb, r1, prog.n)
        same = len(rb.records) == len(r1.records)
        out.append(CheckResult("B-vs-1", same and dev <= EQUIVALENCE_TOL,
                               f"max discrepancy {dev:.2e} over {len(rb.records) - 1} steps "
                               f"(B ended: {rb.termination})"
                               f"{'' if same else ' (trace lengths differ)'}", dev))
    except SolverError as exc:
        out.append(CheckResult("B-vs-1", False, f"{type(exc).__name__}: {exc}"))
    return out


def equivalence_suite(prob: Problem, seed=DEFAULT_SEED) -> List[CheckResult]:
    return equivalence_checks(prob.convex)


SUITES = {
    "identities": identity_suite,
    "bounds": bound_suite,
    "equivalence": equivalence_suite,
}
