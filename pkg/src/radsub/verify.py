"""Brute-force reference oracles used to check the solvers.

Nothing here calls the solvers' own line search or projector logic, so
agreement between the two is meaningful. Estimators sample, so their
values are lower-bound style; callers add slack.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg as sla
from scipy.optimize import nnls
from scipy.spatial.distance import pdist

from .cones import ConeOracle, OrthantCone, radial_project
from .conic import ConicProgram
from .convex import ConvexProgram, LiftedCone, lifted_point
from .errors import (DegenerateGeometry, Infeasible, InvalidQuery, TooLarge, Unbounded,
                     UnboundedRay, Unsupported)

DEFAULT_SEED = 0xC0FFEE
MAX_VERTEX_N = 12
MAX_VERTEX_M = 6
ALPHA_GRID_RANGE = (1e-8, 1e12)


# --- small LPs by basis enumeration -------------------------------------------------

def _independent_rows(A, b, tol=1e-10):
    keep = []
    for i in range(A.shape[0]):
        trial = keep + [i]
        if np.linalg.matrix_rank(A[trial], tol=tol * max(1.0, np.abs(A).max())) == len(trial):
            keep.append(i)
    if keep and np.linalg.matrix_rank(A[keep]) == np.linalg.matrix_rank(np.column_stack([A, b])):
        return A[keep], b[keep]
    if not keep:
        if np.any(np.abs(b) > tol):
            raise Infeasible("zero constraint rows with nonzero right-hand side")
        return A[:0], b[:0]
    # dependent rows with an inconsistent right-hand side
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.linalg.norm(A @ x - b) > 1e-8 * max(1.0, np.linalg.norm(b)):
        raise Infeasible("equality constraints are inconsistent")
    return A[keep], b[keep]


def _bases(A, b, tol):
    """Yield ``(cols, x_B, B)`` for every nonsingular basis of ``A``."""
    m, n = A.shape
    for cols in itertools.combinations(range(n), m):
        B = A[:, cols]
        if abs(np.linalg.det(B)) < tol:
            continue
        yield list(cols), np.linalg.solve(B, b), B


def lp_vertices(A, b, tol=1e-9) -> np.ndarray:
    """All basic feasible solutions of ``{x >= 0 : A x = b}`` (rows are vertices)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    n = A.shape[1]
    if A.size == 0 or A.shape[0] == 0:
        return np.zeros((1, n))
    A, b = _independent_rows(A, b)
    m = A.shape[0]
    if m == 0:
        return np.zeros((1, n))
    scale = max(1.0, float(np.max(np.abs(b))))
    found = []
    for cols, xb, _ in _bases(A, b, 1e-12):
        if np.min(xb) < -tol * scale:
            continue
        x = np.zeros(n)
        x[cols] = np.maximum(xb, 0.0)
        if not any(np.allclose(x, y, atol=1e-9 * scale) for y in found):
            found.append(x)
    return np.array(found).reshape(-1, n)


def lp_vertex_optimum(A, b, c, tol=1e-9):
    """Exact optimum of ``min c.x  s.t.  Ax = b, x >= 0`` for tiny instances.

    Returns ``(z_star, argmin)``. Unboundedness is detected from extreme
    rays ``d >= 0, A d = 0`` of the recession cone with ``c.d < 0``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    c = np.asarray(c, dtype=float).reshape(-1)
    m, n = A.shape
    if n > MAX_VERTEX_N or m > MAX_VERTEX_M:
        raise TooLarge(f"vertex enumeration limited to n <= {MAX_VERTEX_N}, m <= {MAX_VERTEX_M}")
    verts = lp_vertices(A, b, tol)
    if verts.shape[0] == 0:
        raise Infeasible("no basic feasible solution")
    Ar, br = _independent_rows(A, b) if m else (A, b)
    rays = []
    if Ar.shape[0] == 0:
        rays = list(np.eye(n))
    else:
        for cols, _, B in _bases(Ar, br, 1e-12):
            for j in set(range(n)) - set(cols):
                d = np.zeros(n)
                d[j] = 1.0
                d[cols] = -np.linalg.solve(B, Ar[:, j])
                if np.min(d) >= -tol:
                    rays.append(d)
    for d in rays:
        if c @ d < -tol * max(1.0, np.linalg.norm(c)):
            raise Unbounded("objective decreases along an extreme ray")
    vals = verts @ c
    k = int(np.argmin(vals))
    return float(vals[k]), verts[k]


# --- brute-force line search ---------------------------------------------------------

def grid_alpha(prog: ConvexProgram, x, t, grid_n=500) -> float:
    """``alpha(x, t)`` from membership tests on a geometric grid, refined twice.

    Uses only ``S.contains`` and ``f`` values. The feasible parameters form
    an interval ``[0, alpha]``, so the first failing grid point brackets it.
    """
    if not t < prog.f_hat:
        raise InvalidQuery(f"need t < f_hat = {prog.f_hat:.6g}")
    x = np.asarray(x, dtype=float)
    e_bar, f_hat = prog.e_bar, prog.f_hat
    d = x - e_bar

    def inside(a):
        p = e_bar + a * d
        return prog.S.contains(p, tol=0.0) and prog.f(p) <= f_hat + a * (t - f_hat)

    def first_out(pts):
        for i, a in enumerate(pts):
            if not inside(a):
                return i
        return None

    pts = np.geomspace(*ALPHA_GRID_RANGE, grid_n)
    i = first_out(pts)
    if i is None:
        raise UnboundedRay("grid never leaves the feasible region")
    lo, hi = (0.0 if i == 0 else pts[i - 1]), pts[i]
    for _ in range(2):
        pts = np.linspace(lo, hi, grid_n)
        j = first_out(pts[1:]) + 1
        lo, hi = pts[j - 1], pts[j]
    return float(lo)


# --- slices of conic programs ---------------------------------------------------------

def slice_basis(prog: ConicProgram) -> np.ndarray:
    """Orthonormal basis (columns) of ``ker [A; c^T]``."""
    return sla.null_space(np.vstack([prog.A.matrix, prog.c[None, :]]))


def slice_point(prog: ConicProgram, z) -> np.ndarray:
    """Point of ``Affine_z`` closest to ``e``."""
    M = np.vstack([prog.A.matrix, prog.c[None, :]])
    rhs = np.append(prog.b, z)
    corr, *_ = np.linalg.lstsq(M, rhs - M @ prog.e, rcond=None)
    return prog.e + corr


def grid_max_lambda(prog: ConicProgram, z, grid_n=201, radius=None, refinements=3, budget=40000):
    """Maximize ``lambda_min`` over ``Affine_z`` by nested grids.

    Returns ``(value, argmax)``. The slice is parametrized by an orthonormal
    null-space basis; each refinement zooms to two grid spacings around the
    current best point.
    """
    N = slice_basis(prog)
    base = slice_point(prog, z)
    dim = N.shape[1]
    if dim == 0:
        return prog.cone.lambda_min(base), base
    per_dim = max(5, min(grid_n, int(budget ** (1.0 / dim))))
    if radius is None:
        radius = 4.0 * max(np.linalg.norm(prog.e), np.linalg.norm(base - prog.e)) + 1.0
    center = np.zeros(dim)
    half = float(radius)
    best_val, best_u = -math.inf, center
    for _ in range(refinements + 1):
        axes = [np.linspace(c - half, c + half, per_dim) for c in center]
        for u in itertools.product(*axes):
            u = np.asarray(u)
            val = prog.cone.lambda_min(base + N @ u)
            if val > best_val:
                best_val, best_u = val, u
        center = best_u
        half = 2.0 * half / (per_dim - 1)
    return float(best_val), base + N @ best_u


def hull_distance(points, x, weight=1e6) -> float:
    """Euclidean distance from ``x`` to the convex hull of the rows of ``points``."""
    V = np.atleast_2d(np.asarray(points, dtype=float))
    x = np.asarray(x, dtype=float)
    if V.shape[0] == 1:
        return float(np.linalg.norm(V[0] - x))
    rho = weight * max(1.0, float(np.max(np.abs(V))))
    M = np.vstack([V.T, rho * np.ones((1, V.shape[0]))])
    w, _ = nnls(M, np.append(x, rho))
    w = w / w.sum()
    return float(np.linalg.norm(V.T @ w - x))


def _require_orthant(prog):
    if not isinstance(prog.cone, OrthantCone):
        raise Unsupported("level-set enumeration needs the orthant cone")


def level_vertices(prog: ConicProgram, z) -> np.ndarray:
    """Vertices of ``Level_z = Affine_z ∩ K`` for an orthant program."""
    _require_orthant(prog)
    M = np.vstack([prog.A.matrix, prog.c[None, :]])
    return lp_vertices(M, np.append(prog.b, z))


def maximizer_vertices(prog: ConicProgram, z, z_star, optimal_vertices) -> np.ndarray:
    """Vertices of ``argmax lambda_min`` on ``Affine_z``: a scaled copy of the optimal face."""
    s = (prog.ce - z) / (prog.ce - z_star)
    e = prog.e
    return e + s * (np.asarray(optimal_vertices) - e)


def slice_distance(prog: ConicProgram, x, z_star, optimal_vertices) -> float:
    """``dist_z(x)`` with ``z = c.x``: distance to the maximizers of ``lambda_min`` on ``Affine_z``."""
    z = prog.objective(x)
    return hull_distance(maximizer_vertices(prog, z, z_star, optimal_vertices), x)


# --- geometry estimates ------------------------------------------------------------------

@dataclass
class GeometryEstimates:
    M_est: float = math.nan
    r_est: float = math.nan
    D_est: float = math.nan
    Dist_est: float = math.nan
    Diam_est: float = math.nan
    level: float = math.nan
    samples: int = 0
    seed: int = DEFAULT_SEED

    def to_dict(self):
        return asdict(self)


def _unit_rows(rng, N, count):
    if N.shape[1] == 0:
        return np.zeros((0, N.shape[0]))
    U = rng.normal(size=(count, N.shape[1])) @ N.T
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    basis = N.T / np.linalg.norm(N.T, axis=1, keepdims=True)
    return np.vstack([U, basis, -basis])


def _ray_extent(inside, scale, max_doublings=60, iters=100):
    """``sup{s >= 0 : inside(s)}`` by doubling then bisection; ``inside(0)`` must hold."""
    lo, hi = 0.0, scale
    for _ in range(max_doublings):
        if not inside(hi):
            break
        lo, hi = hi, 2.0 * hi
    else:
        return math.inf
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if inside(mid):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * hi:
            break
    return lo


def _lipschitz_samples(cone: ConeOracle, anchor, N, rng, count, scale):
    best = 0.0
    dim = N.shape[1]
    if dim == 0:
        return best
    for _ in range(count):
        x = anchor + N @ (rng.normal(size=dim) * scale)
        y = x + N @ (rng.normal(size=dim) * scale * 10.0 ** rng.uniform(-4, 0))
        dist = np.linalg.norm(x - y)
        if dist > 0:
            best = max(best, abs(cone.lambda_min(x) - cone.lambda_min(y)) / dist)
    # short steps from the anchor along each coordinate direction projected into the slice
    h = 1e-4 * scale
    P = N @ N.T
    for j in range(P.shape[0]):
        u = P[:, j]
        nu = np.linalg.norm(u)
        if nu > 1e-12:
            u = u / nu
            for sgn in (1.0, -1.0):
                best = max(best, abs(cone.lambda_min(anchor - sgn * h * u)
                                     - cone.lambda_min(anchor)) / h)
    return float(best)


def _conic_geometry(prog: ConicProgram, samples, seed, z, z_star):
    rng = np.random.default_rng(seed)
    e, cone = prog.e, prog.cone
    N = slice_basis(prog)
    scale = float(np.linalg.norm(e))
    est = GeometryEstimates(samples=samples, seed=seed)
    est.M_est = _lipschitz_samples(cone, e, N, rng, samples, scale)

    dirs = _unit_rows(rng, N, samples)
    P = N @ N.T
    extra = [P[:, j] / np.linalg.norm(P[:, j]) for j in range(P.shape[0])
             if np.linalg.norm(P[:, j]) > 1e-12]
    if extra:
        dirs = np.vstack([dirs] + [np.array(extra), -np.array(extra)])
    if dirs.shape[0]:
        est.r_est = min(_ray_extent(lambda s, u=u: cone.lambda_min(e + s * u) >= 0.0, scale)
                        for u in dirs)

    if z_star is not None and isinstance(cone, OrthantCone):
        z = prog.ce if z is None else float(z)
        est.level = z
        opt = level_vertices(prog, z_star)
        if opt.shape[0] == 0:
            raise DegenerateGeometry("optimal level set is empty; z_star is wrong")
        dist, diam = 0.0, 0.0
        for zp in np.linspace(z_star, z, 41)[1:]:
            verts = level_vertices(prog, zp)
            if verts.shape[0] == 0:
                continue
            hull = maximizer_vertices(prog, zp, z_star, opt)
            dist = max(dist, max(hull_distance(hull, v) for v in verts))
            if verts.shape[0] > 1:
                diam = max(diam, float(np.max(pdist(verts))))
        est.Dist_est, est.Diam_est = float(dist), float(diam)
    return est


def _convex_geometry(prog: ConvexProgram, samples, seed):
    rng = np.random.default_rng(seed)
    e_bar, f = prog.e_bar, prog.f
    N = sla.null_space(prog.A.matrix) if prog.A.m else np.eye(prog.n)
    scale = max(1.0, float(np.linalg.norm(e_bar)))
    dirs = _unit_rows(rng, N, samples)
    est = GeometryEstimates(samples=samples, seed=seed)

    def within(level, u):
        def inside(s):
            p = e_bar + s * u
            return prog.S.contains(p, tol=0.0) and f(p) <= level
        return inside

    pts = [e_bar.copy()]
    for u in dirs:
        s = _ray_extent(within(prog.f_bar, u), scale)
        if not math.isfinite(s):
            raise DegenerateGeometry("sublevel set appears unbounded")
        if s > 0:
            pts.append(e_bar + s * u)
    if len(pts) < 2:
        raise DegenerateGeometry("sampling found no sublevel points beyond e_bar")
    pts = np.array(pts)
    est.D_est = float(np.max(pdist(pts)))
    est.Diam_est = est.D_est
    if prog.x_star is not None:
        est.Dist_est = float(np.max(np.linalg.norm(pts - prog.x_star, axis=1)))
    est.r_est = min(_ray_extent(within(prog.f_hat, u), scale) for u in dirs)
    est.level = prog.f_bar

    # Lipschitz constant of the lifted lambda_min on the slice s = 1, t = f(e_bar)
    cone = LiftedCone(prog)
    anchor = lifted_point(prog, e_bar, prog.f_bar)
    NL = np.zeros((prog.n + 2, N.shape[1]))
    NL[:prog.n] = N
    est.M_est = _lipschitz_samples(cone, anchor, NL, rng, max(samples // 4, 1), 0.5 * est.r_est)
    return est


def estimate_geometry(prog, samples=2000, seed=DEFAULT_SEED, z=None, z_star=None) -> GeometryEstimates:
    """Sampled estimates of the geometric constants in the iteration bounds.

    For a :class:`ConicProgram`: ``M_est`` (Lipschitz constant of
    ``lambda_min`` on a slice), ``r_est`` (inscribed radius around ``e`` in
    ``Affine_{c.e}``) and, for orthant programs with ``z_star`` given,
    ``Dist_est``/``Diam_est`` over levels ``z' <= z`` (default ``z = c.e``)
    from vertex enumeration.

    For a :class:`ConvexProgram`: ``D_est`` (sublevel diameter),
    ``r_est`` (the radius ``r_hat`` around ``e_bar``) and ``M_est`` for
    the lifted cone.
    """
    if isinstance(prog, ConicProgram):
        return _conic_geometry(prog, samples, seed, z, z_star)
    if isinstance(prog, ConvexProgram):
        return _convex_geometry(prog, samples, seed)
    raise TypeError(f"cannot estimate geometry of {type(prog).__name__}")


def relative_gap_of(prog: ConicProgram, x, z_star) -> float:
    """``(c.pi(x) - z*)/(c.e - z*)``."""
    return (prog.objective(radial_project(prog.cone, x)) - z_star) / (prog.ce - z_star)
