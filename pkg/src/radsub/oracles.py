"""Oracles for convex sets ``S`` and extended-valued convex functions ``f``.

A set oracle answers membership, finds where a ray leaves the set and
returns an outward normal at boundary points. A function oracle evaluates
``f`` (``inf`` outside its domain) and returns subgradients at interior
points of the domain.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import OracleGap
from .linalg import as_vector

MEMBERSHIP_TOL = 1e-10


def bisect_exit(inside, cap=1e12, rtol=1e-12, max_halvings=200):
    """``sup{a >= 0 : inside(a)}`` for a predicate true on an initial interval."""
    hi = 1.0
    while inside(hi):
        hi *= 2.0
        if hi > cap:
            return math.inf
    lo = 0.0 if hi == 1.0 else hi / 2.0
    for _ in range(max_halvings):
        if hi - lo <= rtol * hi:
            break
        mid = 0.5 * (lo + hi)
        if inside(mid):
            lo = mid
        else:
            hi = mid
    return lo


class ConvexSet:
    """Closed convex set with nonempty interior."""

    dim: int

    def contains(self, x, tol=MEMBERSHIP_TOL) -> bool:
        raise NotImplementedError

    def ray_exit(self, origin, direction) -> float:
        """``sup{a >= 0 : origin + a*direction in S}`` for ``origin`` interior."""
        origin = np.asarray(origin, dtype=float)
        direction = np.asarray(direction, dtype=float)
        if not np.any(direction):
            return math.inf
        return bisect_exit(lambda a: self.contains(origin + a * direction, tol=0.0))

    def normal(self, x) -> np.ndarray:
        """A nonzero vector in the normal cone at the boundary point ``x``."""
        raise OracleGap(f"{type(self).__name__} provides no normal vectors")


class WholeSpace(ConvexSet):
    def __init__(self, dim):
        self.dim = int(dim)

    def contains(self, x, tol=MEMBERSHIP_TOL) -> bool:
        return True

    def ray_exit(self, origin, direction) -> float:
        return math.inf

    def __repr__(self):
        return f"WholeSpace({self.dim})"


class Box(ConvexSet):
    """``{x : lo <= x <= hi}``; infinite bounds are allowed."""

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float).reshape(-1)
        self.hi = np.asarray(hi, dtype=float).reshape(-1)
        if self.lo.shape != self.hi.shape or np.any(self.lo >= self.hi):
            raise ValueError("box needs lo < hi componentwise")
        self.dim = self.lo.size

    def contains(self, x, tol=MEMBERSHIP_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def ray_exit(self, origin, direction) -> float:
        o = np.asarray(origin, dtype=float)
        d = np.asarray(direction, dtype=float)
        best = math.inf
        # tiny components overflow to inf, which is the right exit value
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            up = np.where(d > 0, (self.hi - o) / d, np.inf)
            down = np.where(d < 0, (self.lo - o) / d, np.inf)
        best = min(best, float(np.min(up)), float(np.min(down)))
        return best

    def normal(self, x) -> np.ndarray:
        # face with the smallest slack; ties go to the lowest index, upper face first
        x = np.asarray(x, dtype=float)
        slack = np.concatenate([self.hi - x, x - self.lo])
        j = int(np.argmin(slack))
        v = np.zeros(self.dim)
        if j < self.dim:
            v[j] = 1.0
        else:
            v[j - self.dim] = -1.0
        return v

    def __repr__(self):
        return f"Box(lo={self.lo.tolist()}, hi={self.hi.tolist()})"


class Polyhedron(ConvexSet):
    """``{x : G x <= h}``."""

    def __init__(self, G, h):
        self.G = np.atleast_2d(np.asarray(G, dtype=float))
        self.h = np.asarray(h, dtype=float).reshape(-1)
        if self.G.shape[0] != self.h.size:
            raise ValueError("G and h disagree in row count")
        self.dim = self.G.shape[1]
        self._row_norms = np.linalg.norm(self.G, axis=1)

    def contains(self, x, tol=MEMBERSHIP_TOL) -> bool:
        return bool(np.all(self.G @ np.asarray(x, dtype=float) <= self.h + tol))

    def ray_exit(self, origin, direction) -> float:
        o = np.asarray(origin, dtype=float)
        rate = self.G @ np.asarray(direction, dtype=float)
        room = self.h - self.G @ o
        pos = rate > 0
        if not np.any(pos):
            return math.inf
        with np.errstate(over="ignore"):
            return float(np.min(room[pos] / rate[pos]))

    def normal(self, x) -> np.ndarray:
        slack = (self.h - self.G @ np.asarray(x, dtype=float)) / self._row_norms
        return self.G[int(np.argmin(slack))].copy()


class ConvexFunction:
    """Extended-valued convex function; ``value`` is ``inf`` off the domain."""

    dim: int

    def value(self, x) -> float:
        raise NotImplementedError

    __call__ = value

    def subgradient(self, x) -> np.ndarray:
        raise OracleGap(f"{type(self).__name__} provides no subgradients")

    def in_domain_interior(self, x) -> bool:
        return math.isfinite(self.value(x))

    def epigraph_normal(self, x, t):
        """Nonzero ``(v, delta)`` normal to the epigraph at a domain-boundary point."""
        raise OracleGap(f"{type(self).__name__} provides no epigraph normals at domain boundaries")

    def epigraph_exit(self, origin, t_origin, x, t):
        """Exact ``sup{a : f(x(a)) <= t(a)}`` if available in closed form, else ``None``."""
        return None


class MaxAffine(ConvexFunction):
    """``f(x) = max_i (a_i . x + b_i)``."""

    def __init__(self, slopes, offsets):
        self.slopes = np.atleast_2d(np.asarray(slopes, dtype=float))
        self.offsets = np.asarray(offsets, dtype=float).reshape(-1)
        if self.slopes.shape[0] != self.offsets.size:
            raise ValueError("slopes and offsets disagree in piece count")
        self.dim = self.slopes.shape[1]

    def pieces(self, x):
        return self.slopes @ np.asarray(x, dtype=float) + self.offsets

    def value(self, x) -> float:
        return float(np.max(self.pieces(x)))

    __call__ = value

    def subgradient(self, x) -> np.ndarray:
        return self.slopes[int(np.argmax(self.pieces(x)))].copy()

    def in_domain_interior(self, x) -> bool:
        return True

    def epigraph_exit(self, origin, t_origin, x, t):
        # each piece is affine along the ray: room_i + a*rate_i <= 0
        room = self.pieces(origin) - t_origin
        rate = self.slopes @ (np.asarray(x, dtype=float) - origin) - (t - t_origin)
        pos = rate > 0
        if not np.any(pos):
            return math.inf
        return float(np.min(-room[pos] / rate[pos]))


class SquaredDistance(ConvexFunction):
    """``f(x) = weight * ||x - center||^2``."""

    def __init__(self, center, weight=1.0):
        self.center = as_vector(center)
        self.weight = float(weight)
        self.dim = self.center.size

    def value(self, x) -> float:
        r = np.asarray(x, dtype=float) - self.center
        return float(self.weight * (r @ r))

    __call__ = value

    def subgradient(self, x) -> np.ndarray:
        return 2.0 * self.weight * (np.asarray(x, dtype=float) - self.center)

    def in_domain_interior(self, x) -> bool:
        return True


class QuadOverLin(ConvexFunction):
    """``x1^2 + x2^2/x1`` on ``x1 > 0``, ``0`` at the origin, ``inf`` elsewhere.

    Finite near the origin but not Lipschitz on any neighbourhood of it.
    """

    dim = 2

    def value(self, x) -> float:
        x1, x2 = float(x[0]), float(x[1])
        if x1 > 0.0:
            return x1 * x1 + x2 * x2 / x1
        if x1 == 0.0 and x2 == 0.0:
            return 0.0
        return math.inf

    __call__ = value

    def in_domain_interior(self, x) -> bool:
        return float(x[0]) > 0.0

    def subgradient(self, x) -> np.ndarray:
        x1, x2 = float(x[0]), float(x[1])
        if not x1 > 0.0:
            raise OracleGap("no subgradient outside the open half-plane x1 > 0")
        return np.array([2.0 * x1 - (x2 / x1) ** 2, 2.0 * x2 / x1])

    def epigraph_normal(self, x, t):
        if float(x[0]) == 0.0 and float(x[1]) == 0.0 and t >= 0.0:
            # every epigraph point has x1 >= 0
            return np.array([-1.0, 0.0]), 0.0
        raise OracleGap(f"point {x!r} is not on the domain boundary of the epigraph")
