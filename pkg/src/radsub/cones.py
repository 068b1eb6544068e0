"""Cone oracles built around a distinguished interior direction ``e``.

For a closed convex cone K with ``e`` in its interior,
``lambda_min(x) = sup{lam : x - lam*e in K}``. It is concave, shifts
exactly with ``e`` (``lambda_min(x + t*e) = lambda_min(x) + t``) and
vanishes on the boundary of K.
"""

from __future__ import annotations

import abc

import numpy as np

from .errors import RadialUndefined, Unsupported
from .linalg import as_vector

TIE_ATOL = 1e-12
RADIAL_MARGIN = 1e-12


class ConeOracle(abc.ABC):
    """Contract shared by all cones used by the conic solver.

    Subclasses fix ``direction`` (the vector ``e``) at construction.
    """

    direction: np.ndarray

    @property
    def dim(self) -> int:
        return self.direction.shape[0]

    @abc.abstractmethod
    def lambda_min(self, x) -> float:
        ...

    @abc.abstractmethod
    def supgradient(self, x) -> np.ndarray:
        """One element ``g`` of the supdifferential; always ``<e, g> = 1``."""

    def contains(self, x) -> bool:
        return self.lambda_min(x) >= 0.0

    def boundary_point(self, x, lam) -> np.ndarray:
        """``pi(x)`` given ``lam = lambda_min(x) < 1``; cones may override with an exact form."""
        e = self.direction
        return e + (np.asarray(x, dtype=float) - e) / (1.0 - lam)


class OrthantCone(ConeOracle):
    """The nonnegative orthant with a strictly positive direction ``e``.

    Here ``lambda_min(x) = min_j x_j / e_j``.
    """

    def __init__(self, direction):
        e = as_vector(direction)
        if e.size == 0 or np.any(e <= 0):
            raise ValueError("orthant direction must have strictly positive entries")
        self.direction = e
        self.direction.setflags(write=False)

    def ratios(self, x):
        return np.asarray(x, dtype=float) / self.direction

    def lambda_min(self, x) -> float:
        return float(np.min(self.ratios(x)))

    def supgradient(self, x) -> np.ndarray:
        # lowest active index wins ties; any convex combination would do
        r = self.ratios(x)
        k = int(np.flatnonzero(r <= r.min() + TIE_ATOL)[0])
        g = np.zeros_like(r)
        g[k] = 1.0 / self.direction[k]
        return g

    def contains(self, x) -> bool:
        return bool(np.all(np.asarray(x, dtype=float) >= 0.0))

    def __repr__(self):
        return f"OrthantCone(direction={self.direction.tolist()})"


def radial_project(cone: ConeOracle, x, lam=None) -> np.ndarray:
    """Point where the half-line from ``e`` through ``x`` leaves the cone.

    ``lam`` may carry a precomputed ``lambda_min(x)``.
    """
    x = np.asarray(x, dtype=float)
    if lam is None:
        lam = cone.lambda_min(x)
    if lam >= 1.0 - RADIAL_MARGIN:
        raise RadialUndefined(
            f"lambda_min(x) = {lam:.6g} >= 1: the ray from e through x never leaves the cone")
    return cone.boundary_point(x, lam)


def gauge_norm(cone: ConeOracle, v) -> float:
    """The norm whose unit ball is ``{v : e + v, e - v in K}``; orthant only."""
    if not isinstance(cone, OrthantCone):
        raise Unsupported(f"gauge norm is only implemented for the orthant, not {type(cone).__name__}")
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        return 0.0
    return float(np.max(np.abs(v) / cone.direction))
