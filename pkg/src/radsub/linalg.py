"""Dense linear maps and the orthogonal projector onto their kernel.

The projector caches a Cholesky factor of ``A A^T`` so that each application
costs a pair of triangular solves plus two products with ``A``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import DimensionMismatch, RankDeficient

PIVOT_RTOL = 1e-12


def as_vector(v, n=None):
    """Return ``v`` as a finite 1-D float array, optionally checking its length."""
    arr = np.asarray(v, dtype=float).reshape(-1)
    if n is not None and arr.shape[0] != n:
        raise DimensionMismatch(f"expected length {n}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite entries")
    return arr


class LinearMap:
    """An ``m x n`` matrix, stored densely.

    Coordinate-sparse input is accepted through :meth:`from_coo` but is
    densified on construction; all algebra here is dense.
    """

    def __init__(self, entries, n=None):
        arr = np.array(entries, dtype=float)
        if arr.size == 0:
            if n is None:
                n = arr.shape[1] if arr.ndim == 2 else 0
            arr = np.zeros((0, n))
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise DimensionMismatch("linear map must be 2-D")
        if n is not None and arr.shape[1] != n:
            raise DimensionMismatch(f"expected {n} columns, got {arr.shape[1]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("linear map has non-finite entries")
        self.matrix = arr
        self.matrix.setflags(write=False)

    @classmethod
    def from_coo(cls, rows, cols, vals, shape):
        coo = sp.coo_matrix((vals, (rows, cols)), shape=shape)
        return cls(coo.toarray())

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def m(self):
        return self.matrix.shape[0]

    @property
    def n(self):
        return self.matrix.shape[1]

    def __matmul__(self, v):
        return self.matrix @ v

    def stacked(self, row):
        """Return a new map with ``row`` appended below the existing rows."""
        row = as_vector(row, self.n)
        return LinearMap(np.vstack([self.matrix, row[None, :]]))

    def __repr__(self):
        return f"LinearMap(shape={self.shape})"


class KernelProjector:
    """Orthogonal projector onto ``ker(A)`` for a full-row-rank ``A``.

    Immutable after construction, so one instance may be shared by
    concurrent solves.
    """

    def __init__(self, linear_map: LinearMap):
        self.map = linear_map
        mat = linear_map.matrix
        if mat.shape[0] > mat.shape[1]:
            raise RankDeficient(
                f"{mat.shape[0]} rows cannot be independent in dimension {mat.shape[1]}")
        self._factor = None
        if mat.shape[0] == 0:
            return
        gram = mat @ mat.T
        scale = float(np.max(np.diag(gram)))
        if scale <= 0.0:
            raise RankDeficient("linear map has a zero row")
        try:
            factor, lower = sla.cho_factor(gram, lower=True, check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise RankDeficient("A A^T is not positive definite") from exc
        pivots = np.diag(factor) ** 2
        if np.min(pivots) < PIVOT_RTOL * scale:
            raise RankDeficient(
                f"Cholesky pivot {np.min(pivots):.3e} below {PIVOT_RTOL:g} x {scale:.3e}; "
                "rows are (nearly) dependent")
        self._factor = (factor, lower)

    @property
    def n(self):
        return self.map.n

    def multipliers(self, r):
        """Solve ``(A A^T) u = r``."""
        return sla.cho_solve(self._factor, r, check_finite=False)

    def apply(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise DimensionMismatch(f"expected vector of length {self.n}, got shape {v.shape}")
        if self._factor is None:
            return v.copy()
        mat = self.map.matrix
        return v - mat.T @ self.multipliers(mat @ v)

    __call__ = apply

    def restore(self, x, rhs):
        """Return the nearest point to ``x`` on ``{y : A y = rhs}``."""
        x = np.asarray(x, dtype=float)
        if self._factor is None:
            return x.copy()
        mat = self.map.matrix
        return x - mat.T @ self.multipliers(mat @ x - rhs)

    def matrix(self):
        """Dense ``n x n`` projection matrix (for tests and small problems)."""
        return np.column_stack([self.apply(col) for col in np.eye(self.n)])


def build_projector(linear_map) -> KernelProjector:
    if not isinstance(linear_map, LinearMap):
        linear_map = LinearMap(linear_map)
    return KernelProjector(linear_map)


def apply(proj: KernelProjector, v) -> np.ndarray:
    return proj.apply(v)
