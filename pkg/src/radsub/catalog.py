"""Built-in test problems, addressed by name.

=====================  ==========================================  =========  ==========
name                   problem                                     e_bar      f_hat
=====================  ==========================================  =========  ==========
abs1d                  ``|x - 1|`` on ``[-2, 2]``                   0          2
nonlipschitz           ``x1^2 + x2^2/x1`` (``x1 > 0``) on R^2       (1, 1)     4
quad-box               ``||x - (2, 0.5)||^2`` on ``[-1, 1]^2``      0          f(0) + 1
piecewise-linear-nd    max of 6 affine pieces on a 4-d polytope,    0          f(0) + 1
                       with ``sum(x) = 0``
=====================  ==========================================  =========  ==========

The optimal value ``f_star`` is attached to every entry. For the
piecewise-linear problem it is computed once with ``scipy.optimize.linprog``.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from .convex import ConvexProgram
from .errors import InvalidProblem
from .oracles import Box, MaxAffine, Polyhedron, QuadOverLin, SquaredDistance, WholeSpace


def abs1d() -> ConvexProgram:
    f = MaxAffine([[1.0], [-1.0]], [-1.0, 1.0])
    return ConvexProgram(f, Box([-2.0], [2.0]), [0.0], 2.0, name="abs1d",
                         f_star=0.0, x_star=[1.0])


def nonlipschitz() -> ConvexProgram:
    return ConvexProgram(QuadOverLin(), WholeSpace(2), [1.0, 1.0], 4.0, name="nonlipschitz",
                         f_star=0.0, x_star=[0.0, 0.0])


def quad_box() -> ConvexProgram:
    f = SquaredDistance([2.0, 0.5])
    return ConvexProgram(f, Box([-1.0, -1.0], [1.0, 1.0]), [0.0, 0.0], f([0.0, 0.0]) + 1.0,
                         name="quad-box", f_star=1.0, x_star=[1.0, 0.5])


def _pwl_data(n=4, pieces=6, seed=7):
    rng = np.random.default_rng(seed)
    slopes = rng.normal(size=(pieces, n))
    offsets = rng.uniform(-1.0, 0.0, size=pieces)
    # box rows plus two oblique cuts, all strictly satisfied at the origin
    G = np.vstack([np.eye(n), -np.eye(n), rng.normal(size=(2, n))])
    h = np.concatenate([np.ones(2 * n), [0.7, 0.9]])
    A = np.ones((1, n))
    b = np.zeros(1)
    return slopes, offsets, G, h, A, b


def _pwl_optimum(slopes, offsets, G, h, A, b):
    """``min s  s.t.  a_i.x + b_i <= s, G x <= h, A x = b`` as an LP in ``(x, s)``."""
    n = slopes.shape[1]
    cost = np.zeros(n + 1)
    cost[-1] = 1.0
    A_ub = np.vstack([np.hstack([slopes, -np.ones((slopes.shape[0], 1))]),
                      np.hstack([G, np.zeros((G.shape[0], 1))])])
    b_ub = np.concatenate([-offsets, h])
    A_eq = np.hstack([A, np.zeros((A.shape[0], 1))])
    sol = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b,
                  bounds=[(None, None)] * (n + 1), method="highs")
    if sol.status != 0:
        raise InvalidProblem(f"linprog failed on the piecewise-linear instance: {sol.message}")
    return float(sol.fun), sol.x[:n]


def piecewise_linear_nd() -> ConvexProgram:
    slopes, offsets, G, h, A, b = _pwl_data()
    f = MaxAffine(slopes, offsets)
    f_star, x_star = _pwl_optimum(slopes, offsets, G, h, A, b)
    e_bar = np.zeros(slopes.shape[1])
    return ConvexProgram(f, Polyhedron(G, h), e_bar, f(e_bar) + 1.0, A=A, b=b,
                         name="piecewise-linear-nd", f_star=f_star, x_star=x_star)


CATALOG = {
    "abs1d": abs1d,
    "nonlipschitz": nonlipschitz,
    "quad-box": quad_box,
    "piecewise-linear-nd": piecewise_linear_nd,
}


def get(name) -> ConvexProgram:
    try:
        return CATALOG[name]()
    except KeyError:
        raise KeyError(f"unknown catalog problem {name!r}; choose from {sorted(CATALOG)}") from None
