
import numpy as np
import pytest
from scipy.optimize import linprog

from radsub import catalog
from radsub.checks import SUITES, membership_lambda
from radsub.conic import ConicProgram, algorithm2
from radsub.cones import OrthantCone
from radsub.convex import LiftedCone, lifted_point
from radsub.errors import Infeasible, TooLarge, Unbounded
from radsub.problem_io import resolve
from radsub.verify import (estimate_geometry, grid_alpha, grid_max_lambda, hull_distance,
                           lp_vertex_optimum, lp_vertices)


def test_vertex_optimum_examples():
    z, x = lp_vertex_optimum([[1, 1, 1]], [3], [1, 0, 0])
    assert z == 0.0 and x[0] == 0.0
    z, _ = lp_vertex_optimum([[1, 1]], [2], [1, 1])
    assert z == 2.0
    assert len(lp_vertices([[1, 1, 1]], [3])) == 3


def test_vertex_optimum_errors():
    with pytest.raises(Unbounded):
        lp_vertex_optimum([[1, -1]], [0], [0, -1])
    with pytest.raises(Infeasible):
        lp_vertex_optimum([[1, 1]], [-1], [1, 1])
    with pytest.raises(TooLarge):
        lp_vertex_optimum(np.ones((1, 20)), [1], np.ones(20))


def random_bounded_lp(rng, n, m):
    A = rng.normal(size=(m, n))
    A[0] = rng.uniform(0.5, 2.0, size=n)
    e = rng.uniform(0.5, 2.0, size=n)
    return A, A @ e, rng.normal(size=n), e


def test_vertex_optimum_matches_linprog():
    rng = np.random.default_rng(11)
    for _ in range(30):
        n = int(rng.integers(2, 8))
        m = int(rng.integers(1, min(4, n - 1) + 1))
        A, b, c, _ = random_bounded_lp(rng, n, m)
        sol = linprog(c, A_eq=A, b_eq=b, bounds=[(0, None)] * n, method="highs")
        assert lp_vertex_optimum(A, b, c)[0] == pytest.approx(sol.fun, abs=1e-7)


def test_random_lp_matches_algorithm2():
    rng = np.random.default_rng(4)
    A, b, c, e = random_bounded_lp(rng, 4, 2)
    z_star = lp_vertex_optimum(A, b, c)[0]
    prog = ConicProgram(c, A, b, OrthantCone(e))
    eps = 0.1
    rep = algorithm2(prog, eps, prog.default_warm_start(), z_star=z_star)
    assert rep.best_objective - z_star <= eps * (prog.ce - z_star)


def test_grid_alpha_examples():
    from test_convex import square_on_line
    assert grid_alpha(square_on_line(), [2.0], 0.0) == pytest.approx(0.3903882, abs=1e-6)
    from radsub.convex import ConvexProgram
    from radsub.oracles import Box, MaxAffine
    box = ConvexProgram(MaxAffine([[0.0, 0.0]], [0.0]), Box([-1, -1], [1, 1]), [0, 0], 1.0)
    assert grid_alpha(box, [2.0, 0.0], -1.0) == pytest.approx(0.5, abs=1e-6)


def test_grid_max_lambda_matches_characterization(canonical):
    for z in (0.25, 0.5, 0.75):
        val, x = grid_max_lambda(canonical, z)
        assert val == pytest.approx(z, abs=1e-4)
        assert canonical.objective(x) == pytest.approx(z)


def test_hull_distance():
    V = np.array([[0.0, 0.0], [1.0, 0.0]])
    assert hull_distance(V, [0.5, 2.0]) == pytest.approx(2.0, abs=1e-5)
    assert hull_distance(V, [0.5, 0.0]) == pytest.approx(0.0, abs=1e-5)


def test_geometry_canonical(canonical):
    geo = estimate_geometry(canonical, z_star=0.0)
    assert geo.r_est > 0
    assert geo.M_est * geo.r_est <= 1.05
    again = estimate_geometry(canonical, z_star=0.0)
    assert geo.to_dict() == again.to_dict()


def test_geometry_abs1d_exact_diameter():
    geo = estimate_geometry(catalog.abs1d(), samples=200)
    # {x in [-2, 2] : |x - 1| <= 1} = [0, 2]
    assert geo.D_est == pytest.approx(2.0, abs=1e-9)
    assert geo.r_est == pytest.approx(1.0, abs=1e-6)


def test_membership_lambda_matches_lifted_cone():
    prog = catalog.quad_box()
    K = LiftedCone(prog)
    rng = np.random.default_rng(2)
    for _ in range(20):
        y = lifted_point(prog, rng.normal(size=2), rng.uniform(0.0, 4.0))
        assert membership_lambda(K, y) == pytest.approx(K.lambda_min(y), abs=1e-8)


def test_identity_suite_canonical(lp_file):
    results = SUITES["identities"](resolve(str(lp_file)))
    assert all(r.passed for r in results), [r.line() for r in results if not r.passed]


@pytest.mark.parametrize("name", sorted(catalog.CATALOG))
def test_suites_on_catalog(name):
    prob = resolve(f"catalog:{name}")
    for suite in ("identities", "equivalence"):
        results = SUITES[suite](prob)
        assert all(r.passed for r in results), [r.line() for r in results if not r.passed]
