import math

import numpy as np
import pytest

from radsub.cones import OrthantCone, radial_project
from radsub.conic import (FOUR_THIRDS, ConicProgram, algorithm1, algorithm2, fit_linear_rate,
                          iteration_bound_alg1, iteration_bound_alg2)
from radsub.errors import (BadWarmStart, DomainError, InsufficientTrace, InvalidProblem,
                           RankDeficient, ZeroProjectedGradient)
from radsub.report import SolverConfig, read_trace_csv, trace_csv, write_trace_csv
from radsub.verify import lp_vertex_optimum


def test_program_validation():
    with pytest.raises(InvalidProblem):
        ConicProgram([1, 0, 0], [[1, 1, 1]], [2], OrthantCone([1, 1, 1]))
    with pytest.raises(RankDeficient):
        # c in the row space of A
        ConicProgram([1, 1, 1], [[1, 1, 1]], [3], OrthantCone([1, 1, 1]))


def test_algorithm1_one_step(canonical, x_bar):
    rep = algorithm1(canonical, 0.0, x_bar)
    r0, r1 = rep.records
    np.testing.assert_allclose(r0.x, [0, 4, -1], atol=1e-15)
    assert r0.lambda_min == -1.0
    np.testing.assert_allclose(canonical.project_supgradient(OrthantCone([1, 1, 1]).supgradient(r0.x)),
                               [0, -0.5, 0.5], atol=1e-15)
    np.testing.assert_allclose(r1.x, [0, 3, 0], atol=1e-9)
    assert abs(r1.lambda_min) <= 1e-9
    np.testing.assert_allclose(rep.best_point, [0, 3, 0], atol=1e-9)
    assert rep.termination == "optimal" and rep.iterations == 1
    # the vertex oracle agrees on z*
    assert lp_vertex_optimum([[1, 1, 1]], [3], [1, 0, 0])[0] == 0.0


def test_algorithm1_optimal_warm_start(canonical):
    x = np.array([0.0, 1.0, 2.0])
    rep = algorithm1(canonical, 0.0, x)
    assert rep.iterations == 0
    np.testing.assert_array_equal(rep.records[0].x, x)
    assert rep.records[0].lambda_min == 0.0


def test_algorithm1_infeasible_target(canonical, x_bar):
    with pytest.raises(ZeroProjectedGradient) as info:
        algorithm1(canonical, -1.0, x_bar)
    rep = info.value.report
    assert rep.termination == "zero_projected_gradient"
    assert all(r.lambda_min < 0 for r in rep.records)


def test_algorithm1_rejects_bad_inputs(canonical, x_bar):
    with pytest.raises(BadWarmStart):
        algorithm1(canonical, 0.0, [2.0, 0.5, 0.5])
    with pytest.raises(InvalidProblem):
        algorithm1(canonical, 1.0, x_bar)


def test_algorithm2_canonical(canonical, x_bar):
    rep = algorithm2(canonical, 0.5, x_bar, z_star=0.0)
    np.testing.assert_array_equal(rep.records[0].x, x_bar)
    assert rep.records[0].lambda_min == 0.0
    assert rep.termination == "target_reached" and rep.iterations == 0
    rep = algorithm2(canonical, 0.1, x_bar, z_star=0.0)
    assert rep.best_gap <= 0.1


def test_algorithm2_already_optimal(canonical):
    rep = algorithm2(canonical, 0.9, [0.0, 1.5, 1.5], z_star=0.0)
    assert rep.records[0].gap_rel == 0.0 and rep.iterations == 0


def test_algorithm2_without_zstar_never_targets(canonical, x_bar):
    rep = algorithm2(canonical, 0.1, x_bar, SolverConfig(max_iterations=20))
    assert rep.termination in ("optimal", "max_iterations")
    assert len(rep.records) <= 21
    assert all(math.isnan(g) for g in rep.gaps())


def test_algorithm2_epsilon_domain(canonical, x_bar):
    for eps in (0.0, 1.0, -0.2):
        with pytest.raises(DomainError):
            algorithm2(canonical, eps, x_bar)


def test_restart_rule_matches_quarter_threshold():
    # c.(e - pi(y)) >= 4/3 c.(e - y)  iff  lambda_min(y) >= 1/4, for y with c.y < c.e
    K = OrthantCone([1, 1, 1])
    c = np.array([1.0, 0.0, 0.0])
    e = K.direction
    rng = np.random.default_rng(5)
    for _ in range(2000):
        y = e + rng.normal(size=3)
        lam = K.lambda_min(y)
        if c @ y >= c @ e or lam >= 0.999 or abs(lam - 0.25) < 1e-9:
            continue
        fired = c @ (e - radial_project(K, y, lam)) >= FOUR_THIRDS * (c @ (e - y))
        assert fired == (lam >= 0.25)


def test_iteration_bounds():
    assert iteration_bound_alg1(1, 1, 0.5, 0.75) == pytest.approx(31.673, abs=1e-3)
    assert iteration_bound_alg2(1, 2, 0.1, 2 / 3) == pytest.approx(4422.03, abs=1e-2)
    b = iteration_bound_alg1(1, 1, 0.2, 0.75)
    assert iteration_bound_alg1(2, 1, 0.2, 0.75) == pytest.approx(4 * b)
    for bad in [(0, 1, 0.1, 0.5), (1, 1, 0.5, 0.5), (1, 1, 0.1, 1.0)]:
        with pytest.raises(DomainError):
            iteration_bound_alg2(*bad)


def test_fit_linear_rate():
    fit = fit_linear_rate([2.0 ** -k for k in range(30)])
    assert fit.slope == pytest.approx(-math.log(2)) and fit.r_squared == pytest.approx(1.0)
    assert fit_linear_rate([0.3] * 20).slope == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(InsufficientTrace):
        fit_linear_rate([0.5, 0.25, 0.0, 0.1] + [0.1] * 20)


def test_trace_csv_roundtrip(tmp_path, canonical, x_bar):
    rep = algorithm2(canonical, 0.05, x_bar, z_star=0.0)
    path = tmp_path / "t.csv"
    write_trace_csv(rep, path)
    rows = read_trace_csv(path)
    assert len(rows) == rep.iterations + 1
    assert [r["k"] for r in rows] == list(range(len(rows)))
    assert all(r["wall_ns"] == 0 for r in rows)
    assert rows[-1]["gap_rel"] == rep.records[-1].gap_rel
    assert trace_csv(rep) == trace_csv(algorithm2(canonical, 0.05, x_bar, z_star=0.0))
