import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from radsub import catalog
from radsub.checks import membership_lambda
from radsub.convex import LiftedCone, lifted_point, line_search
from radsub.oracles import Box, MaxAffine, Polyhedron, bisect_exit
from radsub.report import SolverConfig, trace_csv

PROGRAMS = {name: catalog.get(name) for name in catalog.CATALOG}
coords = st.floats(-3, 3, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(arrays(float, 3, elements=st.floats(-0.9, 0.9)), arrays(float, 3, elements=coords))
def test_box_exit_matches_bisection(origin, direction):
    assume(np.linalg.norm(direction) > 1e-3)
    box = Box(-np.ones(3), np.ones(3))
    exact = box.ray_exit(origin, direction)
    approx = bisect_exit(lambda a: box.contains(origin + a * direction, tol=0.0), rtol=1e-13)
    assert exact == pytest.approx(approx, rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(arrays(float, (4, 2), elements=coords), arrays(float, 2, elements=coords))
def test_polyhedron_exit_is_on_boundary(G, direction):
    assume(np.linalg.norm(direction) > 1e-3 and np.all(np.linalg.norm(G, axis=1) > 1e-3))
    P = Polyhedron(G, np.ones(4))
    a = P.ray_exit(np.zeros(2), direction)
    if np.isfinite(a):
        slack = np.ones(4) - G @ (a * direction)
        assert np.min(slack) == pytest.approx(0.0, abs=1e-9 * (1 + a * np.abs(G @ direction).max()))


@settings(max_examples=200, deadline=None)
@given(arrays(float, (3, 2), elements=coords), arrays(float, 3, elements=coords),
       arrays(float, 2, elements=coords), st.floats(-5, 5))
def test_max_affine_epigraph_exit(slopes, offsets, x, t):
    f = MaxAffine(slopes, offsets)
    e_bar = np.zeros(2)
    f_hat = f(e_bar) + 1.0
    assume(t < f_hat - 1e-3)
    exact = f.epigraph_exit(e_bar, f_hat, x, t)

    def inside(a):
        return f(e_bar + a * x) <= f_hat + a * (t - f_hat)

    approx = bisect_exit(inside, rtol=1e-13)
    if np.isfinite(approx) and approx < 1e10:
        assert exact == pytest.approx(approx, rel=1e-9)


@st.composite
def catalog_queries(draw):
    name = draw(st.sampled_from(sorted(PROGRAMS)))
    prog = PROGRAMS[name]
    step = draw(arrays(float, prog.n, elements=coords))
    x = prog.e_bar + prog.project(step)
    t = prog.f_hat - draw(st.floats(0.01, 5.0))
    return prog, x, t


@settings(max_examples=300, deadline=None)
@given(catalog_queries())
def test_boundary_point_is_feasible(q):
    prog, x, t = q
    res = line_search(prog, x, t)
    assert prog.S.contains(res.x)
    assert prog.residual(res.x) <= 1e-8
    assert prog.f(res.x) <= res.t + 1e-8 * (1 + abs(res.t))
    assert 0 < res.alpha <= min(res.alpha1, res.alpha2)


@settings(max_examples=150, deadline=None)
@given(catalog_queries(), st.floats(-2, 2))
def test_lifted_identities(q, tau):
    prog, x, t = q
    K = LiftedCone(prog)
    y = lifted_point(prog, x, t)
    lam = K.lambda_min(y)
    assert K.lambda_min(y + tau * K.direction) == pytest.approx(lam + tau, abs=1e-9)
    assert K.direction @ K.supgradient(y) == pytest.approx(1.0, abs=1e-9)
    assert lam == pytest.approx(membership_lambda(K, y), abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(sorted(PROGRAMS)), st.integers(1, 60))
def test_trace_rows_match_iterations(name, iters):
    from radsub.convex import algorithm_a
    rep = algorithm_a(PROGRAMS[name], 0.05, SolverConfig(max_iterations=iters), stop_at_target=False)
    rows = trace_csv(rep).strip().split("\n")
    assert len(rows) == rep.iterations + 2  # header + k = 0..iterations
