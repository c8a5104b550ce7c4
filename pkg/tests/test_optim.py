import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ogdcontrol.errors import InfeasibleError, UnboundedError
from ogdcontrol.optim import ConvexQp, LinearFeasibilityProblem, solve_feasibility, solve_lp, solve_qp

from oracles import brute_force_qp, random_polytope


def box_rows(n):
    return np.vstack([np.eye(n), -np.eye(n)]), np.ones(2 * n)


def test_feasibility_empty_system():
    z = solve_feasibility(LinearFeasibilityProblem(2))
    np.testing.assert_array_equal(z, np.zeros(2))


def test_feasibility_contradiction():
    with pytest.raises(InfeasibleError):
        solve_feasibility(LinearFeasibilityProblem(1, [[1.0], [-1.0]], [1.0, -2.0]))


def test_feasibility_with_equalities():
    G, h = box_rows(3)
    prob = LinearFeasibilityProblem(3, G, h, [[1.0, 1.0, 1.0]], [2.5])
    z = solve_feasibility(prob)
    ineq, eq = prob.residuals(z)
    assert ineq <= 1e-9 and eq <= 1e-9


def test_feasibility_redundant_equalities():
    prob = LinearFeasibilityProblem(2, *box_rows(2), [[1.0, 1.0], [2.0, 2.0]], [1.0, 2.0])
    z = solve_feasibility(prob)
    assert z.sum() == pytest.approx(1.0)


def test_lp_optimum_and_unbounded():
    G, h = box_rows(2)
    res = solve_lp(np.array([-1.0, -2.0]), LinearFeasibilityProblem(2, G, h))
    np.testing.assert_allclose(res.x, [1.0, 1.0])
    assert res.objective == pytest.approx(-3.0)
    with pytest.raises(UnboundedError):
        solve_lp(np.array([-1.0]), LinearFeasibilityProblem(1, [[-1.0]], [0.0]))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 100_000))
def test_feasibility_replay(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    C, d = random_polytope(rng, n, n + 3)
    x_in = rng.uniform(-0.1, 0.1, size=n)
    k = int(rng.integers(0, n))
    E = rng.normal(size=(k, n))
    prob = LinearFeasibilityProblem(n, C, d, E, E @ x_in)
    ineq, eq = prob.residuals(solve_feasibility(prob))
    assert ineq <= 1e-9 and eq <= 1e-9


def test_feasibility_deterministic():
    rng = np.random.default_rng(0)
    C, d = random_polytope(rng, 3, 6)
    prob = LinearFeasibilityProblem(3, C, d, [[1.0, 0.0, 0.0]], [0.1])
    a, b = solve_feasibility(prob), solve_feasibility(prob)
    assert a.tobytes() == b.tobytes()


def test_qp_examples():
    G, h = box_rows(2)
    res = solve_qp(ConvexQp(np.eye(2), np.zeros(2), G, h))
    np.testing.assert_allclose(res.x, 0.0, atol=1e-12)
    res = solve_qp(ConvexQp(np.eye(2), np.array([-4.0, 0.0]), G, h))
    np.testing.assert_allclose(res.x, [1.0, 0.0], atol=1e-12)
    assert max(res.residuals.values()) <= 1e-9


def test_qp_rejects_bad_hessian():
    with pytest.raises(ValueError):
        ConvexQp(np.array([[1.0, 2.0], [0.0, 1.0]]), np.zeros(2))
    with pytest.raises(ValueError):
        ConvexQp(-np.eye(2), np.zeros(2))


def test_qp_infeasible():
    with pytest.raises(InfeasibleError):
        solve_qp(ConvexQp(np.eye(1), np.zeros(1), [[1.0], [-1.0]], [1.0, -2.0]))


def test_qp_psd_hessian():
    # only the first variable is penalized; the second sits on a linear objective
    H = np.diag([1.0, 0.0])
    G, h = box_rows(2)
    res = solve_qp(ConvexQp(H, np.array([-0.5, 1.0]), G, h))
    np.testing.assert_allclose(res.x, [0.5, -1.0], atol=1e-10)
    assert res.method == "primal"


def test_qp_with_equality():
    G, h = box_rows(3)
    res = solve_qp(ConvexQp(np.eye(3), np.array([-3.0, 0.0, 0.0]), G, h, [[1.0, 1.0, 1.0]], [0.0]))
    np.testing.assert_allclose(res.x, brute_force_qp(np.eye(3), [-3.0, 0.0, 0.0], G, h,
                                                     [[1.0, 1.0, 1.0]], [0.0]), atol=1e-9)


@pytest.mark.parametrize("seed", range(40))
def test_qp_matches_oracle(seed):
    rng = np.random.default_rng(1000 + seed)
    n = int(rng.integers(1, 4))
    C, d = random_polytope(rng, n, int(rng.integers(n + 1, 7)))
    M = rng.normal(size=(n, n))
    H = M @ M.T + 0.1 * np.eye(n)
    q = rng.normal(scale=3.0, size=n)
    res = solve_qp(ConvexQp(H, q, C, d))
    np.testing.assert_allclose(res.x, brute_force_qp(H, q, C, d), atol=1e-7)
    assert max(res.residuals.values()) <= 1e-8


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_qp_beats_random_feasible_points(seed):
    rng = np.random.default_rng(seed)
    n = 3
    C, d = random_polytope(rng, n, 6)
    M = rng.normal(size=(n, n))
    qp = ConvexQp(M @ M.T + 0.05 * np.eye(n), rng.normal(size=n), C, d)
    best = qp.objective(solve_qp(qp).x)
    for _ in range(5):
        z = solve_lp(rng.normal(size=n), qp.feasibility_problem()).x
        assert best <= qp.objective(z) + 1e-10


def test_qp_deterministic():
    rng = np.random.default_rng(5)
    C, d = random_polytope(rng, 3, 6)
    qp = ConvexQp(np.eye(3), rng.normal(scale=4, size=3), C, d)
    assert solve_qp(qp).x.tobytes() == solve_qp(qp).x.tobytes()
