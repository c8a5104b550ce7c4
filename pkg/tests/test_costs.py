import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ogdcontrol import costs, geometry
from ogdcontrol.costs import CostSchedule
from ogdcontrol.errors import InfeasibleError
from ogdcontrol.geometry import Polytope
from ogdcontrol.harness.builtin import BENCH_A, BENCH_B
from ogdcontrol.system import LtiSystem

from oracles import central_difference, naive_quadratic

BENCH = LtiSystem(BENCH_A, BENCH_B)


def schedule_3d(Q=None, R=None):
    theta = np.array([0.1, -0.2, 0.3])
    return CostSchedule((0,), theta[None, :], np.array([[0.5]]), Q, R)


def test_eval_examples():
    s = schedule_3d()
    assert costs.evaluate(s, 0, s.theta(0), s.eta(0)) == 0.0
    assert costs.evaluate(s, 0, s.theta(0) + [1.0, 0.0, 0.0], s.eta(0)) == pytest.approx(0.5)


@pytest.mark.parametrize("seed", range(8))
def test_eval_matches_naive_quadratic(seed):
    rng = np.random.default_rng(seed)
    M, N = rng.normal(size=(3, 3)), rng.normal(size=(1, 1))
    Q, R = M @ M.T + np.eye(3), N @ N.T + 0.5
    s = schedule_3d(Q, R)
    x, u = rng.normal(size=3), rng.normal(size=1)
    expected = naive_quadratic(Q, x - s.theta(0)) + naive_quadratic(R, u - s.eta(0))
    assert costs.evaluate(s, 0, x, u) == pytest.approx(expected, rel=1e-13)


def test_gradient_examples():
    s = schedule_3d()
    np.testing.assert_array_equal(costs.grad_x(s, 0, s.theta(0)), np.zeros(3))
    v = np.array([0.3, -1.0, 2.0])
    np.testing.assert_allclose(costs.grad_x(s, 0, s.theta(0) + v), v)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(3, 3))
    s = schedule_3d(M @ M.T + np.eye(3), [[2.0]])
    x, u = rng.normal(size=3), rng.normal(size=1)
    gx = central_difference(lambda z: costs.evaluate(s, 0, z, u), x)
    gu = central_difference(lambda z: costs.evaluate(s, 0, x, z), u)
    np.testing.assert_allclose(costs.grad_x(s, 0, x), gx, rtol=1e-6, atol=1e-8)
    np.testing.assert_allclose(costs.grad_u(s, 0, u), gu, rtol=1e-6, atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_strong_convexity_and_smoothness(seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(3, 3))
    s = schedule_3d(M @ M.T + 0.2 * np.eye(3))
    st_ = s.stage(0)
    x, y = rng.normal(size=3), rng.normal(size=3)
    gap = st_.fx(x) - st_.fx(y) - st_.grad_x(y) @ (x - y)
    r2 = np.sum((x - y) ** 2)
    assert s.alpha_x * r2 / 2 - 1e-10 <= gap <= s.l_x * r2 / 2 + 1e-10


def test_schedule_segments_and_range():
    s = CostSchedule((0, 3), np.array([[0.0], [1.0]]), np.array([[0.0], [0.5]]), horizon=5)
    assert s.theta(2)[0] == 0.0 and s.theta(3)[0] == 1.0 and s.theta(5)[0] == 1.0
    with pytest.raises(IndexError):
        s.theta(6)
    with pytest.raises(IndexError):
        s.theta(-1)


def test_non_spd_weights_rejected():
    with pytest.raises(ValueError):
        schedule_3d(Q=-np.eye(3))


def test_path_length_examples():
    const = CostSchedule((0,), np.array([[0.2]]), np.array([[0.1]]))
    pl = costs.path_length(const, 10, [0.2], [0.1])
    assert (pl.state_variation, pl.input_variation) == (0.0, 0.0)

    alt = CostSchedule((0, 1, 2, 3, 4), np.array([[1.0], [0.0], [1.0], [0.0], [1.0]]),
                       np.zeros((5, 1)))
    assert costs.path_length(alt, 4, [1.0]).state_variation == pytest.approx(4.0)

    jump = CostSchedule((0, 5), np.array([[0.0, 0.0], [2.0, 0.0]]), np.array([[0.0], [0.3]]))
    pl = costs.path_length(jump, 9)
    assert pl.state_variation == pytest.approx(2.0)
    assert pl.input_variation == pytest.approx(0.3)


def test_path_length_concatenation():
    s = CostSchedule((0, 2, 5), np.array([[0.0], [1.0], [-1.0]]), np.array([[0.0], [0.2], [0.4]]))
    whole = costs.path_length(s, 8)
    # splitting at t = 4: the second part starts from the setpoint at t = 3
    first = costs.path_length(s, 3)
    tail = sum(abs(s.theta(t)[0] - s.theta(t - 1)[0]) for t in range(4, 9))
    assert whole.state_variation == pytest.approx(first.state_variation + tail)


def test_path_length_beyond_horizon():
    s = CostSchedule((0,), np.array([[0.0]]), np.array([[0.0]]), horizon=3)
    with pytest.raises(IndexError):
        costs.path_length(s, 4)


def test_validate_reports_violations():
    sys_ = LtiSystem([[0.5]], [[1.0]])
    Xbar, U = Polytope.box([0.9]), Polytope.box([1.0])
    good = CostSchedule((0,), np.array([[0.4]]), np.array([[0.2]]))
    assert costs.validate(good, sys_, Xbar, U).passed
    outside = CostSchedule((0, 7), np.array([[0.4], [1.2]]), np.array([[0.2], [0.6]]))
    rep = costs.validate(outside, sys_, Xbar, U)
    bad = [c for c in rep.checks if not c.passed]
    assert len(bad) == 1 and "t=[7]" in bad[0].detail
    off = CostSchedule((0,), np.array([[0.4]]), np.array([[0.3]]))
    rep = costs.validate(off, sys_, Xbar, U)
    assert not rep.passed
    steady = [c for c in rep.checks if c.name == "setpoints are steady states"][0]
    assert steady.residual == pytest.approx(0.1)


def test_nearest_steady_state_examples():
    sys_ = LtiSystem([[0.5]], [[1.0]])
    Xbar, U = Polytope.box([0.9]), Polytope.box([1.0])
    th, et = costs.nearest_steady_state(sys_, Xbar, U, [0.4])
    np.testing.assert_allclose([th[0], et[0]], [0.4, 0.2], atol=1e-10)

    zero = LtiSystem(np.zeros((2, 2)), np.eye(2))
    th, et = costs.nearest_steady_state(zero, Polytope.box([0.5, 0.5]), Polytope.box([1.0, 1.0]),
                                        [0.3, 0.9])
    np.testing.assert_allclose(th, [0.3, 0.5], atol=1e-10)
    np.testing.assert_allclose(et, th, atol=1e-10)


def test_nearest_steady_state_benchmark_oracle():
    # steady states form the line s * (d, 1) with d = (I - A)^{-1} B
    Xbar = geometry.shrink(Polytope.box([1.0, 1.0, 1.0]), 0.01)
    U = Polytope.box([4.0])
    d = np.linalg.lstsq(np.eye(3) - BENCH_A, BENCH_B[:, 0], rcond=None)[0]
    s_max = min(0.99 / np.max(np.abs(d)), 4.0)
    for target in ([0.5, 1.0, 0.1], [-3.0, -3.0, 0.0], [0.0, 0.0, 0.0]):
        s_star = float(np.clip(d @ np.asarray(target) / (d @ d), -s_max, s_max))
        th, et = costs.nearest_steady_state(BENCH, Xbar, U, target)
        np.testing.assert_allclose(th, s_star * d, atol=1e-8)
        np.testing.assert_allclose(et, [s_star], atol=1e-8)


def test_nearest_steady_state_infeasible():
    sys_ = LtiSystem([[0.5]], [[1.0]])
    # the only steady states need |eta| = |theta| / 2 <= 0.01 while theta >= 0.5
    Xbar = Polytope([[1.0], [-1.0]], [0.9, -0.5])
    with pytest.raises(InfeasibleError):
        costs.nearest_steady_state(sys_, Xbar, Polytope.box([0.01]), [0.7])


def test_steady_state_schedule_validates():
    Xbar = geometry.shrink(Polytope.box([1.0, 1.0, 1.0]), 0.01)
    U = Polytope.box([4.0])
    s = costs.steady_state_schedule(BENCH, Xbar, U, [[0.3, 0.5, 0.0], [-1.0, 0.0, 0.0]],
                                    t_from=(0, 10))
    assert costs.validate(s, BENCH, Xbar, U).passed


def test_schedule_dict_round_trip():
    s = CostSchedule((0, 4), np.array([[0.0], [1.0]]), np.array([[0.0], [0.5]]), [[2.0]], [[1.0]])
    again = CostSchedule.from_dict(s.to_dict())
    assert again.t_from == s.t_from
    np.testing.assert_array_equal(again.thetas, s.thetas)
    np.testing.assert_array_equal(again.Q, s.Q)
