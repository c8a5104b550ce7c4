"""Built-in scenarios: the three-state benchmark and small toy problems."""
import numpy as np

from ..geometry import Polytope
from ..system import LtiSystem
from .scenario import Scenario

BENCH_A = np.array([[1.05, 0.7, 1.75], [0.35, 0.7, 1.05], [1.4, 0.105, 1.855]])
BENCH_B = np.array([[1.0], [0.0], [1.0]])
# unit-input steady state, (I - A)^{-1} B
_DIRECTION = np.array([-0.558, -1.081, -0.123])


def benchmark_scenario(horizon=100, levels=(0.5, -0.5, 0.2), switch=(0, 35, 70)):
    """Three-state benchmark with unit quadratic costs and three setpoint levels."""
    segments = [{"t_from": int(t), "target": (lvl * _DIRECTION).tolist()}
                for t, lvl in zip(switch, levels)]
    return Scenario(
        system=LtiSystem(BENCH_A, BENCH_B),
        X0=Polytope.box([3.0, 2.0, 1.0]),
        U=Polytope.box([4.0]),
        controller={"gamma_x": 0.98, "gamma_u": 0.98, "delta": 0.01, "mu": 6},
        costs={"Q": np.eye(3), "R": np.eye(1), "segments": segments},
        x0=np.zeros(3),
        horizon=int(horizon),
        derive={"template": "canonical", "mu_max": 8},
        name="three-state benchmark",
    )


def integrator_scenario(horizon=50, target=0.5, gamma=0.9):
    """Scalar integrator ``x+ = x + u`` on ``[-1, 1]`` with a constant setpoint."""
    return Scenario(
        system=LtiSystem([[1.0]], [[1.0]]),
        X0=Polytope.box([1.0]),
        U=Polytope.box([1.0]),
        controller={"gamma_x": gamma, "gamma_u": gamma, "delta": 0.05},
        costs={"Q": [[1.0]], "R": [[1.0]],
               "segments": [{"t_from": 0, "theta": [target], "eta": [0.0]}]},
        x0=np.zeros(1),
        horizon=int(horizon),
        name="scalar integrator",
    )


def stable_scalar_scenario(horizon=400, a=0.5, target=0.4, gamma=0.9):
    """Stable scalar system with a constant steady-state setpoint."""
    eta = (1.0 - a) * target
    return Scenario(
        system=LtiSystem([[a]], [[1.0]]),
        X0=Polytope.box([1.0]),
        U=Polytope.box([1.0]),
        controller={"gamma_x": gamma, "gamma_u": gamma, "delta": 0.05},
        costs={"Q": [[1.0]], "R": [[1.0]],
               "segments": [{"t_from": 0, "theta": [target], "eta": [eta]}]},
        x0=np.zeros(1),
        horizon=int(horizon),
        name="stable scalar",
    )
