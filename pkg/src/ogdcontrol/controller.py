"""Online gradient descent controller for constrained linear systems.

Each call to :meth:`OgdController.step` receives the measured state and the
stage cost revealed at the previous time instant, and returns the input to
apply. Internally the controller keeps a predicted input sequence over a
horizon of ``mu`` steps that is feasible by construction: it always keeps the
states in ``X``, the inputs in ``U`` and ends in the shrunk set ``Xbar``.
"""
import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np

from . import geometry
from .costs import evaluate
from .errors import AssumptionError, InfeasibleError
from .optim import solve_feasibility
from .system import horizon_program, reach_matrix, simulate, spectral_norm, stack

ZERO_THRESHOLD = 1e-12


@dataclass(frozen=True)
class ControllerConfig:
    """Step sizes, shrink margin and prediction horizon.

    ``gamma_u`` is the input step size (written ``gamma_v`` in some sources).
    """

    gamma_x: float
    gamma_u: float
    delta: float
    mu: int
    zero_threshold: float = ZERO_THRESHOLD

    def __post_init__(self):
        if self.gamma_x <= 0 or self.gamma_u <= 0:
            raise ValueError("step sizes must be positive")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if int(self.mu) != self.mu or self.mu < 1:
            raise ValueError("mu must be a positive integer")

    def kappa_x(self, costs):
        return 1.0 - costs.alpha_x * self.gamma_x

    def kappa_u(self, costs):
        return 1.0 - costs.alpha_u * self.gamma_u

    def step_size_window(self, sys, costs):
        """Admissible step-size intervals as ``(lower_x, upper_x, upper_u)``.

        The lower bound on ``gamma_x`` only binds when ``||A|| > 1``.
        """
        a_norm = spectral_norm(sys)
        lower = (a_norm - 1.0) / (a_norm * costs.alpha_x) if a_norm > 1.0 else 0.0
        return lower, 2.0 / (costs.l_x + costs.alpha_x), 2.0 / (costs.l_u + costs.alpha_u)

    def in_window(self, sys, costs):
        lower, upper_x, upper_u = self.step_size_window(sys, costs)
        tight = 1e-12
        return (lower < self.gamma_x <= upper_x * (1 + tight)
                and self.gamma_u <= upper_u * (1 + tight))


@dataclass(frozen=True)
class ControllerState:
    """Rolling memory: input iterate ``v`` and predicted sequence ``u_hat``."""

    v: np.ndarray
    u_hat: np.ndarray
    t: int


@dataclass(frozen=True)
class StepDiagnostics:
    t: int
    v: np.ndarray
    v_hat: np.ndarray
    x_hat: np.ndarray
    x_pi: np.ndarray
    delta_bar: float
    alpha: float
    g: np.ndarray
    u_hat: np.ndarray
    u_applied: np.ndarray
    identity_residual: float


class ProgramInfeasibleError(AssumptionError):
    """The steering program has no solution although the assumptions were certified."""

    def __init__(self, message, instance=None):
        super().__init__(message)
        self.instance = instance


class OgdController:
    """Online gradient descent controller.

    Parameters
    ----------
    sys : LtiSystem
    X, Xbar, U : Polytope
        State set, its ``delta``-shrunk copy and the input set.
    cfg : ControllerConfig
    tol : float
        Feasibility tolerance for measurements and the steering program.
    """

    def __init__(self, sys, X, Xbar, U, cfg, tol=1e-9):
        self.sys = sys
        self.X = X
        self.Xbar = Xbar
        self.U = U
        self.cfg = cfg
        self.tol = tol
        self.mu = int(cfg.mu)
        self.S_c = reach_matrix(sys, self.mu)
        self.A_mu = np.linalg.matrix_power(sys.A, self.mu)

    def predict(self, x, seq):
        return self.A_mu @ x + self.S_c @ stack(seq)

    def sequence_is_feasible(self, x, seq, tol=1e-8):
        states = simulate(self.sys, x, seq)
        ok_u = all(geometry.contains(self.U, u, tol) for u in seq)
        ok_x = all(geometry.contains(self.X, s, tol) for s in states[1:])
        return ok_u and ok_x and geometry.contains(self.Xbar, states[-1], tol)

    def initialize(self, x0, u_hat0=None, v0=None):
        """Initial state and the diagnostics of the ``t = 0`` prediction.

        Without ``u_hat0`` the phase-1 vertex of the program "stay in ``X``,
        end in ``Xbar``" is used; the origin is returned whenever it is feasible.
        """
        x0 = np.asarray(x0, dtype=float).ravel()
        m = self.sys.m
        if not geometry.contains(self.X, x0, self.tol):
            raise AssumptionError("initial state lies outside the state constraint set")
        if u_hat0 is None:
            prob = horizon_program(self.sys, self.X, self.U, x0, self.mu, terminal_set=self.Xbar)
            try:
                u_hat0 = solve_feasibility(prob, tol=self.tol).reshape(self.mu, m)
            except InfeasibleError as exc:
                raise AssumptionError(
                    "no feasible initial input sequence from x0") from exc
        u_hat0 = np.asarray(u_hat0, dtype=float).reshape(self.mu, m)
        if not self.sequence_is_feasible(x0, u_hat0):
            raise AssumptionError("initial input sequence is not feasible")
        v0 = np.zeros(m) if v0 is None else np.asarray(v0, dtype=float).ravel()
        if not geometry.contains(self.U, v0, self.tol):
            raise AssumptionError("initial input iterate lies outside the input set")
        x_hat = self.predict(x0, u_hat0)
        diag = StepDiagnostics(0, v0, u_hat0, x_hat, x_hat, 0.0, 0.0, None, u_hat0,
                               u_hat0[0].copy(), 0.0)
        return ControllerState(v0, u_hat0, 0), diag

    def step(self, state, x_t, cost):
        """One control update from measured ``x_t`` with the previous stage ``cost``.

        Returns ``(u_t, new_state, diagnostics)``.
        """
        cfg = self.cfg
        x_t = np.asarray(x_t, dtype=float).ravel()
        t = state.t + 1
        if not geometry.contains(self.X, x_t, self.tol):
            raise AssumptionError(f"measured state at t={t} lies outside X")

        v = geometry.project(self.U, state.v - cfg.gamma_u * cost.grad_u(state.v))
        v_hat = np.vstack([state.u_hat[1:], v[None, :]])
        x_hat = self.predict(x_t, v_hat)
        x_pi = geometry.project(self.Xbar, x_hat - cfg.gamma_x * cost.grad_x(x_hat))

        gap = float(np.linalg.norm(x_hat - x_pi))
        if gap <= cfg.zero_threshold:
            alpha, delta_bar, g = 0.0, 0.0, None
            u_hat = v_hat
        else:
            delta_bar = cfg.delta / gap
            alpha = 1.0 / (1.0 + delta_bar)
            target = x_pi + delta_bar * (x_pi - x_hat)
            prob = horizon_program(self.sys, self.X, self.U, x_t, self.mu, target=target)
            try:
                g = solve_feasibility(prob, tol=self.tol).reshape(self.mu, self.sys.m)
            except InfeasibleError as exc:
                raise ProgramInfeasibleError(
                    f"steering program infeasible at t={t}: x_t={x_t.tolist()}, "
                    f"target={target.tolist()}", instance=prob) from exc
            u_hat = (1.0 - alpha) * v_hat + alpha * g

        u = u_hat[0].copy()
        residual = float(np.linalg.norm(self.predict(x_t, u_hat) - x_pi))
        diag = StepDiagnostics(t, v, v_hat, x_hat, x_pi, delta_bar, alpha, g, u_hat, u, residual)
        return u, ControllerState(v, u_hat, t), diag


@dataclass
class Trace:
    """Closed-loop record over stages ``0..T``."""

    xs: np.ndarray
    us: np.ndarray
    costs: np.ndarray
    diagnostics: list = field(default_factory=list)
    mu: int = 1

    @property
    def horizon(self):
        return self.xs.shape[0] - 1

    def total_cost(self):
        return float(self.costs.sum())

    def recursion_residuals(self, sys):
        """``||x_hat_{t+mu} - (A x_pi_{t+mu-1} + B v_t)||`` for ``t >= 1``."""
        out = []
        for prev, cur in zip(self.diagnostics, self.diagnostics[1:]):
            out.append(float(np.linalg.norm(cur.x_hat - (sys.A @ prev.x_pi + sys.B @ cur.v))))
        return np.array(out)

    def identity_residuals(self):
        return np.array([d.identity_residual for d in self.diagnostics])

    def to_csv(self, sys=None):
        n, m = self.xs.shape[1], self.us.shape[1]
        rec = np.concatenate([[np.nan], self.recursion_residuals(sys)]) if sys is not None \
            else np.full(self.horizon + 1, np.nan)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t"] + [f"x{i + 1}" for i in range(n)] + [f"u{i + 1}" for i in range(m)]
                   + ["cost", "alpha", "delta_bar", "identity_residual", "recursion_residual"])
        for t in range(self.horizon + 1):
            d = self.diagnostics[t]
            row = [t] + [repr(float(v)) for v in self.xs[t]] + [repr(float(v)) for v in self.us[t]]
            row += [repr(float(self.costs[t])), repr(float(d.alpha)), repr(float(d.delta_bar)),
                    repr(float(d.identity_residual)), repr(float(rec[t]))]
            w.writerow(row)
        return buf.getvalue()


def run(controller, schedule, x0, T, u_hat0=None, v0=None):
    """Simulate the closed loop for ``T`` steps.

    Stage ``t``'s cost is handed to the controller only at time ``t + 1``.
    """
    sys = controller.sys
    x = np.asarray(x0, dtype=float).ravel()
    state, diag = controller.initialize(x, u_hat0, v0)
    xs, us, diags = [x], [diag.u_applied], [diag]
    for t in range(1, T + 1):
        x = sys.A @ x + sys.B @ us[-1]
        u, state, diag = controller.step(state, x, schedule.stage(t - 1))
        xs.append(x)
        us.append(u)
        diags.append(diag)
    xs, us = np.array(xs), np.array(us)
    costs = np.array([evaluate(schedule, t, xs[t], us[t]) for t in range(T + 1)])
    return Trace(xs, us, costs, diags, controller.mu)


def with_config(controller, **changes):
    """Copy of ``controller`` with some configuration fields replaced."""
    cfg = replace(controller.cfg, **changes)
    return OgdController(controller.sys, controller.X, controller.Xbar, controller.U, cfg,
                         controller.tol)
