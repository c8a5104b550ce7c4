"""Time-varying quadratic tracking costs.

Stage ``t`` costs ``1/2 (x - theta_t)^T Q (x - theta_t) + 1/2 (u - eta_t)^T R (u - eta_t)``
with setpoints held piecewise constant between segment start times.
"""
from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import DimensionError, InfeasibleError
from .optim import ConvexQp, solve_qp
from .report import Report

STEADY_TOL = 1e-9


def _spd(M, size, name):
    M = np.eye(size) if M is None else np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape != (size, size):
        raise DimensionError(f"{name} must be {size}x{size}")
    if np.max(np.abs(M - M.T)) > 1e-12 * max(1.0, np.abs(M).max()):
        raise ValueError(f"{name} must be symmetric")
    M = 0.5 * (M + M.T)
    if np.linalg.eigvalsh(M)[0] <= 0:
        raise ValueError(f"{name} must be positive definite")
    return M


@dataclass(frozen=True)
class StageCost:
    """One revealed stage cost; this is all the controller sees at a time."""

    theta: np.ndarray
    eta: np.ndarray
    Q: np.ndarray
    R: np.ndarray

    def fx(self, x):
        e = np.asarray(x, dtype=float) - self.theta
        return 0.5 * float(e @ self.Q @ e)

    def fu(self, u):
        e = np.asarray(u, dtype=float) - self.eta
        return 0.5 * float(e @ self.R @ e)

    def grad_x(self, x):
        return self.Q @ (np.asarray(x, dtype=float) - self.theta)

    def grad_u(self, u):
        return self.R @ (np.asarray(u, dtype=float) - self.eta)


@dataclass(frozen=True, eq=False)
class CostSchedule:
    """Piecewise-constant setpoint schedule with fixed weights.

    Parameters
    ----------
    t_from : sequence of int
        Increasing segment start times; the first must be 0.
    thetas, etas : array_like
        Setpoint per segment, shapes ``(k, n)`` and ``(k, m)``.
    Q, R : array_like, optional
        Positive definite weights (identity by default).
    horizon : int, optional
        Last valid stage index; ``None`` leaves the schedule open-ended.
    """

    t_from: tuple
    thetas: np.ndarray
    etas: np.ndarray
    Q: np.ndarray = None
    R: np.ndarray = None
    horizon: int = None

    def __post_init__(self):
        t_from = tuple(int(t) for t in self.t_from)
        thetas = np.atleast_2d(np.asarray(self.thetas, dtype=float))
        etas = np.atleast_2d(np.asarray(self.etas, dtype=float))
        if not t_from or t_from[0] != 0 or any(b <= a for a, b in zip(t_from, t_from[1:])):
            raise ValueError("segment start times must increase from 0")
        if len(t_from) != thetas.shape[0] or len(t_from) != etas.shape[0]:
            raise DimensionError("one theta and one eta per segment required")
        object.__setattr__(self, "t_from", t_from)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "etas", etas)
        object.__setattr__(self, "Q", _spd(self.Q, thetas.shape[1], "Q"))
        object.__setattr__(self, "R", _spd(self.R, etas.shape[1], "R"))

    @property
    def n(self):
        return self.thetas.shape[1]

    @property
    def m(self):
        return self.etas.shape[1]

    @property
    def alpha_x(self):
        return float(np.linalg.eigvalsh(self.Q)[0])

    @property
    def l_x(self):
        return float(np.linalg.eigvalsh(self.Q)[-1])

    @property
    def alpha_u(self):
        return float(np.linalg.eigvalsh(self.R)[0])

    @property
    def l_u(self):
        return float(np.linalg.eigvalsh(self.R)[-1])

    def with_horizon(self, horizon):
        keep = [i for i, t in enumerate(self.t_from) if t <= horizon]
        return CostSchedule(tuple(self.t_from[i] for i in keep), self.thetas[keep],
                            self.etas[keep], self.Q, self.R, horizon)

    def _segment(self, t):
        if t < 0 or (self.horizon is not None and t > self.horizon):
            raise IndexError(f"stage {t} outside schedule [0, {self.horizon}]")
        return int(np.searchsorted(self.t_from, t, side="right")) - 1

    def theta(self, t):
        return self.thetas[self._segment(t)]

    def eta(self, t):
        return self.etas[self._segment(t)]

    def stage(self, t):
        k = self._segment(t)
        return StageCost(self.thetas[k], self.etas[k], self.Q, self.R)

    @classmethod
    def from_dict(cls, data, horizon=None):
        segs = sorted(data["segments"], key=lambda s: s["t_from"])
        return cls(
            tuple(s["t_from"] for s in segs),
            np.array([s["theta"] for s in segs], dtype=float),
            np.array([s["eta"] for s in segs], dtype=float),
            data.get("Q"), data.get("R"), horizon,
        )

    def to_dict(self):
        return {
            "segments": [
                {"t_from": t, "theta": th.tolist(), "eta": et.tolist()}
                for t, th, et in zip(self.t_from, self.thetas, self.etas)
            ],
            "Q": self.Q.tolist(),
            "R": self.R.tolist(),
        }


def evaluate(s, t, x, u):
    """Stage cost ``L_t(x, u)``."""
    x = np.asarray(x, dtype=float).ravel()
    u = np.asarray(u, dtype=float).ravel()
    if x.size != s.n or u.size != s.m:
        raise DimensionError("state or input dimension does not match the schedule")
    st = s.stage(t)
    return st.fx(x) + st.fu(u)


def grad_x(s, t, x):
    return s.stage(t).grad_x(x)


def grad_u(s, t, u):
    return s.stage(t).grad_u(u)


@dataclass(frozen=True)
class PathLength:
    state_variation: float
    input_variation: float

    @property
    def total(self):
        return self.state_variation + self.input_variation


def path_length(s, T, theta_prev=None, eta_prev=None):
    """Total setpoint variation over stages ``0..T``.

    ``theta_prev`` and ``eta_prev`` stand in for the setpoints at ``t = -1``;
    when omitted the ``t = 0`` terms vanish.
    """
    if s.horizon is not None and T > s.horizon:
        raise IndexError(f"horizon {T} exceeds schedule horizon {s.horizon}")
    th_prev = s.theta(0) if theta_prev is None else np.asarray(theta_prev, dtype=float)
    et_prev = s.eta(0) if eta_prev is None else np.asarray(eta_prev, dtype=float)
    dx = du = 0.0
    for t in range(T + 1):
        th, et = s.theta(t), s.eta(t)
        dx += float(np.linalg.norm(th - th_prev))
        du += float(np.linalg.norm(et - et_prev))
        th_prev, et_prev = th, et
    return PathLength(dx, du)


def validate(s, sys, Xbar, U, tol=STEADY_TOL):
    """Check curvature constants, steady-state consistency and setpoint feasibility."""
    rep = Report()
    rep.add("curvature constants ordered",
            0 < s.alpha_x <= s.l_x and 0 < s.alpha_u <= s.l_u,
            f"alpha_x={s.alpha_x:.6g} l_x={s.l_x:.6g} alpha_u={s.alpha_u:.6g} l_u={s.l_u:.6g}")
    if s.n != sys.n or s.m != sys.m:
        rep.add("schedule dimensions", False, "setpoint sizes do not match the system")
        return rep
    worst, worst_k = 0.0, None
    bad_x, bad_u = [], []
    for k, (th, et) in enumerate(zip(s.thetas, s.etas)):
        r = float(np.linalg.norm(th - sys.A @ th - sys.B @ et))
        if r > worst:
            worst, worst_k = r, k
        if not geometry.contains(Xbar, th, tol=tol):
            bad_x.append(s.t_from[k])
        if not geometry.contains(U, et, tol=tol):
            bad_u.append(s.t_from[k])
    rep.add("setpoints are steady states", worst <= tol,
            "" if worst <= tol else f"segment starting at t={s.t_from[worst_k]}", worst)
    rep.add("state setpoints inside shrunk set", not bad_x,
            f"violations at t={bad_x}" if bad_x else "")
    rep.add("input setpoints inside input set", not bad_u,
            f"violations at t={bad_u}" if bad_u else "")
    return rep


def nearest_steady_state(sys, Xbar, U, target, tol=1e-10):
    """Steady state ``(theta, eta)`` with ``theta`` closest to ``target``."""
    n, m = sys.n, sys.m
    target = np.asarray(target, dtype=float).ravel()
    H = np.zeros((n + m, n + m))
    H[:n, :n] = np.eye(n)
    q = np.concatenate([-target, np.zeros(m)])
    E = np.hstack([np.eye(n) - sys.A, -sys.B])
    G = np.zeros((Xbar.n_constraints + U.n_constraints, n + m))
    G[:Xbar.n_constraints, :n] = Xbar.C
    G[Xbar.n_constraints:, n:] = U.C
    h = np.concatenate([Xbar.d, U.d])
    try:
        z = solve_qp(ConvexQp(H, q, G, h, E, np.zeros(n)), tol=tol).x
    except InfeasibleError as exc:
        raise InfeasibleError(f"no feasible steady state near target {target.tolist()}") from exc
    return z[:n], z[n:]


def steady_state_schedule(sys, Xbar, U, raw_targets, t_from=None, Q=None, R=None, horizon=None):
    """Schedule whose setpoints are the feasible steady states nearest ``raw_targets``."""
    raw_targets = np.atleast_2d(np.asarray(raw_targets, dtype=float))
    if t_from is None:
        t_from = tuple(range(len(raw_targets)))
    thetas, etas = [], []
    for r in raw_targets:
        th, et = nearest_steady_state(sys, Xbar, U, r)
        thetas.append(th)
        etas.append(et)
    return CostSchedule(tuple(t_from), np.array(thetas), np.array(etas), Q, R, horizon)
