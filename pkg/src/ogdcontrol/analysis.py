"""Hindsight benchmark, dynamic regret and the explicit regret-bound constants."""
from dataclasses import asdict, dataclass, field

import numpy as np

from . import geometry
from .costs import path_length
from .errors import AssumptionError, DimensionError
from .optim import ConvexQp, solve_qp
from .system import matrix_norm, reach_matrix, spectral_norm


@dataclass
class HindsightSolution:
    x_star: np.ndarray
    u_star: np.ndarray
    optimal_cost: float
    kkt: dict = field(default_factory=dict)
    dynamics_residual: float = 0.0


def hindsight_qp(sys, X, U, costs, x0, T):
    """Stacked QP over ``z = (x_0..x_T, u_0..u_T)`` and the constant cost offset."""
    n, m = sys.n, sys.m
    nx, nu = (T + 1) * n, (T + 1) * m
    N = nx + nu
    H = np.zeros((N, N))
    q = np.zeros(N)
    offset = 0.0
    for t in range(T + 1):
        st = costs.stage(t)
        xs, us = slice(t * n, (t + 1) * n), slice(nx + t * m, nx + (t + 1) * m)
        H[xs, xs] = st.Q
        H[us, us] = st.R
        q[xs] = -st.Q @ st.theta
        q[us] = -st.R @ st.eta
        offset += 0.5 * st.theta @ st.Q @ st.theta + 0.5 * st.eta @ st.R @ st.eta
    E = np.zeros(((T + 1) * n, N))
    f = np.zeros((T + 1) * n)
    E[:n, :n] = np.eye(n)
    f[:n] = x0
    for t in range(T):
        r = slice((t + 1) * n, (t + 2) * n)
        E[r, (t + 1) * n:(t + 2) * n] = np.eye(n)
        E[r, t * n:(t + 1) * n] = -sys.A
        E[r, nx + t * m:nx + (t + 1) * m] = -sys.B
    cx, cu = X.n_constraints, U.n_constraints
    G = np.zeros((T * cx + (T + 1) * cu, N))
    h = np.zeros(G.shape[0])
    for t in range(1, T + 1):
        G[(t - 1) * cx:t * cx, t * n:(t + 1) * n] = X.C
        h[(t - 1) * cx:t * cx] = X.d
    base = T * cx
    for t in range(T + 1):
        G[base + t * cu:base + (t + 1) * cu, nx + t * m:nx + (t + 1) * m] = U.C
        h[base + t * cu:base + (t + 1) * cu] = U.d
    return ConvexQp(H, q, G, h, E, f), offset


def hindsight_optimum(sys, X, U, costs, x0, T, tol=1e-10):
    """Constrained trajectory minimizing ``sum_{t=0}^T L_t`` with all costs known."""
    x0 = np.asarray(x0, dtype=float).ravel()
    qp, offset = hindsight_qp(sys, X, U, costs, x0, T)
    res = solve_qp(qp, tol=tol, max_iter=20 * qp.G.shape[0] + 100)
    n, m = sys.n, sys.m
    nx = (T + 1) * n
    xs = res.x[:nx].reshape(T + 1, n)
    us = res.x[nx:].reshape(T + 1, m)
    xs[0] = x0
    dyn = max((float(np.max(np.abs(xs[t + 1] - sys.A @ xs[t] - sys.B @ us[t])))
               for t in range(T)), default=0.0)
    total = sum(costs.stage(t).fx(xs[t]) + costs.stage(t).fu(us[t]) for t in range(T + 1))
    return HindsightSolution(xs, us, float(total), res.residuals, dyn)


@dataclass
class TheoremConstants:
    mu: int
    delta: float
    kappa_x: float
    kappa_u: float
    D_x: float
    D_u: float
    L_x: float
    L_u: float
    S_c_norm: float
    A_norm: float
    B_norm: float
    C1: float
    C2: float
    C3: float
    C3_alt: float
    C0: float
    C_theta: float
    C_eta: float

    def as_dict(self):
        return asdict(self)


def lipschitz_constants(X, U, costs):
    """Largest gradient norms of the stage costs over ``X`` and ``U``.

    The gradient norm is convex in the point, so vertices suffice.
    """
    VX, VU = geometry.vertices(X), geometry.vertices(U)
    L_x = max(float(np.max(np.linalg.norm((VX - th) @ costs.Q.T, axis=1))) for th in costs.thetas)
    L_u = max(float(np.max(np.linalg.norm((VU - et) @ costs.R.T, axis=1))) for et in costs.etas)
    return L_x, L_u


def theorem_constants(sys, X, U, cfg, costs):
    """All constants of the regret bound and the prediction-error bound.

    Two readings of ``C3`` exist (denominator ``1 - kappa_x`` or
    ``1 - ||A|| kappa_x``); both are reported and the larger enters ``C_theta``.
    """
    mu, delta = int(cfg.mu), float(cfg.delta)
    kx, ku = cfg.kappa_x(costs), cfg.kappa_u(costs)
    if not (0.0 <= kx < 1.0 and 0.0 <= ku < 1.0):
        raise AssumptionError(f"contraction factors outside [0, 1): kappa_x={kx}, kappa_u={ku}")
    a = spectral_norm(sys)
    b = matrix_norm(sys.B)
    s = matrix_norm(reach_matrix(sys, mu))
    if a * kx >= 1.0:
        raise AssumptionError(
            f"step size gamma_x={cfg.gamma_x} gives ||A|| kappa_x = {a * kx:.6g} >= 1")
    D_x, D_u = geometry.diameter(X), geometry.diameter(U)
    L_x, L_u = lipschitz_constants(X, U, costs)
    one_a = 1.0 - a * kx
    C1 = D_u * (2 * mu - 1) * (1 + kx) * s / (delta * one_a)
    C2 = (ku * b * (1 + kx) * mu * D_u / (delta * (1 - ku) * one_a)
          + ku / (1 - ku) + mu)
    C3 = a * (1 + kx) * mu * D_u / (delta * one_a)
    C3_alt = a * (1 + kx) * mu * D_u / (delta * (1 - kx))
    C0 = L_x * mu * D_x
    C_eta = (L_u * C2 + L_x * b * ku / (one_a * (1 - ku))
             + L_x * ku * mu / (1 - ku) * (s + C1 * b))
    C_theta = L_x * mu * C1 * a + L_x * a / one_a + L_x * (mu + 1) + L_u * max(C3, C3_alt)
    return TheoremConstants(mu, delta, kx, ku, D_x, D_u, L_x, L_u, s, a, b,
                            C1, C2, C3, C3_alt, C0, C_theta, C_eta)


def convention_path_length(trace, costs):
    """Path length with ``theta_{-1} = x_hat_mu`` and ``eta_{-1} = v_0``."""
    d0 = trace.diagnostics[0]
    return path_length(costs, trace.horizon, d0.x_hat, d0.v)


def prediction_error_sum(trace):
    """``sum_{t=0}^{T-mu} ||x_hat_{t+mu} - x_{t+mu}||`` from recorded predictions."""
    if not trace.diagnostics:
        raise ValueError("trace carries no diagnostics")
    mu, T = trace.mu, trace.horizon
    return float(sum(np.linalg.norm(trace.diagnostics[t].x_hat - trace.xs[t + mu])
                     for t in range(0, T - mu + 1)))


def prediction_error_bound(constants, path):
    c = constants
    return (c.mu * c.C1 * c.A_norm * path.state_variation
            + c.kappa_u * c.mu / (1 - c.kappa_u) * (c.S_c_norm + c.C1 * c.B_norm)
            * path.input_variation)


def regret_bound(constants, path):
    return constants.C0 + constants.C_theta * path.state_variation \
        + constants.C_eta * path.input_variation


@dataclass
class RegretReport:
    regret: float
    path: object
    path_plain: object
    bound_value: float
    bound_satisfied: bool
    per_step_gap: np.ndarray
    constants: TheoremConstants
    prediction_error: float
    prediction_bound: float
    prediction_bound_satisfied: bool

    def summary(self):
        out = {
            "regret": self.regret,
            "state_variation": self.path.state_variation,
            "input_variation": self.path.input_variation,
            "state_variation_plain": self.path_plain.state_variation,
            "input_variation_plain": self.path_plain.input_variation,
            "bound_value": self.bound_value,
            "bound_satisfied": self.bound_satisfied,
            "prediction_error_sum": self.prediction_error,
            "prediction_bound": self.prediction_bound,
            "prediction_bound_satisfied": self.prediction_bound_satisfied,
        }
        out.update({f"constant_{k}": v for k, v in self.constants.as_dict().items()})
        return out


def regret(trace, hindsight, costs, constants):
    """Dynamic regret of ``trace`` against ``hindsight`` and the bound check."""
    T = trace.horizon
    if hindsight.x_star.shape[0] != T + 1:
        raise DimensionError("trace and hindsight solution cover different horizons")
    gaps = np.array([
        trace.costs[t]
        - costs.stage(t).fx(hindsight.x_star[t]) - costs.stage(t).fu(hindsight.u_star[t])
        for t in range(T + 1)
    ])
    total = float(gaps.sum())
    path = convention_path_length(trace, costs)
    plain = path_length(costs, T)
    bound = regret_bound(constants, path)
    pred = prediction_error_sum(trace)
    pred_bound = prediction_error_bound(constants, path)
    return RegretReport(total, path, plain, float(bound), bool(total <= bound), gaps,
                        constants, pred, float(pred_bound), bool(pred <= pred_bound))


def _alpha_bar(alphas, i, j):
    if i > j:
        return 1.0
    return float(np.prod(1.0 - alphas[i:j + 1]))


def convex_combination_residuals(alphas, span):
    """Residuals of ``abar^tau_{tau+s} + sum_j abar^{tau+1+j}_{tau+s} alpha_{tau+j} = 1``."""
    alphas = np.asarray(alphas, dtype=float)
    out = []
    for tau in range(len(alphas) - span + 1):
        s = span - 1
        total = _alpha_bar(alphas, tau, tau + s)
        for j in range(s + 1):
            total += _alpha_bar(alphas, tau + 1 + j, tau + s) * alphas[tau + j]
        out.append(abs(total - 1.0))
    return np.array(out)


def input_recursion_residuals(trace):
    """Residuals reconstructing ``u_{t+mu-1}`` from ``v_t``, the ``alpha``'s and ``g``'s."""
    mu, T = trace.mu, trace.horizon
    diags = trace.diagnostics
    alphas = np.array([d.alpha for d in diags])
    out = []
    for t in range(1, T - mu + 2):
        last = t + mu - 1
        u = _alpha_bar(alphas, t, last) * diags[t].v
        for j in range(mu):
            d = diags[t + j]
            if d.g is not None and d.alpha != 0.0:
                u = u + _alpha_bar(alphas, t + 1 + j, last) * d.alpha * d.g[mu - j - 1]
        out.append(float(np.linalg.norm(u - trace.us[last])))
    return np.array(out)
