"""Dense convex quadratic programming by active-set methods.

``solve_qp`` handles::

    minimize    1/2 z^T H z + q^T z
    subject to  G z <= h
                E z == f

A strictly convex ``H`` goes to the dual active-set method of Goldfarb and
Idnani, which needs no feasible starting point. A merely positive
semidefinite ``H`` goes to a primal active-set method started from the
phase-1 simplex vertex.
"""
from dataclasses import dataclass

import numpy as np

from ..errors import ConvergenceError, DimensionError, InfeasibleError, UnboundedError
from .simplex import LinearFeasibilityProblem, _as_matrix, solve_feasibility


@dataclass(frozen=True)
class ConvexQp:
    H: np.ndarray
    q: np.ndarray
    G: np.ndarray = None
    h: np.ndarray = None
    E: np.ndarray = None
    f: np.ndarray = None

    def __post_init__(self):
        H = np.atleast_2d(np.asarray(self.H, dtype=float))
        n = H.shape[0]
        if H.shape != (n, n):
            raise DimensionError("H must be square")
        q = np.zeros(n) if self.q is None else np.asarray(self.q, dtype=float).ravel()
        feas = LinearFeasibilityProblem(n, self.G, self.h, self.E, self.f)
        if q.size != n:
            raise DimensionError("q must match H")
        scale = max(1.0, float(np.max(np.abs(H), initial=0.0)))
        if np.max(np.abs(H - H.T), initial=0.0) > 1e-12 * scale:
            raise ValueError("H must be symmetric")
        H = 0.5 * (H + H.T)
        if n and np.linalg.eigvalsh(H)[0] < -1e-10 * scale:
            raise ValueError("H must be positive semidefinite")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "q", q)
        for name in ("G", "h", "E", "f"):
            object.__setattr__(self, name, getattr(feas, name))

    @property
    def dim(self):
        return self.q.size

    def objective(self, z):
        z = np.asarray(z, dtype=float)
        return float(0.5 * z @ self.H @ z + self.q @ z)

    def feasibility_problem(self):
        return LinearFeasibilityProblem(self.dim, self.G, self.h, self.E, self.f)

    def kkt_residuals(self, z, lam, nu):
        """Stationarity, primal, dual and complementarity residuals (inf-norms)."""
        z = np.asarray(z, dtype=float)
        slack = self.G @ z - self.h
        grad = self.H @ z + self.q + self.G.T @ lam + self.E.T @ nu
        return {
            "stationarity": float(np.max(np.abs(grad), initial=0.0)),
            "primal": max(float(np.max(slack, initial=0.0)),
                          float(np.max(np.abs(self.E @ z - self.f), initial=0.0))),
            "dual": float(max(0.0, -np.min(lam, initial=0.0))),
            "complementarity": float(np.max(np.abs(lam * slack), initial=0.0)),
        }


@dataclass
class QpResult:
    x: np.ndarray
    lam: np.ndarray
    nu: np.ndarray
    objective: float
    iterations: int
    active: tuple
    residuals: dict
    method: str


def _kkt_solve(H, N, rhs_top, rhs_bottom):
    k = N.shape[0]
    n = H.shape[0]
    K = np.zeros((n + k, n + k))
    K[:n, :n] = H
    K[:n, n:] = N.T
    K[n:, :n] = N
    sol = np.linalg.solve(K, np.concatenate([rhs_top, rhs_bottom]))
    return sol[:n], sol[n:]


def _dual_active_set(p, tol, max_iter):
    H, q, G, h, E, f = p.H, p.q, p.G, p.h, p.E, p.f
    n, neq = p.dim, E.shape[0]
    active = []
    lam_active = np.zeros(0)

    def rows():
        return np.vstack([E, G[active]]) if active else E

    def refresh():
        x, mult = _kkt_solve(H, rows(), -q, np.concatenate([f, h[active]]))
        return x, mult[:neq], mult[neq:]

    try:
        x, nu, lam_active = refresh()
    except np.linalg.LinAlgError:
        raise InfeasibleError("equality constraints are inconsistent or rank deficient")
    if neq and np.max(np.abs(E @ x - f)) > tol * max(1.0, np.max(np.abs(f))):
        raise InfeasibleError("equality constraints are inconsistent",
                              residual=float(np.max(np.abs(E @ x - f))))

    it = 0
    while True:
        slack = G @ x - h
        if slack.size == 0 or slack.max() <= tol:
            break
        viol = int(np.argmax(slack))
        g_p = G[viol]
        lam_p = 0.0
        while True:
            if it >= max_iter:
                raise ConvergenceError(
                    "dual active-set iteration cap exceeded",
                    {"iterations": it, "max_violation": float(slack.max()),
                     "active": list(active)},
                )
            it += 1
            z, r = _kkt_solve(H, rows(), -g_p, np.zeros(neq + len(active)))
            r_lam = r[neq:]
            curv = float(z @ H @ z)
            s_p = float(g_p @ x - h[viol])
            t_full = s_p / curv if curv > 1e-14 * max(1.0, s_p) else np.inf
            t_part, drop = np.inf, None
            for k, rk in enumerate(r_lam):
                if rk < -1e-14:
                    tk = lam_active[k] / -rk
                    if tk < t_part:
                        t_part, drop = tk, k
            if not np.isfinite(t_full) and drop is None:
                raise InfeasibleError(
                    "inequality constraints are infeasible", residual=s_p)
            t = min(t_full, t_part)
            x = x + t * z
            nu = nu + t * r[:neq]
            lam_active = lam_active + t * r_lam
            lam_p += t
            if t_full <= t_part:
                active.append(viol)
                lam_active = np.append(lam_active, lam_p)
                break
            del active[drop]
            lam_active = np.delete(lam_active, drop)
        # re-solve the reduced KKT system to remove accumulated drift
        x, nu, lam_active = refresh()
        lam_active = np.maximum(lam_active, 0.0)

    lam = np.zeros(G.shape[0])
    lam[active] = lam_active
    return x, lam, nu, it, tuple(active)


def _independent_rows(M, idx, tol=1e-10):
    chosen = []
    for i in idx:
        trial = M[chosen + [i]]
        if np.linalg.matrix_rank(trial, tol=tol * max(1.0, np.abs(trial).max())) == len(chosen) + 1:
            chosen.append(i)
    return chosen


def _null_space(M, n):
    if M.shape[0] == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(M)
    rank = int(np.sum(s > 1e-10 * max(1.0, s.max())))
    return vt[rank:].T


def _primal_active_set(p, tol, max_iter):
    H, q, G, h, E, f = p.H, p.q, p.G, p.h, p.E, p.f
    n, neq = p.dim, E.shape[0]
    x = solve_feasibility(p.feasibility_problem(), tol=tol)
    eq_rows = _independent_rows(E, list(range(neq)))
    candidates = list(np.flatnonzero(np.abs(G @ x - h) <= max(tol, 1e-9)))
    working = []
    for i in candidates:
        trial = np.vstack([E[eq_rows], G[working + [int(i)]]])
        if np.linalg.matrix_rank(trial, tol=1e-10 * max(1.0, np.abs(trial).max())) == trial.shape[0]:
            working.append(int(i))

    it = 0
    while True:
        if it >= max_iter:
            raise ConvergenceError("primal active-set iteration cap exceeded",
                                   {"iterations": it, "working": list(working)})
        it += 1
        W = np.vstack([E[eq_rows], G[working]])
        g = H @ x + q
        Z = _null_space(W, n)
        step = np.zeros(n)
        ray = False
        if Z.shape[1]:
            Hr = Z.T @ H @ Z
            gr = Z.T @ g
            w, V = np.linalg.eigh(Hr)
            scale = max(1.0, float(np.abs(w).max(initial=0.0)))
            pos = w > 1e-10 * scale
            coef = V.T @ gr
            flat = ~pos & (np.abs(coef) > tol)
            if np.any(flat):
                # zero-curvature descent direction
                step = -Z @ (V[:, flat] @ coef[flat])
                ray = True
            else:
                step = -Z @ (V[:, pos] @ (coef[pos] / w[pos]))
        if np.linalg.norm(step) <= tol * max(1.0, np.linalg.norm(x)):
            mult = np.linalg.lstsq(W.T, -g, rcond=None)[0] if W.shape[0] else np.zeros(0)
            lam_w = mult[len(eq_rows):]
            if lam_w.size == 0 or lam_w.min() >= -tol:
                lam = np.zeros(G.shape[0])
                lam[working] = np.maximum(lam_w, 0.0)
                nu = np.zeros(neq)
                nu[eq_rows] = mult[:len(eq_rows)]
                return x, lam, nu, it, tuple(working)
            del working[int(np.argmin(lam_w))]
            continue
        Gs = G @ step
        slack = h - G @ x
        limit, block = (np.inf if ray else 1.0), None
        for i in range(G.shape[0]):
            if i in working or Gs[i] <= 1e-14:
                continue
            ti = max(slack[i], 0.0) / Gs[i]
            if ti < limit:
                limit, block = ti, i
        if not np.isfinite(limit):
            raise UnboundedError("quadratic objective is unbounded below")
        x = x + limit * step
        if block is not None:
            working.append(block)


def solve_qp(p, tol=1e-9, max_iter=1000):
    """Solve the convex QP ``p``; returns a ``QpResult``.

    Raises
    ------
    InfeasibleError
        The constraints admit no point.
    ConvergenceError
        Neither method terminated within ``max_iter`` iterations.
    """
    try:
        np.linalg.cholesky(p.H)
        strict = True
    except np.linalg.LinAlgError:
        strict = False
    if strict and np.linalg.eigvalsh(p.H)[0] > 1e-12 * max(1.0, np.abs(p.H).max()):
        x, lam, nu, it, active = _dual_active_set(p, tol, max_iter)
        method = "dual"
    else:
        x, lam, nu, it, active = _primal_active_set(p, tol, max_iter)
        method = "primal"
    return QpResult(x, lam, nu, p.objective(x), it, active,
                    p.kkt_residuals(x, lam, nu), method)
