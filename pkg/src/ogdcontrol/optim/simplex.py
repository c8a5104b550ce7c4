"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Problems are stated over free variables ``z``::

    minimize    c^T z
    subject to  G z <= h
                E z == f

Free variables are split as ``z = z_plus - z_minus`` and inequalities get
slacks, giving the standard form ``A y = b, y >= 0`` the tableau works on.
Rows with a nonnegative right-hand side start with their slack in the basis;
every other row receives an artificial variable for phase 1.
"""
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConvergenceError, DimensionError, InfeasibleError, UnboundedError

PIVOT_TOL = 1e-9


def _as_matrix(M, ncols):
    if M is None:
        return np.zeros((0, ncols))
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return np.zeros((0, ncols))
    return M


@dataclass(frozen=True)
class LinearFeasibilityProblem:
    """Linear system ``G z <= h``, ``E z == f`` in ``dim`` free variables."""

    dim: int
    G: np.ndarray = None
    h: np.ndarray = None
    E: np.ndarray = None
    f: np.ndarray = None

    def __post_init__(self):
        G = _as_matrix(self.G, self.dim)
        E = _as_matrix(self.E, self.dim)
        h = np.zeros(0) if self.h is None else np.asarray(self.h, dtype=float).ravel()
        f = np.zeros(0) if self.f is None else np.asarray(self.f, dtype=float).ravel()
        if G.shape[1] != self.dim or E.shape[1] != self.dim:
            raise DimensionError("constraint matrices must have dim columns")
        if G.shape[0] != h.size or E.shape[0] != f.size:
            raise DimensionError("right-hand sides do not match constraint rows")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "f", f)

    def residuals(self, z):
        """Worst inequality violation and worst equality mismatch at ``z``."""
        z = np.asarray(z, dtype=float)
        ineq = float(np.max(self.G @ z - self.h, initial=0.0))
        eq = float(np.max(np.abs(self.E @ z - self.f), initial=0.0))
        return ineq, eq


@dataclass
class LpResult:
    x: np.ndarray
    objective: float
    iterations: int
    phase1_objective: float
    basis: list = field(default_factory=list)


def _pivot(T, row, col):
    T[row] /= T[row, col]
    others = np.flatnonzero(T[:, col])
    others = others[others != row]
    if others.size:
        T[others] -= np.outer(T[others, col], T[row])


def _iterate(T, basis, ncols, tol, max_iter, it):
    """Run Bland pivots on tableau ``T`` (objective in the last row).

    Returns the status string and the updated iteration counter.
    """
    while True:
        reduced = T[-1, :ncols]
        entering = np.flatnonzero(reduced < -tol)
        if entering.size == 0:
            return "optimal", it
        if it >= max_iter:
            raise ConvergenceError(
                "simplex iteration cap exceeded",
                {"iterations": it, "min_reduced_cost": float(reduced.min())},
            )
        j = int(entering[0])
        column = T[:-1, j]
        rows = np.flatnonzero(column > PIVOT_TOL)
        if rows.size == 0:
            return "unbounded", it
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        i = int(ties[np.argmin([basis[r] for r in ties])])
        _pivot(T, i, j)
        basis[i] = j
        it += 1


def solve_lp(c, problem, tol=1e-9, max_iter=None):
    """Minimize ``c^T z`` over ``problem``.

    Raises
    ------
    InfeasibleError
        Phase 1 ends with a positive sum of artificials.
    UnboundedError
        Phase 2 finds an improving ray.
    ConvergenceError
        The iteration cap is reached.
    """
    n = problem.dim
    c = np.zeros(n) if c is None else np.asarray(c, dtype=float).ravel()
    if c.size != n:
        raise DimensionError("objective length must equal problem dim")
    G, h, E, f = problem.G, problem.h, problem.E, problem.f
    p, q = G.shape[0], E.shape[0]
    m = p + q
    if m == 0:
        if np.any(c != 0):
            raise UnboundedError("nonzero objective without constraints")
        return LpResult(np.zeros(n), 0.0, 0, 0.0)

    # standard form columns: z+, z-, slacks
    A = np.zeros((m, 2 * n + p))
    A[:p, :n] = G
    A[:p, n:2 * n] = -G
    A[:p, 2 * n:] = np.eye(p)
    A[p:, :n] = E
    A[p:, n:2 * n] = -E
    b = np.concatenate([h, f])
    flip = b < 0
    A[flip] *= -1
    b = np.where(flip, -b, b)
    nstd = A.shape[1]

    basis = [-1] * m
    art_rows = []
    for i in range(m):
        if i < p and not flip[i]:
            basis[i] = 2 * n + i
        else:
            art_rows.append(i)
    nart = len(art_rows)
    T = np.zeros((m + 1, nstd + nart + 1))
    T[:m, :nstd] = A
    T[:m, -1] = b
    for k, i in enumerate(art_rows):
        T[i, nstd + k] = 1.0
        basis[i] = nstd + k
    if max_iter is None:
        max_iter = 50 * (m + nstd + nart)

    it = 0
    phase1 = 0.0
    if nart:
        T[-1, nstd:nstd + nart] = 1.0
        for i in art_rows:
            T[-1] -= T[i]
        status, it = _iterate(T, basis, nstd + nart, tol * 1e-3, max_iter, it)
        phase1 = -T[-1, -1]
        if phase1 > tol * max(1.0, float(np.max(b))):
            raise InfeasibleError(
                "linear constraints are infeasible", residual=phase1, instance=problem
            )
        # drive zero-level artificials out of the basis; drop redundant rows
        keep = []
        for i in range(m):
            if basis[i] >= nstd:
                cols = np.flatnonzero(np.abs(T[i, :nstd]) > PIVOT_TOL)
                if cols.size:
                    _pivot(T, i, int(cols[0]))
                    basis[i] = int(cols[0])
                    keep.append(i)
            else:
                keep.append(i)
        rows = keep + [m]
        T = np.delete(T[rows], np.s_[nstd:nstd + nart], axis=1)
        basis = [basis[i] for i in keep]
        A, b = A[keep], b[keep]

    cstd = np.concatenate([c, -c, np.zeros(p)])
    T[-1] = 0.0
    T[-1, :nstd] = cstd
    for i, j in enumerate(basis):
        if cstd[j] != 0.0:
            T[-1] -= cstd[j] * T[i]
    status, it = _iterate(T, basis, nstd, tol * 1e-3, max_iter, it)
    if status == "unbounded":
        raise UnboundedError("linear objective is unbounded below")

    y = np.zeros(nstd)
    y[basis] = T[:-1, -1]
    if basis:
        # recompute basic values from the original columns to shed pivot drift
        try:
            yb = np.linalg.solve(A[:, basis], b)
            y[basis] = yb
        except np.linalg.LinAlgError:
            pass
    y = np.maximum(y, 0.0)
    z = y[:n] - y[n:2 * n]
    return LpResult(z, float(c @ z), it, float(phase1), list(basis))


def solve_feasibility(problem, tol=1e-9, max_iter=None):
    """Return a point satisfying ``problem`` (the phase-1 vertex).

    With no constraints the origin is returned.
    """
    res = solve_lp(None, problem, tol=tol, max_iter=max_iter)
    ineq, eq = problem.residuals(res.x)
    scale = max(1.0, float(np.max(np.abs(problem.h), initial=0.0)),
                float(np.max(np.abs(problem.f), initial=0.0)))
    if ineq > tol * scale or eq > tol * scale:
        raise InfeasibleError(
            "phase-1 point violates the constraints beyond tolerance",
            residual=max(ineq, eq), instance=problem,
        )
    return res.x
