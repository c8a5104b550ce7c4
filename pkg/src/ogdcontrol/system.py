"""Discrete-time LTI plant ``x+ = A x + B u`` and constrained-reachability checks.

Input sequences are ``(mu, m)`` arrays whose row ``i`` is applied at step
``i`` (first row first). The multi-step matrix ``S_c = [B, AB, ..., A^{mu-1} B]``
acts on the *reverse* stacking produced by :func:`stack`, in which the last
applied input comes first.
"""
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import DimensionError, InfeasibleError
from .optim import LinearFeasibilityProblem, solve_feasibility


@dataclass(frozen=True, eq=False)
class LtiSystem:
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.asarray(self.B, dtype=float)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        if A.shape[0] != A.shape[1]:
            raise DimensionError("A must be square")
        if B.shape[0] != A.shape[0]:
            raise DimensionError("B must have as many rows as A")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @classmethod
    def from_dict(cls, data):
        return cls(np.asarray(data["A"], dtype=float), np.asarray(data["B"], dtype=float))

    def to_dict(self):
        return {"A": self.A.tolist(), "B": self.B.tolist()}


def step(sys, x, u):
    x = np.asarray(x, dtype=float).ravel()
    u = np.asarray(u, dtype=float).ravel()
    if x.size != sys.n or u.size != sys.m:
        raise DimensionError(f"expected x in R^{sys.n} and u in R^{sys.m}")
    return sys.A @ x + sys.B @ u


def stack(seq):
    """Stack a ``(mu, m)`` sequence as ``(u^(mu), ..., u^(1))``."""
    return np.asarray(seq, dtype=float)[::-1].ravel()


def unstack(vec, m):
    return np.asarray(vec, dtype=float).reshape(-1, m)[::-1].copy()


def reach_matrix(sys, mu):
    """``S_c = [B, AB, ..., A^{mu-1} B]``."""
    if mu < 1:
        raise ValueError("mu must be a positive integer")
    blocks = [sys.B]
    for _ in range(mu - 1):
        blocks.append(sys.A @ blocks[-1])
    return np.hstack(blocks)


def controllability_matrix(sys):
    return reach_matrix(sys, sys.n)


def controllability_rank(sys):
    s = np.linalg.svd(controllability_matrix(sys), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > 1e-10 * s[0]))


def matrix_norm(M, rtol=1e-12, max_iter=10000):
    """Induced 2-norm by power iteration on ``M^T M``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if not np.any(M):
        return 0.0
    G = M.T @ M
    v = np.random.default_rng(0).standard_normal(G.shape[0])
    v /= np.linalg.norm(v)
    lam = float(v @ G @ v)
    for _ in range(max_iter):
        w = G @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            break
        v = w / nw
        new = float(v @ G @ v)
        if abs(new - lam) <= rtol * new:
            lam = new
            break
        lam = new
    return float(np.sqrt(max(lam, 0.0)))


def spectral_norm(sys):
    return matrix_norm(sys.A)


def prediction_matrices(sys, mu):
    """Matrices ``M_k`` with ``x_k = A^k x_0 + M_k g`` for ``k = 0..mu``.

    ``g`` is the application-ordered flattening ``seq.ravel()``.
    """
    n, m = sys.n, sys.m
    powers = [np.eye(n)]
    for _ in range(mu):
        powers.append(sys.A @ powers[-1])
    mats = []
    for k in range(mu + 1):
        M = np.zeros((n, mu * m))
        for j in range(k):
            M[:, j * m:(j + 1) * m] = powers[k - 1 - j] @ sys.B
        mats.append(M)
    return powers, mats


def horizon_program(sys, X, U, x_start, mu, target=None, terminal_set=None):
    """Linear constraints on a ``mu``-step input sequence from ``x_start``.

    States after steps ``1..mu`` lie in ``X`` and inputs in ``U``. The final
    state either equals ``target`` or lies in ``terminal_set``.
    """
    x_start = np.asarray(x_start, dtype=float).ravel()
    n, m = sys.n, sys.m
    powers, mats = prediction_matrices(sys, mu)
    G_rows, h_rows = [], []
    for k in range(1, mu + 1):
        G_rows.append(X.C @ mats[k])
        h_rows.append(X.d - X.C @ (powers[k] @ x_start))
    if terminal_set is not None:
        G_rows.append(terminal_set.C @ mats[mu])
        h_rows.append(terminal_set.d - terminal_set.C @ (powers[mu] @ x_start))
    for j in range(mu):
        block = np.zeros((U.n_constraints, mu * m))
        block[:, j * m:(j + 1) * m] = U.C
        G_rows.append(block)
        h_rows.append(U.d)
    E = f = None
    if target is not None:
        E = mats[mu]
        f = np.asarray(target, dtype=float).ravel() - powers[mu] @ x_start
    return LinearFeasibilityProblem(mu * m, np.vstack(G_rows), np.concatenate(h_rows), E, f)


def simulate(sys, x_start, seq):
    """States ``x_0..x_mu`` obtained by applying ``seq`` from ``x_start``."""
    xs = [np.asarray(x_start, dtype=float).ravel()]
    for u in np.asarray(seq, dtype=float).reshape(-1, sys.m):
        xs.append(step(sys, xs[-1], u))
    return np.array(xs)


@dataclass
class ReachabilityCertificate:
    mu: int
    S_c: np.ndarray
    witness_stats: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict, repr=False)
    vertices: np.ndarray = field(default=None, repr=False)
    ok: bool = True


@dataclass
class ReachabilityFailure:
    mu: int
    source: np.ndarray
    target: np.ndarray
    pair_index: tuple
    ok: bool = False


def check_mu(sys, X, U, mu, tol=1e-9):
    """Certify that every vertex of ``X`` reaches every other in ``mu`` steps.

    Feasible (start, end) pairs form a convex set, so vertex pairs suffice.
    Returns a ``ReachabilityCertificate`` or the first failing pair.
    """
    if X.dim != sys.n or U.dim != sys.m:
        raise DimensionError("constraint sets do not match the system dimensions")
    V = geometry.vertices(X)
    witnesses = {}
    for i, vx in enumerate(V):
        for j, vy in enumerate(V):
            prob = horizon_program(sys, X, U, vx, mu, target=vy)
            try:
                g = solve_feasibility(prob, tol=tol)
            except InfeasibleError:
                return ReachabilityFailure(mu, vx, vy, (i, j))
            witnesses[(i, j)] = g.reshape(mu, sys.m)
    stats = {"vertices": len(V), "pairs": len(V) ** 2}
    return ReachabilityCertificate(mu, reach_matrix(sys, mu), stats, witnesses, V)


def find_mu(sys, X, U, mu_max):
    """Smallest ``mu <= mu_max`` certified by :func:`check_mu`."""
    result = None
    for mu in range(1, mu_max + 1):
        result = check_mu(sys, X, U, mu)
        if result.ok:
            return result
    return result


def canonical_box(sys, radius=1.0):
    """Box of half-width ``radius`` in controllable canonical coordinates.

    In those coordinates the system is a shift chain whose last entry is set
    freely by the input, so with enough input authority any point of the box
    reaches any other within ``n`` steps while staying inside. Single-input
    systems only.
    """
    if sys.m != 1:
        raise ValueError("canonical box requires a single-input system")
    if controllability_rank(sys) < sys.n:
        raise ValueError("canonical coordinates require a controllable pair")
    n = sys.n
    coeffs = np.poly(sys.A)[1:]
    Ac = np.zeros((n, n))
    Ac[:-1, 1:] = np.eye(n - 1)
    Ac[-1] = -coeffs[::-1]
    Bc = np.zeros((n, 1))
    Bc[-1, 0] = 1.0
    T = controllability_matrix(sys) @ np.linalg.inv(reach_matrix(LtiSystem(Ac, Bc), n))
    Tinv = np.linalg.inv(T)
    return geometry.Polytope(np.vstack([Tinv, -Tinv]), radius * np.ones(2 * n))


DEFAULT_GRID = tuple(round(1.0 - 0.1 * k, 1) for k in range(10))


def shrink_to_feasible(sys, X0, U, mu_max, grid=DEFAULT_GRID, template=None):
    """Scaled subset of ``X0`` satisfying constrained reachability.

    Candidates are ``lam * base`` for ``lam`` on ``grid``, where ``base`` is
    ``X0`` or, if given, ``template`` scaled to the largest copy inscribed in
    ``X0``. The first candidate that :func:`find_mu` certifies is returned
    with its certificate. This is a heuristic, not a viability-kernel
    computation: when it fails the state set has to be designed by hand.
    """
    if template is None:
        base = X0
    else:
        base = template.scaled(geometry.inscribed_scale(template, X0))
    last = None
    for lam in grid:
        X = base if lam == 1.0 else base.scaled(lam)
        cert = find_mu(sys, X, U, mu_max)
        if cert.ok:
            cert.witness_stats["scale"] = float(lam)
            return X, cert
        last = cert
    raise InfeasibleError(
        "no scaled candidate set satisfies constrained reachability with "
        f"mu <= {mu_max}; design the state constraint set manually",
        instance=last,
    )
