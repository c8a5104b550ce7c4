"""H-representation polytopes ``{x : C x <= d}``.

Rows are normalized to unit Euclidean length at construction, so offsets are
signed distances of the facets from the origin and the margin-shrunk set is a
plain offset shift.
"""
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InfeasibleError, UnboundedError
from .optim import ConvexQp, LinearFeasibilityProblem, solve_feasibility, solve_lp, solve_qp

MERGE_TOL = 1e-8
MAX_VERTEX_DIM = 6


@dataclass(frozen=True, eq=False)
class Polytope:
    """Bounded polytope ``{x : C x <= d}`` with unit-norm rows.

    Parameters
    ----------
    C : (c, n) array_like
        Half-space normals; no row may vanish.
    d : (c,) array_like
        Offsets.
    check_bounded : bool
        Verify boundedness with ``2 n`` support LPs.
    """

    C: np.ndarray
    d: np.ndarray
    check_bounded: bool = True

    def __post_init__(self):
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        d = np.asarray(self.d, dtype=float).ravel()
        if C.shape[0] != d.size:
            raise DimensionError(f"C has {C.shape[0]} rows but d has {d.size} entries")
        norms = np.linalg.norm(C, axis=1)
        if np.any(norms == 0.0):
            raise ValueError("C has an all-zero row")
        # rows already of unit length stay bit-identical so round trips are exact
        norms = np.where(np.abs(norms - 1.0) <= 4 * np.finfo(float).eps, 1.0, norms)
        C = C / norms[:, None]
        d = d / norms
        C.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "d", d)
        if self.check_bounded:
            for k in range(self.dim):
                for sign in (1.0, -1.0):
                    try:
                        support(self, sign * np.eye(self.dim)[k])
                    except UnboundedError:
                        raise ValueError("polytope is unbounded") from None

    @property
    def dim(self):
        return self.C.shape[1]

    @property
    def n_constraints(self):
        return self.C.shape[0]

    @classmethod
    def box(cls, upper, lower=None):
        """Axis-aligned box ``lower <= x <= upper`` (``lower = -upper`` by default)."""
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        lower = -upper if lower is None else np.atleast_1d(np.asarray(lower, dtype=float))
        n = upper.size
        return cls(np.vstack([np.eye(n), -np.eye(n)]), np.concatenate([upper, -lower]))

    @classmethod
    def from_dict(cls, data):
        if "box" in data:
            return cls.box(data["box"])
        return cls(np.asarray(data["rows"], dtype=float), np.asarray(data["offsets"], dtype=float))

    def to_dict(self):
        return {"rows": self.C.tolist(), "offsets": self.d.tolist()}

    def scaled(self, factor):
        """The set ``factor * P`` for ``factor > 0``."""
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return Polytope(self.C, factor * self.d, check_bounded=False)

    def intersect(self, other):
        if other.dim != self.dim:
            raise DimensionError("polytopes live in different dimensions")
        return Polytope(np.vstack([self.C, other.C]), np.concatenate([self.d, other.d]))

    def contains_origin_interior(self):
        return bool(np.all(self.d > 0))

    def __repr__(self):
        return f"Polytope(dim={self.dim}, n_constraints={self.n_constraints})"


@dataclass(frozen=True)
class ShrinkParams:
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")


def _check_point(P, x):
    x = np.asarray(x, dtype=float).ravel()
    if x.size != P.dim:
        raise DimensionError(f"point has dimension {x.size}, polytope has {P.dim}")
    return x


def contains(P, x, tol=0.0):
    x = _check_point(P, x)
    return bool(np.all(P.C @ x <= P.d + tol))


def support(P, direction):
    """Maximum of ``direction . x`` over ``P`` (raises ``UnboundedError``)."""
    direction = np.asarray(direction, dtype=float)
    res = solve_lp(-direction, LinearFeasibilityProblem(P.dim, P.C, P.d))
    return -res.objective


def is_empty(P, tol=1e-9):
    try:
        solve_feasibility(LinearFeasibilityProblem(P.dim, P.C, P.d), tol=tol)
    except InfeasibleError:
        return True
    return False


def shrink(P, delta):
    """Points whose closed ``delta``-ball lies inside ``P``.

    With unit rows the offsets simply drop by ``delta``.
    """
    delta = float(getattr(delta, "delta", delta))
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta == 0:
        return P
    out = Polytope(P.C, P.d - delta, check_bounded=False)
    if is_empty(out, tol=0.0):
        raise InfeasibleError(f"shrinking by delta={delta} leaves an empty set")
    return out


def project(P, x, tol=1e-10):
    """Euclidean projection of ``x`` onto ``P``."""
    x = _check_point(P, x)
    if np.all(P.C @ x <= P.d):
        return x.copy()
    qp = ConvexQp(np.eye(P.dim), -x, P.C, P.d)
    return solve_qp(qp, tol=tol, max_iter=100 * P.n_constraints).x


def vertices(P, max_dim=MAX_VERTEX_DIM, tol=1e-9):
    """All vertices of ``P`` by enumerating ``n``-subsets of facets.

    Returns an ``(k, n)`` array in first-found order.
    """
    n = P.dim
    if n > max_dim:
        raise ValueError(f"vertex enumeration limited to dimension {max_dim}, got {n}")
    if P.n_constraints < n + 1:
        raise ValueError("too few facets for a bounded polytope")
    found = []
    for idx in itertools.combinations(range(P.n_constraints), n):
        M = P.C[list(idx)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        v = np.linalg.solve(M, P.d[list(idx)])
        if np.all(P.C @ v <= P.d + tol * max(1.0, np.abs(P.d).max())):
            if not any(np.max(np.abs(v - w)) <= MERGE_TOL for w in found):
                found.append(v)
    if not found:
        raise ValueError("no vertices found: polytope is empty or degenerate")
    return np.array(found)


def diameter(P):
    V = vertices(P)
    diff = V[:, None, :] - V[None, :, :]
    return float(np.sqrt((diff ** 2).sum(-1)).max())


def inscribed_scale(P, Q):
    """Largest ``s`` with ``s * P`` inside ``Q``; both must contain the origin."""
    if P.dim != Q.dim:
        raise DimensionError("polytopes live in different dimensions")
    if not Q.contains_origin_interior():
        raise ValueError("outer polytope must contain the origin in its interior")
    s = np.inf
    for c, d in zip(Q.C, Q.d):
        h = support(P, c)
        if h > 0:
            s = min(s, d / h)
    return float(s)
