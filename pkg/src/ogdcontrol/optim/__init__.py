"""LP feasibility and dense convex QP solvers."""
from .qp import ConvexQp, QpResult, solve_qp
from .simplex import LinearFeasibilityProblem, LpResult, solve_feasibility, solve_lp

__all__ = [
    "ConvexQp",
    "LinearFeasibilityProblem",
    "LpResult",
    "QpResult",
    "solve_feasibility",
    "solve_lp",
    "solve_qp",
]
