"""Online gradient descent control of constrained linear systems.

Submodules
----------
geometry    polytopes: membership, projection, shrinking, vertices
system      linear dynamics and the constrained-controllability checker
costs       time-varying quadratic tracking costs
optim       dense LP and convex QP solvers
controller  the online controller and closed-loop simulation
analysis    hindsight benchmark, dynamic regret and bound constants
harness     scenarios, validation, runs and the command line
"""
from . import analysis, controller, costs, geometry, optim, system
from .errors import (AssumptionError, ConvergenceError, DimensionError, InfeasibleError,
                     OgdError, UnboundedError)

__version__ = "0.1.0"

__all__ = [
    "AssumptionError", "ConvergenceError", "DimensionError", "InfeasibleError", "OgdError",
    "UnboundedError", "analysis", "controller", "costs", "geometry", "optim", "system",
]
