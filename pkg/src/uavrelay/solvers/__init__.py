"""Embedded LP and convex-QCP solvers."""
from .lp import solve_lp
from .qcp import solve_qcp
from .types import (ConvexQcp, LinearProgram, QuadConstraint, SolveResult,
                    SolverError, Status)

__all__ = [
    "ConvexQcp", "LinearProgram", "QuadConstraint", "SolveResult",
    "SolverError", "Status", "solve_lp", "solve_qcp",
]
