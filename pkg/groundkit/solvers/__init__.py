"""
Joint assignment solvers for GROUNDKIT
"""

from .base import BaseSolver, LocalMoves
from .exact import ExactSolver, solve_exact
from .factory import AutoSolver, SolverFactory
from .relaxed import RelaxedSolver, project_simplex, solve_relaxed

__all__ = [
    "BaseSolver",
    "LocalMoves",
    "ExactSolver",
    "RelaxedSolver",
    "AutoSolver",
    "SolverFactory",
    "solve_exact",
    "solve_relaxed",
    "project_simplex",
]
