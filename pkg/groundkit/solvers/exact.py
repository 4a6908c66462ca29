"""
Exhaustive joint assignment
"""

from typing import Optional

import numpy as np

from ..config.settings import SolverConfig
from ..errors import BudgetExceededError
from ..models.inference import Assignment, JointProblem
from .base import BaseSolver


class ExactSolver(BaseSolver):
    """
    Enumerates every assignment as one cost tensor

    The tensor is accumulated in the same order as JointProblem.objective,
    so its minimum equals the recomputed objective bit for bit. The first
    minimum in C order is the lexicographically smallest optimal assignment.
    """

    def solve(self, problem: JointProblem) -> Assignment:
        sizes = problem.sizes
        total = int(np.prod(sizes, dtype=object))
        if total > self.config.exhaustive_budget:
            raise BudgetExceededError(
                f"{total} assignments exceed the exhaustive budget of "
                f"{self.config.exhaustive_budget}; use the relaxed solver"
            )

        n = problem.n_phrases
        tensor = np.zeros(sizes)
        for i, u in enumerate(problem.unary):
            shape = [1] * n
            shape[i] = sizes[i]
            tensor = tensor + u.reshape(shape)
        for term in problem.pair_terms:
            shape = [1] * n
            shape[term.i] = sizes[term.i]
            shape[term.j] = sizes[term.j]
            costs = term.costs if term.i < term.j else term.costs.T
            tensor = tensor + costs.reshape(shape)

        chosen = np.unravel_index(int(np.argmin(tensor)), tensor.shape)
        self.logger.debug(f"🔍 Enumerated {total} assignments")
        return self.finish(problem, list(chosen), enumerated=total)


def solve_exact(p: JointProblem, budget: int = 1_000_000) -> Assignment:
    """Globally optimal assignment by enumeration (see ExactSolver)"""
    return ExactSolver(SolverConfig(exhaustive_budget=budget)).solve(p)


def enumeration_size(p: JointProblem) -> int:
    return int(np.prod(p.sizes, dtype=object))


def fits_budget(p: JointProblem, config: Optional[SolverConfig] = None) -> bool:
    config = config or SolverConfig()
    return enumeration_size(p) <= config.exhaustive_budget
