"""
Base solver interface for GROUNDKIT joint assignment
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..config.settings import SolverConfig
from ..models.inference import Assignment, JointProblem
from ..utils.logger import get_logger

# strict improvement margin for local moves
IMPROVE_EPS = 1e-12


class BaseSolver(ABC):
    """
    Abstract base class for joint assignment solvers

    Every solver returns a feasible Assignment whose objective is the exact
    joint cost of its chosen indices.
    """

    def __init__(self, config: Optional[SolverConfig] = None, seed: int = 0, debug: bool = False):
        self.config = config or SolverConfig()
        self.seed = seed
        self.logger = get_logger(__name__, debug=debug)

    @abstractmethod
    def solve(self, problem: JointProblem) -> Assignment:
        """
        Choose one candidate per phrase

        Raises:
            BudgetExceededError: exact solvers only, when enumeration is too large
        """
        pass

    def get_solver_name(self) -> str:
        return self.__class__.__name__.replace("Solver", "").lower()

    def get_solver_info(self) -> Dict[str, Any]:
        return {"name": self.get_solver_name(), "config": self.config.model_dump()}

    def finish(self, problem: JointProblem, chosen: List[int], **metadata) -> Assignment:
        chosen = [int(c) for c in chosen]
        return Assignment(
            chosen=chosen,
            objective=problem.objective(chosen),
            solver=self.get_solver_name(),
            metadata=metadata,
        )


class LocalMoves:
    """Conditional costs of one phrase (or phrase pair) with the others held fixed"""

    def __init__(self, problem: JointProblem):
        self.problem = problem
        self.pairs: Dict[Tuple[int, int], np.ndarray] = problem.merged_pair_terms()
        self.neighbors: Dict[int, List[Tuple[int, int]]] = {i: [] for i in range(problem.n_phrases)}
        for i, j in self.pairs:
            self.neighbors[i].append((i, j))
            self.neighbors[j].append((i, j))

    def conditional(self, i: int, chosen: List[int], skip: Optional[int] = None) -> np.ndarray:
        """Cost of every candidate of phrase i, others fixed (ignoring phrase ``skip``)"""
        cost = self.problem.unary[i].copy()
        for a, b in self.neighbors[i]:
            if a == i and b != skip:
                cost += self.pairs[(a, b)][:, chosen[b]]
            elif b == i and a != skip:
                cost += self.pairs[(a, b)][chosen[a], :]
        return cost

    def icm(self, chosen: List[int], max_rounds: int = 1000) -> List[int]:
        """Re-optimize phrases one at a time until no phrase changes"""
        chosen = list(chosen)
        for _ in range(max_rounds):
            changed = False
            for i in range(self.problem.n_phrases):
                cost = self.conditional(i, chosen)
                best = int(np.argmin(cost))
                if cost[best] < cost[chosen[i]] - IMPROVE_EPS:
                    chosen[i] = best
                    changed = True
            if not changed:
                break
        return chosen

    def block_moves(self, chosen: List[int], max_rounds: int = 100) -> List[int]:
        """Jointly re-optimize linked phrase pairs, then single phrases, until stable"""
        chosen = self.icm(chosen)
        linked = sorted({(min(i, j), max(i, j)) for i, j in self.pairs})
        for _ in range(max_rounds):
            changed = False
            for i, j in linked:
                local = (
                    self.conditional(i, chosen, skip=j)[:, None]
                    + self.conditional(j, chosen, skip=i)[None, :]
                )
                if (i, j) in self.pairs:
                    local = local + self.pairs[(i, j)]
                if (j, i) in self.pairs:
                    local = local + self.pairs[(j, i)].T
                flat = int(np.argmin(local))
                bi, bj = divmod(flat, local.shape[1])
                if local[bi, bj] < local[chosen[i], chosen[j]] - IMPROVE_EPS:
                    chosen[i], chosen[j] = bi, bj
                    changed = True
            if not changed:
                break
            chosen = self.icm(chosen)
        return chosen
