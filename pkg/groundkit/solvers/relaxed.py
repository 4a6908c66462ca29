"""
Continuous relaxation of the joint assignment with local-search rounding
"""

from typing import List, Optional, Tuple

import numpy as np

from ..config.settings import SolverConfig
from ..models.inference import Assignment, JointProblem
from .base import BaseSolver, LocalMoves

ARMIJO = 1e-4
MIN_STEP = 1e-12


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum(x) = 1}"""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, v.size + 1)
    rho = int(np.flatnonzero(u - css / ks > 0)[-1])
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


class RelaxedObjective:
    """Joint cost over per-phrase probability simplices"""

    def __init__(self, problem: JointProblem):
        self.problem = problem
        self.pairs = problem.merged_pair_terms()

    def value(self, x: List[np.ndarray]) -> float:
        total = sum(float(u @ xi) for u, xi in zip(self.problem.unary, x))
        for (i, j), c in self.pairs.items():
            total += float(x[i] @ c @ x[j])
        return total

    def gradient(self, x: List[np.ndarray]) -> List[np.ndarray]:
        grad = [u.copy() for u in self.problem.unary]
        for (i, j), c in self.pairs.items():
            grad[i] += c @ x[j]
            grad[j] += c.T @ x[i]
        return grad


class RelaxedSolver(BaseSolver):
    """
    Projected-gradient descent on the simplex relaxation

    Starts from the uniform point, the unary one-hot point and seeded random
    points; each solution is rounded by maximum mass and refined with
    conditional improvement (and pairwise block moves when enabled). The
    per-phrase unary argmins are refined the same way, so the result is never
    worse than independent per-phrase choices. The best rounded assignment
    wins, ties going to the lexicographically smallest.
    """

    def solve(self, problem: JointProblem) -> Assignment:
        objective = RelaxedObjective(problem)
        moves = LocalMoves(problem)
        rng = np.random.default_rng(self.seed)

        unary_argmin = [int(np.argmin(u)) for u in problem.unary]
        candidates = [self._refine(moves, unary_argmin)]
        relaxed_values = []

        for x0 in self._starts(problem, unary_argmin, rng):
            x, value = self._descend(objective, x0)
            relaxed_values.append(value)
            rounded = [int(np.argmax(xi)) for xi in x]
            candidates.append(self._refine(moves, rounded))

        best: Optional[Tuple[float, List[int]]] = None
        for chosen in candidates:
            scored = (problem.objective(chosen), chosen)
            if best is None or scored < best:
                best = scored

        assert best is not None
        return self.finish(
            problem,
            best[1],
            relaxed_objective=min(relaxed_values) if relaxed_values else None,
            starts=len(relaxed_values),
        )

    def _refine(self, moves: LocalMoves, chosen: List[int]) -> List[int]:
        if self.config.block_moves:
            return moves.block_moves(chosen)
        return moves.icm(chosen)

    def _starts(self, problem: JointProblem, unary_argmin: List[int], rng: np.random.Generator):
        yield [np.full(m, 1.0 / m) for m in problem.sizes]
        if self.config.restarts >= 2:
            yield [np.eye(m)[c] for m, c in zip(problem.sizes, unary_argmin)]
        for _ in range(self.config.restarts - 2):
            yield [project_simplex(rng.random(m)) for m in problem.sizes]

    def _descend(
        self, objective: RelaxedObjective, x: List[np.ndarray]
    ) -> Tuple[List[np.ndarray], float]:
        value = objective.value(x)
        step = 1.0
        for _ in range(self.config.iters):
            grad = objective.gradient(x)
            while True:
                candidate = [project_simplex(xi - step * gi) for xi, gi in zip(x, grad)]
                decrease = sum(float(gi @ (ci - xi)) for gi, ci, xi in zip(grad, candidate, x))
                new_value = objective.value(candidate)
                if new_value <= value + ARMIJO * decrease or step < MIN_STEP:
                    break
                step *= 0.5
            if step < MIN_STEP:
                break
            improvement = value - new_value
            x, value = candidate, new_value
            step = min(step * 2.0, 1e6)
            if abs(improvement) < self.config.tol:
                break
        return x, value


def solve_relaxed(p: JointProblem, iters: int = 500, tol: float = 1e-6, seed: int = 0) -> Assignment:
    """Relaxed joint assignment (see RelaxedSolver)"""
    return RelaxedSolver(SolverConfig(iters=iters, tol=tol), seed=seed).solve(p)
