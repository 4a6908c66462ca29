"""
Solver factory for GROUNDKIT
"""

from typing import List, Optional, Union

from ..config.settings import GroundkitConfig, SolverConfig
from ..models.inference import Assignment, JointProblem
from .base import BaseSolver
from .exact import ExactSolver, fits_budget
from .relaxed import RelaxedSolver


class AutoSolver(BaseSolver):
    """Exact enumeration when it fits the budget, the relaxation otherwise"""

    def __init__(self, config: Optional[SolverConfig] = None, seed: int = 0, debug: bool = False):
        super().__init__(config, seed, debug)
        self.exact = ExactSolver(self.config, seed, debug)
        self.relaxed = RelaxedSolver(self.config, seed, debug)

    def solve(self, problem: JointProblem) -> Assignment:
        if fits_budget(problem, self.config):
            return self.exact.solve(problem)
        self.logger.debug(f"🔍 {problem.sizes} exceeds the enumeration budget, relaxing")
        return self.relaxed.solve(problem)


class SolverFactory:
    """Factory for creating joint assignment solvers"""

    @staticmethod
    def create_solver(
        config: Union[GroundkitConfig, SolverConfig, None] = None, seed: Optional[int] = None
    ) -> BaseSolver:
        """
        Create a solver based on configuration

        Args:
            config: full configuration or its solver section
            seed: seed for random relaxation starts (defaults to runtime.seed)

        Raises:
            ValueError: If the provider is not supported
        """
        debug = False
        if isinstance(config, GroundkitConfig):
            seed = config.runtime.seed if seed is None else seed
            debug = config.debug
            config = config.solver
        config = config or SolverConfig()
        seed = seed or 0

        provider = config.provider.lower()
        if provider == "exact":
            return ExactSolver(config, seed, debug)
        elif provider == "relaxed":
            return RelaxedSolver(config, seed, debug)
        elif provider == "auto":
            return AutoSolver(config, seed, debug)
        else:
            raise ValueError(f"Unsupported solver: {provider}")

    @staticmethod
    def get_available_solvers() -> List[str]:
        return ["auto", "exact", "relaxed"]
