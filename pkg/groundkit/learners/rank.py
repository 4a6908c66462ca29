"""
Linear rank-SVM trained by epoch-shuffled subgradient descent
"""

from typing import Any, ClassVar, Dict, List, Sequence, Tuple

import numpy as np
from pydantic import Field, model_validator

from ..errors import TrainingError
from ..utils.logger import get_logger
from .base import LearnedModel, as_vector

RankedPair = Tuple[Any, Any]


class RankSvmModel(LearnedModel):
    """Linear scoring function learned from ordering constraints"""

    model_type: ClassVar[str] = "rank_svm"

    weights: np.ndarray = Field(..., description="Weight vector")
    c: float = Field(default=1.0, description="Regularization constant")

    @model_validator(mode="after")
    def validate_weights(self):
        if self.weights.ndim != 1 or not np.all(np.isfinite(self.weights)):
            raise ValueError("Rank-SVM weights must be a finite vector")
        if self.c <= 0:
            raise ValueError("c must be positive")
        return self

    @property
    def dim(self) -> int:
        return int(self.weights.size)

    def scores(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.dim:
            as_vector(x[0], self.dim)
        return x @ self.weights

    def to_dict(self) -> Dict[str, Any]:
        return {"model_type": self.model_type, "weights": self.weights.tolist(), "c": self.c}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RankSvmModel":
        return cls(weights=np.asarray(data["weights"], dtype=float), c=float(data.get("c", 1.0)))

    def get_model_info(self) -> Dict[str, Any]:
        return {"type": self.model_type, "dim": self.dim, "c": self.c}


def rank_score(model: RankSvmModel, x: Any) -> float:
    """w . x"""
    return float(as_vector(x, model.dim) @ model.weights)


def pair_differences(ranked_pairs: Sequence[RankedPair]) -> np.ndarray:
    """better - worse for every pair, as a matrix"""
    if not ranked_pairs:
        raise TrainingError("Rank-SVM training needs at least one ranked pair")
    better = np.array([np.asarray(b, dtype=float).reshape(-1) for b, _ in ranked_pairs])
    worse = np.array([np.asarray(w, dtype=float).reshape(-1) for _, w in ranked_pairs])
    if better.shape != worse.shape:
        raise TrainingError("Ranked pairs mix feature dimensions")
    diffs = better - worse
    if not np.all(np.isfinite(diffs)):
        raise TrainingError("Ranked pairs contain non-finite features")
    return diffs


def rank_objective(weights: np.ndarray, diffs: np.ndarray, c: float) -> float:
    """Sum of pairwise hinge losses plus ||w||^2 / (2 c |pairs|)"""
    hinge = np.maximum(0.0, 1.0 - diffs @ weights).sum()
    return float(hinge + weights @ weights / (2.0 * c * diffs.shape[0]))


def count_violations(model: RankSvmModel, ranked_pairs: Sequence[RankedPair]) -> int:
    """Pairs whose worse item scores at least as high as the better one"""
    diffs = pair_differences(ranked_pairs)
    return int(np.sum(diffs @ model.weights <= 0))


class RankSvmTrainer:
    """
    Subgradient trainer for the linear rank-SVM

    Each epoch visits the pairs in a seeded random order; the step size
    diminishes as t0 / (1 + t0 * (k - 1) / c) over epochs k = 1, 2, ...
    ``objective_trace`` holds the full objective after every epoch.
    """

    def __init__(self, c: float = 1.0, epochs: int = 100, t0: float = 0.1, debug: bool = False):
        if c <= 0:
            raise ValueError("c must be positive")
        if epochs < 1:
            raise ValueError("epochs must be at least 1")
        self.c = c
        self.epochs = epochs
        self.t0 = t0
        self.logger = get_logger(__name__, debug=debug)
        self.objective_trace: List[float] = []

    def fit(self, ranked_pairs: Sequence[RankedPair], seed: int = 0) -> RankSvmModel:
        diffs = pair_differences(ranked_pairs)
        n_pairs, dim = diffs.shape
        rng = np.random.default_rng(seed)

        weights = np.zeros(dim)
        # per-pair share of the regularizer gradient
        reg = 1.0 / (self.c * n_pairs * n_pairs)
        self.objective_trace = [rank_objective(weights, diffs, self.c)]

        for epoch in range(1, self.epochs + 1):
            step = self.t0 / (1.0 + self.t0 * (epoch - 1) / self.c)
            for index in rng.permutation(n_pairs):
                d = diffs[index]
                grad = reg * weights
                if d @ weights < 1.0:
                    grad = grad - d
                weights = weights - step * grad
            self.objective_trace.append(rank_objective(weights, diffs, self.c))

        self.logger.debug(
            f"Rank-SVM trained on {n_pairs} pairs: objective "
            f"{self.objective_trace[0]:.4f} -> {self.objective_trace[-1]:.4f}"
        )
        return RankSvmModel(weights=weights, c=self.c)


def train_rank_svm(
    ranked_pairs: Sequence[RankedPair], c: float = 1.0, epochs: int = 100, seed: int = 0
) -> RankSvmModel:
    """Train a linear rank-SVM on (better, worse) feature pairs"""
    return RankSvmTrainer(c=c, epochs=epochs).fit(ranked_pairs, seed=seed)
