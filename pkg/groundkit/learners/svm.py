"""
RBF-kernel SVM trained by SMO, with Platt-scaled probabilities
"""

from typing import Any, ClassVar, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import Field, model_validator
from scipy.spatial.distance import cdist
from scipy.special import expit

from ..errors import TrainingError
from ..utils.logger import get_logger
from .base import LearnedModel, as_vector

PROB_FLOOR = 1e-7
_TAU = 1e-12


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * ||a - b||^2) for every row pair"""
    return np.exp(-gamma * cdist(np.atleast_2d(a), np.atleast_2d(b), "sqeuclidean"))


class RbfSvmModel(LearnedModel):
    """Kernel expansion over support vectors plus a normalized Platt sigmoid"""

    model_type: ClassVar[str] = "rbf_svm"

    support_vectors: np.ndarray = Field(..., description="s x d support vectors")
    alphas: np.ndarray = Field(..., description="Signed coefficients alpha_i * y_i")
    bias: float = Field(..., description="Decision offset")
    gamma: float = Field(..., description="RBF width")
    c: float = Field(default=1.0, description="Box constraint used in training")
    platt_a: float = Field(default=1.0, description="Sigmoid slope (positive)")
    platt_b: float = Field(default=0.0, description="Sigmoid offset")

    @model_validator(mode="after")
    def validate_model(self):
        if self.support_vectors.ndim != 2 or self.support_vectors.shape[0] == 0:
            raise ValueError("At least one support vector is required")
        if self.alphas.shape != (self.support_vectors.shape[0],):
            raise ValueError("One coefficient per support vector required")
        if np.any(np.abs(self.alphas) > self.c * (1 + 1e-9)):
            raise ValueError("Coefficients exceed the box constraint")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        return self

    @property
    def dim(self) -> int:
        return int(self.support_vectors.shape[1])

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        """Decision values for the rows of x"""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.dim:
            as_vector(x[0], self.dim)
        return rbf_kernel(x, self.support_vectors, self.gamma) @ self.alphas + self.bias

    def probabilities(self, x: np.ndarray) -> np.ndarray:
        probs = expit(self.platt_a * self.decision_function(x) + self.platt_b)
        return np.clip(probs, PROB_FLOOR, 1.0 - PROB_FLOOR)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model_type": self.model_type,
            "dim": self.dim,
            "support_vectors": self.support_vectors.tolist(),
            "alphas": self.alphas.tolist(),
            "bias": self.bias,
            "gamma": self.gamma,
            "c": self.c,
            "platt_a": self.platt_a,
            "platt_b": self.platt_b,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RbfSvmModel":
        return cls(
            support_vectors=np.asarray(data["support_vectors"], dtype=float).reshape(
                -1, data["dim"]
            ),
            alphas=np.asarray(data["alphas"], dtype=float),
            bias=float(data["bias"]),
            gamma=float(data["gamma"]),
            c=float(data.get("c", 1.0)),
            platt_a=float(data["platt_a"]),
            platt_b=float(data["platt_b"]),
        )

    def get_model_info(self) -> Dict[str, Any]:
        return {
            "type": self.model_type,
            "dim": self.dim,
            "support_vectors": int(self.support_vectors.shape[0]),
            "gamma": self.gamma,
            "platt": [self.platt_a, self.platt_b],
        }


def predict_prob(model: RbfSvmModel, x: Any) -> float:
    """sigmoid(platt_a * decision(x) + platt_b), clamped away from 0 and 1"""
    vector = as_vector(x, model.dim)
    return float(model.probabilities(vector[None, :])[0])


class SmoSolution:
    """Raw dual solution of one SMO run"""

    def __init__(self, alpha: np.ndarray, bias: float, trace: List[float], iterations: int):
        self.alpha = alpha
        self.bias = bias
        self.trace = trace
        self.iterations = iterations


def solve_smo(
    kernel: np.ndarray, y: np.ndarray, c: float, tol: float = 1e-3, max_iter: int = 100000
) -> SmoSolution:
    """
    Solve the C-SVM dual on a precomputed kernel

    Working pairs are chosen by maximal KKT violation over the full gradient;
    the dual objective is recorded after every pair update.
    """
    n = y.size
    q = (y[:, None] * y[None, :]) * kernel
    qd = np.diag(q).copy()
    alpha = np.zeros(n)
    grad = -np.ones(n)
    trace = [0.0]

    iterations = 0
    while iterations < max_iter:
        up = ((y > 0) & (alpha < c)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < c))
        score = -y * grad
        if not up.any() or not low.any():
            break
        i = int(np.flatnonzero(up)[np.argmax(score[up])])
        j = int(np.flatnonzero(low)[np.argmin(score[low])])
        if score[i] - score[j] < tol:
            break

        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = max(qd[i] + qd[j] + 2.0 * q[i, j], _TAU)
            delta = (-grad[i] - grad[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            elif alpha[i] < 0:
                alpha[i] = 0.0
                alpha[j] = -diff
            if diff > 0:
                if alpha[i] > c:
                    alpha[i] = c
                    alpha[j] = c - diff
            elif alpha[j] > c:
                alpha[j] = c
                alpha[i] = c + diff
        else:
            quad = max(qd[i] + qd[j] - 2.0 * q[i, j], _TAU)
            delta = (grad[i] - grad[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > c:
                if alpha[i] > c:
                    alpha[i] = c
                    alpha[j] = total - c
                if alpha[j] > c:
                    alpha[j] = c
                    alpha[i] = total - c
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total

        grad += q[:, i] * (alpha[i] - old_i) + q[:, j] * (alpha[j] - old_j)
        iterations += 1
        # dual value e'a - a'Qa/2 written with the maintained gradient
        trace.append(0.5 * float(alpha.sum()) - 0.5 * float(alpha @ grad))

    return SmoSolution(alpha, _bias(alpha, grad, y, c), trace, iterations)


def _bias(alpha: np.ndarray, grad: np.ndarray, y: np.ndarray, c: float) -> float:
    y_grad = y * grad
    free = (alpha > 0) & (alpha < c)
    if free.any():
        rho = float(y_grad[free].mean())
    else:
        at_upper = alpha >= c
        at_lower = alpha <= 0
        ub_mask = (at_upper & (y < 0)) | (at_lower & (y > 0))
        lb_mask = (at_upper & (y > 0)) | (at_lower & (y < 0))
        ub = float(y_grad[ub_mask].min()) if ub_mask.any() else np.inf
        lb = float(y_grad[lb_mask].max()) if lb_mask.any() else -np.inf
        rho = (ub + lb) / 2.0
    return -rho


def fit_platt(decisions: np.ndarray, labels: np.ndarray) -> Tuple[float, float]:
    """
    Fit P(y=1|f) = sigmoid(a*f + b) by regularized maximum likelihood

    Newton's method with backtracking on Platt's smoothed targets.
    Returns the normalized (a, b) with a >= 0.
    """
    deci = np.asarray(decisions, dtype=float)
    positive = np.asarray(labels) > 0
    prior1 = int(positive.sum())
    prior0 = int(positive.size - prior1)
    hi_target = (prior1 + 1.0) / (prior1 + 2.0)
    lo_target = 1.0 / (prior0 + 2.0)
    t = np.where(positive, hi_target, lo_target)

    max_iter, min_step, sigma, eps = 100, 1e-10, 1e-12, 1e-5

    def objective(a_: float, b_: float) -> float:
        f_ab = deci * a_ + b_
        linear = np.where(f_ab >= 0, t * f_ab, (t - 1) * f_ab)
        return float(np.sum(linear + np.logaddexp(0, -np.abs(f_ab))))

    a, b = 0.0, float(np.log((prior0 + 1.0) / (prior1 + 1.0)))
    fval = objective(a, b)
    for _ in range(max_iter):
        f_ab = deci * a + b
        p = expit(-f_ab)
        d2 = p * (1.0 - p)
        h11 = sigma + float(np.sum(deci * deci * d2))
        h22 = sigma + float(np.sum(d2))
        h21 = float(np.sum(deci * d2))
        d1 = t - p
        g1 = float(np.sum(deci * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < eps and abs(g2) < eps:
            break
        det = h11 * h22 - h21 * h21
        da = -(h22 * g1 - h21 * g2) / det
        db = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * da + g2 * db

        step = 1.0
        while step >= min_step:
            new_a, new_b = a + step * da, b + step * db
            new_f = objective(new_a, new_b)
            if new_f < fval + 1e-4 * step * gd:
                a, b, fval = new_a, new_b, new_f
                break
            step /= 2.0
        if step < min_step:
            break

    # Platt's form is 1 / (1 + exp(A f + B)); store the increasing orientation
    return max(-a, 0.0), -b


def stratified_folds(labels: np.ndarray, folds: int, rng: np.random.Generator) -> np.ndarray:
    """Fold id per example, classes spread evenly across folds"""
    fold_of = np.zeros(labels.size, dtype=int)
    for cls in (1, -1):
        members = np.flatnonzero(labels == cls)
        members = members[rng.permutation(members.size)]
        fold_of[members] = np.arange(members.size) % folds
    return fold_of


class RbfSvmTrainer:
    """
    Trainer for binary RBF SVMs with Platt scaling

    The dual objective of the final fit is kept in ``dual_trace`` (one entry
    per SMO pair update, starting from the zero solution).
    """

    def __init__(
        self,
        c: float = 1.0,
        gamma: Optional[float] = None,
        kkt_tol: float = 1e-3,
        max_iter: int = 100000,
        platt_folds: int = 3,
        debug: bool = False,
    ):
        if c <= 0:
            raise ValueError("c must be positive")
        self.c = c
        self.gamma = gamma
        self.kkt_tol = kkt_tol
        self.max_iter = max_iter
        self.platt_folds = platt_folds
        self.logger = get_logger(__name__, debug=debug)
        self.dual_trace: List[float] = []
        self.iterations = 0

    def fit(self, pos: np.ndarray, neg: np.ndarray, seed: int = 0) -> RbfSvmModel:
        """
        Train on positive and negative examples

        Raises:
            TrainingError: single-class input or non-finite features
        """
        x, y = _stack(pos, neg)
        gamma = self.gamma if self.gamma is not None else 1.0 / x.shape[1]

        kernel = rbf_kernel(x, x, gamma)
        solution = solve_smo(kernel, y, self.c, self.kkt_tol, self.max_iter)
        self.dual_trace = solution.trace
        self.iterations = solution.iterations
        if solution.iterations >= self.max_iter:
            self.logger.warning(
                f"⚠️ SMO stopped at max_iter={self.max_iter} before reaching tolerance"
            )

        decisions = self._cross_validated_decisions(kernel, y, gamma, seed)
        platt_a, platt_b = fit_platt(decisions, y)

        support = solution.alpha > 0
        model = RbfSvmModel(
            support_vectors=x[support],
            alphas=(solution.alpha * y)[support],
            bias=solution.bias,
            gamma=gamma,
            c=self.c,
            platt_a=platt_a,
            platt_b=platt_b,
        )
        self.logger.debug(
            f"SVM trained: {x.shape[0]} examples, {int(support.sum())} support vectors, "
            f"{solution.iterations} updates, platt=({platt_a:.4f}, {platt_b:.4f})"
        )
        return model

    def _cross_validated_decisions(
        self, kernel: np.ndarray, y: np.ndarray, gamma: float, seed: int
    ) -> np.ndarray:
        rng = np.random.default_rng(seed)
        fold_of = stratified_folds(y, self.platt_folds, rng)
        decisions = np.zeros(y.size)
        for fold in range(self.platt_folds):
            held = fold_of == fold
            train = ~held
            if not held.any():
                continue
            train_labels = y[train]
            if np.all(train_labels > 0) or np.all(train_labels < 0):
                # one class left in this fold's training split
                decisions[held] = 1.0 if train_labels[0] > 0 else -1.0
                continue
            sub = solve_smo(
                kernel[np.ix_(train, train)], train_labels, self.c, self.kkt_tol, self.max_iter
            )
            coef = sub.alpha * train_labels
            decisions[held] = kernel[np.ix_(held, train)] @ coef + sub.bias
        return decisions


def _stack(pos: Any, neg: Any) -> Tuple[np.ndarray, np.ndarray]:
    pos = np.atleast_2d(np.asarray(pos, dtype=float))
    neg = np.atleast_2d(np.asarray(neg, dtype=float))
    if pos.size == 0 or neg.size == 0:
        raise TrainingError("SVM training needs at least one positive and one negative example")
    if pos.shape[1] != neg.shape[1]:
        raise TrainingError("Positive and negative examples have different dimensions")
    x = np.vstack([pos, neg])
    if not np.all(np.isfinite(x)):
        raise TrainingError("SVM training data contains non-finite features")
    y = np.concatenate([np.ones(pos.shape[0]), -np.ones(neg.shape[0])])
    return x, y


def train_rbf_svm(
    pos: Any,
    neg: Any,
    c: float = 1.0,
    gamma: Optional[float] = None,
    seed: int = 0,
    kkt_tol: float = 1e-3,
    max_iter: int = 100000,
    platt_folds: int = 3,
) -> RbfSvmModel:
    """Train an RBF SVM with Platt scaling (see RbfSvmTrainer)"""
    trainer = RbfSvmTrainer(
        c=c, gamma=gamma, kkt_tol=kkt_tol, max_iter=max_iter, platt_folds=platt_folds
    )
    return trainer.fit(pos, neg, seed=seed)


def grid_search_gamma(
    pos: Any,
    neg: Any,
    gammas: Sequence[float],
    c: float = 1.0,
    folds: int = 3,
    seed: int = 0,
) -> float:
    """Pick the RBF width with the best cross-validated accuracy (first wins ties)"""
    x, y = _stack(pos, neg)
    if not gammas:
        raise ValueError("gammas must not be empty")
    rng = np.random.default_rng(seed)
    fold_of = stratified_folds(y, folds, rng)

    best_gamma, best_correct = gammas[0], -1
    for gamma in gammas:
        kernel = rbf_kernel(x, x, gamma)
        correct = 0
        for fold in range(folds):
            held = fold_of == fold
            train = ~held
            if not held.any() or np.unique(y[train]).size < 2:
                continue
            sub = solve_smo(kernel[np.ix_(train, train)], y[train], c)
            decisions = kernel[np.ix_(held, train)] @ (sub.alpha * y[train]) + sub.bias
            correct += int(np.sum(np.where(decisions >= 0, 1.0, -1.0) == y[held]))
        if correct > best_correct:
            best_gamma, best_correct = gamma, correct
    return float(best_gamma)
