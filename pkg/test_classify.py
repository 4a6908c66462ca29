#!/usr/bin/env python3
"""
RBF SVM and rank-SVM tests
"""

import numpy as np
import pytest

from groundkit.errors import DimensionError, TrainingError
from groundkit.learners import (
    RankSvmModel,
    RankSvmTrainer,
    RbfSvmModel,
    RbfSvmTrainer,
    count_violations,
    grid_search_gamma,
    predict_prob,
    rank_score,
    train_rank_svm,
    train_rbf_svm,
)
from groundkit.learners.svm import fit_platt


def blobs(center, n, scale, rng):
    return np.asarray(center, dtype=float) + scale * rng.normal(size=(n, len(center)))


def separable(seed=0, n=40):
    rng = np.random.default_rng(seed)
    return blobs([3.0, 3.0], n, 0.5, rng), blobs([-3.0, -3.0], n, 0.5, rng)


def xor_data(seed=0, n=40):
    rng = np.random.default_rng(seed)
    pos = np.vstack([blobs([1, 1], n, 0.2, rng), blobs([-1, -1], n, 0.2, rng)])
    neg = np.vstack([blobs([1, -1], n, 0.2, rng), blobs([-1, 1], n, 0.2, rng)])
    return pos, neg


def accuracy(model, pos, neg):
    right = np.sum(model.decision_function(pos) > 0) + np.sum(model.decision_function(neg) < 0)
    return right / (len(pos) + len(neg))


def test_separable_data_is_fit_exactly():
    pos, neg = separable()
    model = train_rbf_svm(pos, neg, c=1.0, seed=0)
    assert accuracy(model, pos, neg) == 1.0


def test_probabilities_deep_inside_each_class():
    pos, neg = separable()
    model = train_rbf_svm(pos, neg, seed=0)
    assert predict_prob(model, [3.0, 3.0]) > 0.9
    assert predict_prob(model, [-3.0, -3.0]) < 0.1


def test_mirrored_classes_decide_zero_at_origin():
    rng = np.random.default_rng(7)
    pos = blobs([2.0, 0.0], 30, 0.4, rng)
    model = train_rbf_svm(pos, -pos, seed=0)
    assert abs(float(model.decision_function(np.zeros((1, 2)))[0])) < 0.05


def test_platt_fit_on_symmetric_decisions():
    d = np.linspace(0.2, 2.0, 20)
    decisions = np.concatenate([d, -d])
    labels = np.concatenate([np.ones(20), -np.ones(20)])
    a, b = fit_platt(decisions, labels)
    assert a > 0
    assert abs(b) < 1e-9


def test_xor_with_tuned_gamma():
    pos, neg = xor_data()
    gamma = grid_search_gamma(pos, neg, [0.01, 0.5, 2.0, 5.0], c=10.0, seed=0)
    assert gamma in (0.5, 2.0, 5.0)
    model = train_rbf_svm(pos, neg, c=10.0, gamma=gamma, seed=0)
    assert accuracy(model, pos, neg) >= 0.95


def test_probabilities_are_monotone_in_decision():
    pos, neg = xor_data(seed=1)
    model = train_rbf_svm(pos, neg, c=10.0, gamma=2.0, seed=0)
    rng = np.random.default_rng(2)
    points = rng.uniform(-2, 2, size=(200, 2))
    decisions = model.decision_function(points)
    probs = model.probabilities(points)
    assert model.platt_a > 0
    assert np.all((probs > 0) & (probs < 1))
    order = np.argsort(decisions)
    assert np.all(np.diff(probs[order]) >= 0)


def test_smo_dual_objective_never_decreases():
    pos, neg = xor_data(seed=3)
    trainer = RbfSvmTrainer(c=10.0, gamma=2.0)
    trainer.fit(pos, neg, seed=0)
    trace = np.asarray(trainer.dual_trace)
    assert trace.size > 1
    assert np.all(np.diff(trace) >= -1e-9)


def test_svm_training_is_deterministic():
    pos, neg = xor_data(seed=4)
    first = train_rbf_svm(pos, neg, gamma=2.0, seed=9).to_dict()
    second = train_rbf_svm(pos, neg, gamma=2.0, seed=9).to_dict()
    assert first == second
    reloaded = RbfSvmModel.from_dict(first)
    assert predict_prob(reloaded, [1.0, 1.0]) == predict_prob(RbfSvmModel.from_dict(second), [1.0, 1.0])


def test_svm_training_errors():
    pos, neg = separable()
    with pytest.raises(TrainingError):
        train_rbf_svm(pos, np.empty((0, 2)))
    bad = pos.copy()
    bad[0, 0] = np.inf
    with pytest.raises(TrainingError):
        train_rbf_svm(bad, neg)
    model = train_rbf_svm(pos, neg)
    with pytest.raises(DimensionError):
        predict_prob(model, [1.0, 2.0, 3.0])


def test_rank_svm_single_direction():
    e1 = np.eye(3)[0]
    pairs = [(e1, np.zeros(3))] * 10
    model = train_rank_svm(pairs, c=1.0, epochs=50, seed=0)
    assert model.weights[0] > 0
    assert count_violations(model, pairs) == 0


def test_rank_svm_separable_pairs_have_no_violations():
    rng = np.random.default_rng(0)
    w_star = rng.normal(size=11)
    w_star /= np.linalg.norm(w_star)
    pairs = []
    while len(pairs) < 500:
        a, b = rng.normal(size=11), rng.normal(size=11)
        margin = float(w_star @ (a - b))
        if abs(margin) < 0.5:
            continue
        pairs.append((a, b) if margin > 0 else (b, a))
    trainer = RankSvmTrainer(c=1.0, epochs=100)
    model = trainer.fit(pairs, seed=0)
    assert count_violations(model, pairs) == 0
    better, worse = pairs[0]
    assert rank_score(model, better) > rank_score(model, worse)
    trace = trainer.objective_trace
    assert trace[-1] < trace[0]
    assert np.mean(trace[-10:]) <= np.mean(trace[1:11])


def test_rank_svm_contradictory_pairs_stay_bounded():
    a, b = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    pairs = [(a, b), (b, a)] * 5
    trainer = RankSvmTrainer(c=1.0, epochs=30)
    model = trainer.fit(pairs, seed=0)
    assert np.all(np.isfinite(model.weights))
    # each pair contributes at least one unit of hinge loss at any w
    assert trainer.objective_trace[-1] >= len(pairs) - 1e-9


def test_rank_score_is_linear():
    model = RankSvmModel(weights=np.array([0.5, -1.0, 2.0]))
    x = np.array([1.0, 2.0, 3.0])
    assert rank_score(model, 3.0 * x) == pytest.approx(3.0 * rank_score(model, x))
    assert rank_score(RankSvmModel(weights=np.zeros(3)), x) == 0.0
    with pytest.raises(DimensionError):
        rank_score(model, [1.0, 2.0])


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_scoring_rejects_non_finite_features(bad):
    x = np.array([1.0, bad, 3.0])
    with pytest.raises(ValueError, match="non-finite"):
        rank_score(RankSvmModel(weights=np.ones(3)), x)
    model = train_rbf_svm(*separable(), c=1.0, seed=0)
    with pytest.raises(ValueError, match="non-finite"):
        predict_prob(model, [bad, 0.0])


def test_rank_svm_needs_pairs():
    with pytest.raises(TrainingError):
        train_rank_svm([])
