#!/usr/bin/env python3
"""
Visual relationship detection tests: features, scoring, recall and training pairs
"""

import numpy as np
import pytest

from groundkit.config.settings import GroundkitConfig
from groundkit.core.synth import SPATIAL_PREDICATES, synth_vrd_dataset
from groundkit.core.vrd import (
    VrdScorer,
    VrdTrainer,
    VrdTrainingImage,
    aggregate_recall,
    build_rank_training,
    eval_recall_at,
    is_correct,
    training_triples,
    vrd_cca_scores,
    vrd_feature,
    zero_shot_violations,
)
from groundkit.errors import DimensionError, TrainingError
from groundkit.models.geometry import BoundingBox
from groundkit.models.vrd import (
    N_VRD_FEATURES,
    RecallResult,
    RelationshipCandidate,
    VrdDetections,
    VrdGroundTruth,
    VrdRelationship,
)


@pytest.fixture(scope="module")
def dataset():
    return synth_vrd_dataset(n_train=40, n_test=10, n_classes=5, seed=0)


@pytest.fixture(scope="module")
def scorer(dataset):
    return VrdTrainer(GroundkitConfig()).fit(dataset.train, dataset.vocab, dataset.vectors, seed=0)


def box(x, y, w=10.0, h=10.0):
    return BoundingBox(x=x, y=y, w=w, h=h)


def relationship(s, p, o, sbox, obox):
    return VrdRelationship(subject_class=s, predicate=p, object_class=o, subject_box=sbox, object_box=obox)


def candidate(s, p, o, sbox, obox, score, i=0, j=1):
    return RelationshipCandidate(
        subject_index=i,
        object_index=j,
        subject_class=s,
        object_class=o,
        subject_box=sbox,
        object_box=obox,
        predicate=p,
        predicate_index=0,
        feature=[0.0] * N_VRD_FEATURES,
        score=score,
    )


def test_feature_layout():
    feature = vrd_feature(np.arange(6), 0.1, 0.2, 0.3, 0.4, 0.9)
    assert feature.shape == (11,)
    np.testing.assert_allclose(feature, [0, 1, 2, 3, 4, 5, 0.1, 0.2, 0.3, 0.4, 0.9])
    np.testing.assert_array_equal(vrd_feature(np.zeros(6), 0, 0, 0, 0, 0), np.zeros(11))
    with pytest.raises(DimensionError):
        vrd_feature(np.zeros(5), 0, 0, 0, 0, 0)


def test_cca_model_count_is_checked(dataset, scorer):
    with pytest.raises(DimensionError):
        vrd_cca_scores(scorer.cca_models[:5], None, None, None, ("a", "b", "c"), dataset.vocab)
    with pytest.raises(DimensionError):
        VrdScorer(scorer.cca_models[:5], dataset.vocab)


def test_cca_scores_prefer_the_true_class(dataset, scorer):
    wins, queries = 0, 0
    for image in dataset.test:
        det = image.detections
        feats = {
            name: dataset.vectors[key]
            for name, key in (
                ("s", f"{det.image_id}/box/0"),
                ("o", f"{det.image_id}/box/1"),
                ("u", f"{det.image_id}/union/0-1"),
            )
        }
        s, o = det.classes[0], det.classes[1]
        for other in dataset.vocab.object_classes:
            if other == s:
                continue
            triple = (s, SPATIAL_PREDICATES[0], o)
            wrong = (other, SPATIAL_PREDICATES[0], o)
            right_scores = vrd_cca_scores(scorer.cca_models, feats["s"], feats["o"], feats["u"], triple, dataset.vocab)
            wrong_scores = vrd_cca_scores(scorer.cca_models, feats["s"], feats["o"], feats["u"], wrong, dataset.vocab)
            queries += 1
            wins += right_scores[0] < wrong_scores[0]
    assert wins >= 0.9 * queries


def test_candidate_caps(dataset, scorer):
    image = dataset.test[0]
    det = image.detections
    two = VrdDetections(image_id=det.image_id, boxes=det.boxes[:2], classes=det.classes[:2], width=1000, height=1000)
    candidates = scorer.score_relationships(two, dataset.vectors, top_k=10)
    assert len(candidates) <= 2 * 10
    assert len(candidates) == 2 * len(SPATIAL_PREDICATES)
    scores = [c.score for c in candidates]
    assert scores == sorted(scores, reverse=True)
    assert all(len(c.feature) == 11 for c in candidates)

    single = scorer.score_relationships(det, dataset.vectors, top_k=1)
    pairs = [(c.subject_index, c.object_index) for c in single]
    assert len(pairs) == len(set(pairs)) == 4 * 3

    lonely = VrdDetections(image_id="x", boxes=det.boxes[:1], classes=det.classes[:1])
    assert scorer.score_relationships(lonely, dataset.vectors) == []


def test_zero_weight_ranking_keeps_index_order(dataset, scorer):
    plain = VrdScorer(scorer.cca_models, dataset.vocab)
    det = dataset.test[1].detections
    candidates = plain.score_relationships(det, dataset.vectors, top_k=2)
    order = [(c.subject_index, c.object_index, c.predicate_index) for c in candidates]
    assert order == sorted(order)
    assert {c.predicate_index for c in candidates} == {0, 1}


def test_learned_scorer_picks_layout_predicate(dataset, scorer):
    hits, total = 0, 0
    for image in dataset.test:
        best = {
            (c.subject_index, c.object_index): c.predicate
            for c in scorer.score_relationships(image.detections, dataset.vectors, top_k=1)
        }
        for gt_index, rel in enumerate(image.gt.relationships):
            total += 1
            hits += best[(gt_index, gt_index + 1)] == rel.predicate
    assert hits >= 0.8 * total


def test_recall_counts_hand_example():
    a, b, c, d = box(0, 0), box(50, 0), box(0, 50), box(50, 50)
    gt = VrdGroundTruth(
        image_id="img",
        relationships=[
            relationship("man", "on", "horse", a, b),
            relationship("man", "next to", "car", a, c),
            relationship("dog", "under", "table", c, d),
        ],
    )
    ranked = [
        candidate("man", "on", "horse", a, b, 3.0),
        candidate("man", "on", "horse", a, b, 2.5),
        candidate("dog", "under", "table", c, d, 2.0),
        candidate("man", "next to", "car", a, d, 1.0),
    ]
    result = eval_recall_at(ranked, gt, k=100)
    assert result.matched == 2
    assert result.recall == pytest.approx(2 / 3)
    assert eval_recall_at(ranked, gt, k=1).recall == pytest.approx(1 / 3)


def test_recall_needs_both_boxes_localized():
    gt = VrdGroundTruth(image_id="img", relationships=[relationship("man", "on", "horse", box(0, 0), box(50, 0))])
    shrunk = box(0, 0, w=4.0)
    assert not is_correct(candidate("man", "on", "horse", shrunk, box(50, 0), 1.0), gt.relationships[0])
    assert eval_recall_at([candidate("man", "on", "horse", shrunk, box(50, 0), 1.0)], gt).recall == 0.0
    # right boxes, wrong triple
    assert eval_recall_at([candidate("man", "near", "horse", box(0, 0), box(50, 0), 1.0)], gt).recall == 0.0


def test_recall_without_ground_truth_is_not_applicable():
    result = eval_recall_at([], VrdGroundTruth(image_id="img"), k=50)
    assert not result.applicable
    assert result.recall is None
    pooled = aggregate_recall([result, RecallResult(k=50, recall=0.5, matched=1, total=2)])
    assert pooled.recall == 0.5


def test_recall_at_50_never_exceeds_recall_at_100(dataset, scorer):
    for image in dataset.test:
        candidates = scorer.score_relationships(image.detections, dataset.vectors)
        r50 = eval_recall_at(candidates, image.gt, k=50)
        r100 = eval_recall_at(candidates, image.gt, k=100)
        assert r50.recall <= r100.recall
        # every localized triple is among the 48 candidates
        assert r100.recall == 1.0
        zero_shot = eval_recall_at(candidates, image.gt, k=100, zero_shot_only=True)
        assert zero_shot.applicable == bool(image.gt.zero_shot())


def test_zero_shot_split_integrity(dataset):
    seen = training_triples([image.gt for image in dataset.train])
    assert zero_shot_violations([image.gt for image in dataset.test], seen) == []
    for image in dataset.test:
        for rel in image.gt.relationships:
            assert rel.seen_in_training == (rel.triple in seen)
    # a training triple wrongly flagged as unseen
    flagged = dataset.train[0].gt.relationships[0].model_copy(update={"seen_in_training": False})
    fake = VrdGroundTruth(image_id="x", relationships=[flagged])
    assert zero_shot_violations([fake], seen) == [f"x: {'-'.join(flagged.triple)}"]


def test_rank_training_respects_sampling_bound(dataset, scorer):
    images = dataset.train[:5]
    pairs = build_rank_training(images, scorer, dataset.vectors, neg_ratio=3, seed=0)
    positives = 0
    for image in images:
        for c in scorer.score_relationships(image.detections, dataset.vectors, top_k=len(SPATIAL_PREDICATES)):
            positives += any(is_correct(c, r) for r in image.gt.relationships)
    assert 0 < len(pairs) <= 3 * positives
    assert all(len(pos) == 11 and len(neg) == 11 for pos, neg in pairs)


def test_rank_training_without_positives_fails(dataset, scorer):
    image = dataset.train[0]
    far = [
        r.model_copy(update={"subject_box": box(990, 990, 5, 5), "object_box": box(0, 990, 5, 5)})
        for r in image.gt.relationships
    ]
    broken = VrdTrainingImage(detections=image.detections, gt=VrdGroundTruth(image_id="x", relationships=far))
    with pytest.raises(TrainingError):
        build_rank_training([broken], scorer, dataset.vectors)


def test_union_predicate_score_depends_on_predicate(dataset, scorer):
    word_dim = len(next(iter(dataset.vocab.vectors.values())))
    assert scorer.cca_models[4].dim_x == word_dim

    wins, total = 0, 0
    for image in dataset.test:
        for k, rel in enumerate(image.gt.relationships):
            feats = scorer.pair_features(image.detections, k, k + 1, dataset.vectors)
            union_costs = feats[:, 4]
            assert np.ptp(union_costs) > 1e-6
            total += 1
            wins += dataset.vocab.predicates[int(np.argmin(union_costs))] == rel.predicate
    assert wins >= 0.5 * total
