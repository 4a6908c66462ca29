#!/usr/bin/env python3
"""
Grounding harness tests: metrics, data files, model bundles, synthetic data and the pipeline
"""

import json

import numpy as np
import pytest

from groundkit.config.settings import GroundkitConfig
from groundkit.core import io
from groundkit.core.metrics import recall_at_1, recall_by_cue, upper_bound
from groundkit.core.pipeline import GroundingPipeline, retrieval_upper_bound, save_predictions
from groundkit.core.synth import SynthConfig, synth_grounding_dataset, synth_vrd_dataset
from groundkit.errors import DataFormatError, DimensionError
from groundkit.models.bundle import WeightedModelBundle
from groundkit.models.cues import N_SPC, SLOT_INDEX
from groundkit.models.geometry import BoundingBox
from groundkit.models.inference import Assignment, JointProblem
from groundkit.models.language import EntityMention, PhraseType, SentenceRecord
from groundkit.utils.validator import BundleValidator


def box(x, y, w=10.0, h=10.0):
    return BoundingBox(x=x, y=y, w=w, h=h)


def cca_only():
    ws = np.zeros(N_SPC)
    ws[SLOT_INDEX["cca"]] = 1.0
    return ws


@pytest.fixture(scope="module")
def clean():
    return synth_grounding_dataset(SynthConfig(n_images=10, noise=0.0), seed=0)


@pytest.fixture(scope="module")
def pipeline():
    return GroundingPipeline(GroundkitConfig(), WeightedModelBundle(ws=cca_only()))


@pytest.fixture
def hand_gt():
    entities = [
        EntityMention(phrase_id="1", token_span=(0, 2), phrase_type=PhraseType.PEOPLE, gt_boxes=[box(0, 0)]),
        EntityMention(phrase_id="2", token_span=(3, 5), phrase_type=PhraseType.ANIMALS, gt_boxes=[box(50, 0)]),
        EntityMention(phrase_id="3", token_span=(6, 8), phrase_type=PhraseType.SCENE, gt_boxes=[box(0, 50)]),
        EntityMention(phrase_id="4", token_span=(8, 9), phrase_type=PhraseType.OTHER),
    ]
    tokens = "a man with a dog on the grass today".split()
    return [SentenceRecord(image_id="img", sentence_id="s", tokens=tokens, parse="(ROOT)", entities=entities)]


def test_recall_at_1_counts_hand_example(hand_gt):
    predictions = {("s", "1"): box(0, 0), ("s", "2"): box(51, 0), ("s", "3"): box(60, 60), ("s", "4"): None}
    report = recall_at_1(predictions, hand_gt)
    assert report.overall.total == 3
    assert report.recall == pytest.approx(2 / 3)
    assert report.by_type["people"].correct == 1
    assert report.by_type["scene"].correct == 0
    assert report.by_type["clothing"].recall is None
    # a missing prediction is a miss
    assert recall_at_1({("s", "1"): box(0, 0)}, hand_gt).recall == pytest.approx(1 / 3)


def test_union_of_gt_boxes_is_the_target():
    entity = EntityMention(phrase_id="1", token_span=(0, 1), gt_boxes=[box(0, 0), box(10, 0)])
    gt = [SentenceRecord(image_id="img", sentence_id="s", tokens=["dogs"], parse="(NP)", entities=[entity])]
    assert recall_at_1({("s", "1"): box(0, 0, w=20.0)}, gt).recall == 1.0
    assert recall_at_1({("s", "1"): box(0, 0)}, gt).recall == 1.0
    assert recall_at_1({("s", "1"): box(0, 0, w=8.0)}, gt).recall == 0.0


def test_upper_bound_dominates_recall(hand_gt):
    candidates = {("s", "1"): [box(0, 0), box(50, 50)], ("s", "2"): [box(0, 0)], ("s", "3"): [box(0, 50)]}
    predictions = {("s", "1"): box(50, 50), ("s", "2"): box(0, 0), ("s", "3"): box(0, 50)}
    assert upper_bound(candidates, hand_gt).recall == pytest.approx(2 / 3)
    assert recall_at_1(predictions, hand_gt).recall == pytest.approx(1 / 3)


def test_synthetic_data_is_seeded():
    config = SynthConfig(n_images=5)
    first, again = synth_grounding_dataset(config, seed=4), synth_grounding_dataset(config, seed=4)
    other = synth_grounding_dataset(config, seed=5)
    for a, b in zip(first.tables, again.tables):
        np.testing.assert_array_equal(a.costs, b.costs)
    assert not all(np.array_equal(a.costs, b.costs) for a, b in zip(first.tables, other.tables))


def test_relation_density_zero_gives_no_relations(pipeline):
    data = synth_grounding_dataset(SynthConfig(n_images=5, relation_density=0.0), seed=0)
    assert data.relations == []
    assert data.pair_examples == []
    assert all(pipeline.relations(s) == [] for s in data.sentences)


def test_parsed_relations_follow_the_planted_chain(clean, pipeline):
    for sentence in clean.sentences:
        relations = pipeline.relations(sentence)
        assert len(relations) == clean.config.phrases_per_image - 1
        assert all(r.relation_word == "near" for r in relations)


def test_jsonl_errors_name_the_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"key": "a", "vec": [1, 2]}\n\nnot json\n', encoding="utf-8")
    with pytest.raises(DataFormatError) as info:
        io.read_vectors(path)
    assert info.value.line == 3
    with pytest.raises(DataFormatError):
        io.read_vectors(tmp_path / "missing.jsonl")


def test_vectors_with_sidecar(tmp_path):
    vectors = {"b": np.array([0.5, -1.0, 2.0]), "a": np.array([1.0, 0.25, 0.0])}
    io.write_vectors(tmp_path / "vecs.jsonl", vectors, sidecar=True)
    assert (tmp_path / "vecs.f32").exists()
    loaded = io.read_vectors(tmp_path / "vecs.jsonl")
    assert sorted(loaded) == ["a", "b"]
    np.testing.assert_array_equal(loaded["b"], vectors["b"])


def test_mixed_vector_dimensions_fail(tmp_path):
    path = tmp_path / "vecs.jsonl"
    path.write_text(
        json.dumps({"key": "a", "vec": [1, 2]}) + "\n" + json.dumps({"key": "b", "vec": [1, 2, 3]}) + "\n",
        encoding="utf-8",
    )
    with pytest.raises(DimensionError):
        io.read_vectors(path)


def test_cue_tables_survive_a_file(clean, tmp_path):
    io.write_cue_tables(tmp_path / "cues.jsonl", clean.tables)
    tables = io.read_cue_tables(tmp_path / "cues.jsonl")
    assert [t.sentence_id for t in tables] == [t.sentence_id for t in clean.tables]
    np.testing.assert_allclose(tables[0].costs, clean.tables[0].costs)
    np.testing.assert_array_equal(tables[0].available, clean.tables[0].available)


def test_sentences_and_candidates_survive_a_file(clean, tmp_path):
    io.write_sentences(tmp_path / "sentences.jsonl", clean.sentences)
    assert io.read_sentences(tmp_path / "sentences.jsonl") == clean.sentences

    io.write_candidates(tmp_path / "candidates.jsonl", clean.candidates)
    loaded = io.read_candidates(tmp_path / "candidates.jsonl")
    assert list(loaded) == [c.image_id for c in clean.candidates]
    assert list(loaded.values()) == clean.candidates


def test_predictions_survive_a_file(tmp_path):
    predictions = [
        io.PhrasePrediction(
            image_id="img", sentence_id="s", phrase_id="1", phrase_type=PhraseType.PEOPLE, box=box(3.5, 4.0), candidate=2
        ),
        io.PhrasePrediction(image_id="img", sentence_id="s", phrase_id="2"),
    ]
    assert io.write_predictions(tmp_path / "pred.jsonl", predictions) == 2
    loaded = io.read_predictions(tmp_path / "pred.jsonl")
    assert loaded == predictions
    assert io.prediction_map(loaded) == {("s", "1"): box(3.5, 4.0), ("s", "2"): None}


def test_vrd_files_survive_a_file(tmp_path):
    dataset = synth_vrd_dataset(n_train=4, n_test=2, seed=1)
    images = dataset.train + dataset.test
    io.write_vrd_detections(tmp_path / "det.jsonl", [t.detections for t in images])
    io.write_vrd_ground_truth(tmp_path / "gt.jsonl", [t.gt for t in images])
    assert io.read_vrd_detections(tmp_path / "det.jsonl") == [t.detections for t in images]
    assert io.read_vrd_ground_truth(tmp_path / "gt.jsonl") == [t.gt for t in images]


def test_bundle_save_and_load(tmp_path):
    bundle = WeightedModelBundle(ws=cca_only(), wq=[0.0, 1.5, 0.0])
    bundle.save(tmp_path / "bundle.json")
    loaded = WeightedModelBundle.load(tmp_path / "bundle.json")
    np.testing.assert_array_equal(loaded.ws, bundle.ws)
    assert loaded.get_summary() == bundle.get_summary()


def test_bundle_dimensions_are_checked(tmp_path):
    bundle = WeightedModelBundle(ws=np.ones(5))
    assert bundle.validate_dimensions() == ["ws has 5 weights, expected 14"]
    with pytest.raises(DimensionError):
        bundle.save(tmp_path / "bundle.json")
    (tmp_path / "other.json").write_text(json.dumps({"format": "something-else"}), encoding="utf-8")
    with pytest.raises(DataFormatError):
        WeightedModelBundle.load(tmp_path / "other.json")


def test_pipeline_grounds_clean_tables(clean, pipeline, tmp_path):
    result = pipeline.run_tables(clean.tables, clean.sentences)
    assert result.get_summary()["phrases"] == sum(len(t.phrase_ids) for t in clean.tables)
    report, by_cue = pipeline.evaluate(result, clean.sentences)
    assert report.recall == 1.0
    assert by_cue["cca"].recall == 1.0

    bound = retrieval_upper_bound(clean.tables, clean.sentences, pipeline.bundle.ws)
    assert bound.recall >= report.recall

    assert save_predictions(tmp_path / "pred.jsonl", result) == len(result.predictions)
    again = io.read_predictions(tmp_path / "pred.jsonl")
    assert [p.key for p in again] == [p.key for p in result.predictions]


def test_pipeline_runs_from_raw_candidates(clean, pipeline):
    candidates = {c.image_id: c for c in clean.candidates}
    result = pipeline.run(clean.sentences, candidates, threads=2)
    assert [s.sentence_id for s in result.sentences] == [s.sentence_id for s in clean.sentences]
    assert len(result.tables) == len(clean.sentences)
    for sentence in result.sentences:
        assert sentence.relations == clean.config.phrases_per_image - 1
        assert all(p.box is not None for p in sentence.predictions)
    predictions = io.prediction_map(result.predictions)
    report = recall_at_1(predictions, clean.sentences)
    table_bound = upper_bound(
        {(t.sentence_id, pid): t.candidates for t in result.tables for pid in t.phrase_ids}, clean.sentences
    )
    assert table_bound.recall >= report.recall
    counts = recall_by_cue(predictions, clean.sentences, result.tables)
    assert counts["cca"].total == report.overall.total


def test_missing_candidates_give_empty_result(clean, pipeline):
    result = pipeline.run(clean.sentences[:2], {})
    assert result.predictions == []
    assert result.tables == []


def test_cue_table_validation(clean):
    validator = BundleValidator()
    table = clean.tables[0]
    assert validator.validate_cue_table(table) == []

    costs = table.costs.copy()
    unused = int(np.flatnonzero(~table.available[0])[0])
    costs[0, :, unused] = 0.5
    available = table.available.copy()
    available[1, SLOT_INDEX["cca"]] = False
    broken = table.model_copy(update={"costs": costs, "available": available})
    errors = validator.validate_cue_table(broken)
    assert f"{table.phrase_ids[0]}: unavailable cues must store 0" in errors
    assert f"{table.phrase_ids[1]}: cca cue must always be available" in errors


def test_assignment_validation():
    problem = JointProblem(unary=[np.array([1.0, 0.0]), np.array([0.0, 2.0])])
    validator = BundleValidator()
    assert validator.validate_assignment(problem, Assignment(chosen=[1, 0], objective=0.0)) == []
    assert validator.validate_assignment(problem, Assignment(chosen=[1], objective=0.0)) == [
        "1 indices for 2 phrases"
    ]
    assert validator.validate_assignment(problem, Assignment(chosen=[2, 0], objective=0.0)) == [
        "phrase 0: index 2 outside 2 candidates"
    ]
    assert validator.validate_assignment(problem, Assignment(chosen=[0, 0], objective=0.0)) == [
        "objective 0.0 != recomputed 1.0"
    ]


def test_debug_pipeline_checks_every_table(clean):
    debug = GroundingPipeline(GroundkitConfig(debug=True), WeightedModelBundle(ws=cca_only()))
    result = debug.run_tables(clean.tables[:3], clean.sentences[:3])
    assert len(result.predictions) == sum(len(t.phrase_ids) for t in clean.tables[:3])
