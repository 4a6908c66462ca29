#!/usr/bin/env python3
"""
Metric tests against hand-computed cases in testdata/metric_cases.json
"""

import json
from pathlib import Path

import pytest

from groundkit.core.metrics import recall_at_1, upper_bound
from groundkit.core.vrd import eval_recall_at
from groundkit.models.geometry import BoundingBox
from groundkit.models.language import SentenceRecord
from groundkit.models.vrd import N_VRD_FEATURES, RelationshipCandidate, VrdGroundTruth

CASES = json.loads((Path(__file__).parent / "testdata" / "metric_cases.json").read_text())


def sentence(entities):
    return SentenceRecord(
        image_id="img",
        sentence_id="s",
        tokens=["w"] * len(entities),
        parse="(ROOT)",
        entities=[
            {"phrase_id": e["phrase_id"], "token_span": (i, i + 1), "gt_boxes": e["gt_boxes"]}
            for i, e in enumerate(entities)
        ],
    )


def relationship_candidate(row):
    s, p, o, sbox, obox = row
    return RelationshipCandidate(
        subject_index=0,
        object_index=1,
        subject_class=s,
        object_class=o,
        subject_box=sbox,
        object_box=obox,
        predicate=p,
        predicate_index=0,
        feature=[0.0] * N_VRD_FEATURES,
        score=0.0,
    )


def ground_truth(rows):
    return VrdGroundTruth(
        image_id="img",
        relationships=[
            {"subject_class": s, "predicate": p, "object_class": o, "subject_box": sbox, "object_box": obox}
            for s, p, o, sbox, obox in rows
        ],
    )


def test_fixture_covers_every_metric():
    assert len(CASES) == 10
    assert {case["metric"] for case in CASES} == {"recall_at_1", "upper_bound", "eval_recall_at"}


@pytest.mark.parametrize("case", CASES, ids=[case["name"] for case in CASES])
def test_metric_case(case):
    expected = case["expected"]
    if case["metric"] == "eval_recall_at":
        candidates = [relationship_candidate(row) for row in case["candidates"]]
        result = eval_recall_at(candidates, ground_truth(case["gt"]), k=case["k"])
        assert (result.matched, result.total) == (expected["correct"], expected["total"])
        assert result.recall == pytest.approx(expected["correct"] / expected["total"])
        return

    gt = [sentence(case["entities"])]
    if case["metric"] == "recall_at_1":
        predictions = {("s", pid): BoundingBox.from_list(box) for pid, box in case["predictions"].items()}
        report = recall_at_1(predictions, gt)
    else:
        candidates = {
            ("s", pid): [BoundingBox.from_list(box) for box in boxes]
            for pid, boxes in case["candidates"].items()
        }
        report = upper_bound(candidates, gt)
    assert (report.overall.correct, report.overall.total) == (expected["correct"], expected["total"])
    assert report.by_type["other"].total == expected["total"]
