#!/usr/bin/env python3
"""
Box arithmetic tests: IOU, hulls, position features and NMS
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from groundkit.core.retrieval import retrieve_candidates
from groundkit.models.geometry import BoundingBox, ImageSize
from groundkit.utils.geometry import (
    clip_box,
    contains,
    iou,
    nms,
    position_feature,
    spatial_pair_feature,
    union_hull,
)


def box(x, y, w, h):
    return BoundingBox(x=x, y=y, w=w, h=h)


def random_boxes(rng, n):
    return [
        box(*rng.uniform(0, 90, 2), *rng.uniform(1, 40, 2))
        for _ in range(n)
    ]


def test_iou_examples():
    a = box(0, 0, 10, 10)
    assert iou(a, a) == 1.0
    assert iou(a, box(20, 20, 5, 5)) == 0.0
    assert iou(a, box(5, 5, 10, 10)) == pytest.approx(25 / 175)


def test_iou_symmetric_and_identity():
    rng = np.random.default_rng(3)
    boxes = random_boxes(rng, 60)
    for a, b in zip(boxes[::2], boxes[1::2]):
        assert iou(a, b) == iou(b, a)
        assert 0.0 <= iou(a, b) <= 1.0
    for b in boxes:
        assert iou(b, b) == 1.0


def test_iou_touching_edges_is_zero():
    assert iou(box(0, 0, 10, 10), box(10, 0, 10, 10)) == 0.0


def test_box_rejects_degenerate_sizes():
    with pytest.raises(ValueError):
        box(0, 0, 0, 10)
    with pytest.raises(ValueError):
        box(0, 0, 10, float("nan"))


def test_union_hull_examples():
    assert union_hull([box(0, 0, 10, 10)]) == box(0, 0, 10, 10)
    assert union_hull([box(0, 0, 10, 10), box(20, 0, 10, 10)]) == box(0, 0, 30, 10)
    assert union_hull([box(5, 5, 1, 1), box(0, 0, 10, 10)]) == box(0, 0, 10, 10)
    with pytest.raises(ValueError, match="no boxes"):
        union_hull([])


def test_union_hull_contains_inputs():
    rng = np.random.default_rng(5)
    for _ in range(20):
        boxes = random_boxes(rng, 4)
        hull = union_hull(boxes)
        assert all(contains(hull, b) for b in boxes)


def test_position_feature_examples():
    img = ImageSize(width=100, height=100)
    assert_allclose(position_feature(box(0, 0, 100, 100), img), [0.5, 0.5, 1.0, 1.0])
    assert_allclose(position_feature(box(0, 0, 50, 100), img), [0.25, 0.5, 0.5, 0.5])
    assert_allclose(position_feature(box(25, 25, 50, 50), img), [0.5, 0.5, 0.25, 1.0])


def test_spatial_pair_feature_examples():
    b = box(10, 20, 40, 80)
    assert_allclose(spatial_pair_feature(b, b), [0, 0, 1, 1])
    assert_allclose(spatial_pair_feature(b, box(30, 60, 20, 40)), [-0.5, -0.5, 0.5, 0.5])
    assert_allclose(
        spatial_pair_feature(box(0, 0, 10, 10), box(10, 0, 10, 10)), [-1, 0, 1, 1]
    )


def test_clip_box_keeps_inside_and_collapses_outside():
    img = ImageSize(width=100, height=50)
    assert clip_box(box(10, 10, 20, 20), img) == box(10, 10, 20, 20)
    clipped = clip_box(box(90, 40, 30, 30), img)
    assert clipped.x2 == 100 and clipped.y2 == 50
    outside = clip_box(box(500, 500, 10, 10), img)
    assert outside.w == 1.0 and outside.h == 1.0
    assert outside.x2 <= img.width and outside.y2 <= img.height


def test_nms_examples():
    a = box(0, 0, 10, 10)
    assert nms([a], [0.3], 0.8) == [0]
    assert nms([a, a], [0.9, 0.8], 0.8) == [0]
    assert nms([a, box(50, 50, 10, 10)], [0.1, 0.7], 0.8) == [1, 0]
    with pytest.raises(ValueError):
        nms([a], [0.1, 0.2], 0.8)


def test_nms_properties():
    rng = np.random.default_rng(11)
    boxes = random_boxes(rng, 40)
    scores = rng.uniform(size=40).tolist()
    keep = nms(boxes, scores, 0.5)
    assert len(set(keep)) == len(keep)
    kept_scores = [scores[i] for i in keep]
    assert kept_scores == sorted(kept_scores, reverse=True)
    for i, a in enumerate(keep):
        for b in keep[i + 1 :]:
            assert iou(boxes[a], boxes[b]) <= 0.5


def test_retrieve_candidates_prefers_low_cost_and_truncates():
    boxes = [box(0, 0, 10, 10), box(1, 0, 10, 10), box(40, 0, 10, 10), box(80, 0, 10, 10)]
    costs = [0.5, 0.1, 0.3, 0.9]
    kept = retrieve_candidates(boxes, costs, m=2, nms_iou=0.5)
    # box 1 suppresses its near-duplicate box 0
    assert [c.index for c in kept] == [1, 2]
    assert kept[0].score == pytest.approx(0.1)


def test_retrieve_candidates_may_return_fewer_than_m():
    boxes = [box(0, 0, 10, 10), box(0, 0, 10, 10)]
    kept = retrieve_candidates(boxes, [0.2, 0.4], m=30, nms_iou=0.8)
    assert [c.index for c in kept] == [0]
    with pytest.raises(ValueError):
        retrieve_candidates(boxes, [0.2], m=3)
