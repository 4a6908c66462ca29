"""
Candidate retrieval: top-M boxes per phrase after non-maximum suppression
"""

from typing import List, Sequence

import numpy as np

from ..models.geometry import BoundingBox
from ..models.inference import RankedCandidate
from ..utils.geometry import nms


def retrieve_candidates(
    all_boxes: Sequence[BoundingBox],
    spc_scores: Sequence[float],
    m: int = 30,
    nms_iou: float = 0.8,
) -> List[RankedCandidate]:
    """
    Keep the best-scoring boxes of one phrase

    Scores are costs: NMS runs over ascending-cost order and the survivors
    are truncated to ``m``. Fewer than ``m`` may come back.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    scores = np.asarray(spc_scores, dtype=float)
    if scores.size != len(all_boxes):
        raise ValueError(f"Got {len(all_boxes)} boxes but {scores.size} scores")
    kept = nms(list(all_boxes), (-scores).tolist(), nms_iou)[:m]
    return [RankedCandidate(index=i, box=all_boxes[i], score=float(scores[i])) for i in kept]
