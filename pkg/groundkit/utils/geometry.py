"""
Bounding-box arithmetic for GROUNDKIT

All functions are pure. Boxes use the (x, y, w, h) convention everywhere;
array helpers take an (N, 4) array in the same layout.
"""

from typing import List, Sequence

import numpy as np

from ..models.geometry import BoundingBox, ImageSize


def boxes_to_array(boxes: Sequence[BoundingBox]) -> np.ndarray:
    """Stack boxes into an (N, 4) float array"""
    if not boxes:
        return np.zeros((0, 4), dtype=float)
    return np.array([[b.x, b.y, b.w, b.h] for b in boxes], dtype=float)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union; exactly 0 when the boxes do not overlap"""
    ix = min(a.x2, b.x2) - max(a.x, b.x)
    iy = min(a.y2, b.y2) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    # areas from corners so that iou(a, a) is exactly 1
    area_a = (a.x2 - a.x) * (a.y2 - a.y)
    area_b = (b.x2 - b.x) * (b.y2 - b.y)
    return inter / (area_a + area_b - inter)


def iou_many(box: BoundingBox, others: np.ndarray) -> np.ndarray:
    """IOU of one box against an (N, 4) array of boxes"""
    others = np.asarray(others, dtype=float).reshape(-1, 4)
    x1 = np.maximum(box.x, others[:, 0])
    y1 = np.maximum(box.y, others[:, 1])
    x2 = np.minimum(box.x2, others[:, 0] + others[:, 2])
    y2 = np.minimum(box.y2, others[:, 1] + others[:, 3])
    inter = np.maximum(0.0, x2 - x1) * np.maximum(0.0, y2 - y1)
    union = box.area + others[:, 2] * others[:, 3] - inter
    return np.where(inter > 0, inter / union, 0.0)


def union_hull(boxes: Sequence[BoundingBox]) -> BoundingBox:
    """Smallest axis-aligned box containing every input box"""
    if not boxes:
        raise ValueError("no boxes")
    x1 = min(b.x for b in boxes)
    y1 = min(b.y for b in boxes)
    x2 = max(b.x2 for b in boxes)
    y2 = max(b.y2 for b in boxes)
    return BoundingBox.from_corners(x1, y1, x2, y2)


def contains(outer: BoundingBox, inner: BoundingBox) -> bool:
    return (
        outer.x <= inner.x
        and outer.y <= inner.y
        and outer.x2 >= inner.x2
        and outer.y2 >= inner.y2
    )


def clip_box(box: BoundingBox, img: ImageSize) -> BoundingBox:
    """Clip a box to the image; boxes fully outside collapse to a 1-pixel box at the border"""
    x1 = min(max(box.x, 0.0), img.width - 1.0)
    y1 = min(max(box.y, 0.0), img.height - 1.0)
    x2 = max(min(box.x2, img.width), x1 + 1.0)
    y2 = max(min(box.y2, img.height), y1 + 1.0)
    return BoundingBox.from_corners(x1, y1, x2, y2)


def position_feature(box: BoundingBox, img: ImageSize) -> np.ndarray:
    """[cx/W, cy/H, area fraction, aspect ratio w/h]"""
    cx = box.x + box.w / 2.0
    cy = box.y + box.h / 2.0
    return np.array(
        [cx / img.width, cy / img.height, box.area / img.area, box.w / box.h], dtype=float
    )


def spatial_pair_feature(b: BoundingBox, b2: BoundingBox) -> np.ndarray:
    """Relative offset and scale of b2 with respect to b"""
    return np.array(
        [(b.x - b2.x) / b.w, (b.y - b2.y) / b.h, b2.w / b.w, b2.h / b.h], dtype=float
    )


def nms(boxes: Sequence[BoundingBox], scores: Sequence[float], iou_threshold: float) -> List[int]:
    """
    Greedy non-maximum suppression

    Keeps the highest-scoring remaining box and discards every box whose IOU
    with it exceeds the threshold. Equal scores keep the lower input index first.

    Returns:
        Kept indices in descending score order
    """
    if len(boxes) != len(scores):
        raise ValueError(f"Got {len(boxes)} boxes but {len(scores)} scores")
    if not 0.0 < iou_threshold <= 1.0:
        raise ValueError("iou_threshold must be in (0, 1]")
    if not boxes:
        return []

    arr = boxes_to_array(boxes)
    scores_arr = np.asarray(scores, dtype=float)
    # stable sort on negated scores keeps index order among ties
    order = np.argsort(-scores_arr, kind="stable")

    keep: List[int] = []
    while order.size > 0:
        i = int(order[0])
        keep.append(i)
        overlaps = iou_many(boxes[i], arr[order[1:]])
        order = order[1:][overlaps <= iou_threshold]
    return keep
