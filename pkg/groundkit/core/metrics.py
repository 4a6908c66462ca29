"""
Grounding metrics: Recall@1, upper bound and per-cue breakdowns
"""

from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from ..models.cues import SPC_SLOTS, CueCostTable
from ..models.geometry import BoundingBox
from ..models.language import PHRASE_TYPES, SentenceRecord
from ..utils.geometry import iou, union_hull

PhraseKey = Tuple[str, str]


class RecallCount(BaseModel):
    correct: int = 0
    total: int = 0

    @property
    def recall(self) -> Optional[float]:
        return self.correct / self.total if self.total else None

    def add(self, ok: bool) -> None:
        self.total += 1
        self.correct += int(ok)


class RecallReport(BaseModel):
    """Overall ratio plus the breakdown over the eight phrase types"""

    overall: RecallCount = Field(default_factory=RecallCount)
    by_type: Dict[str, RecallCount] = Field(
        default_factory=lambda: {t.value: RecallCount() for t in PHRASE_TYPES}
    )

    @property
    def recall(self) -> Optional[float]:
        return self.overall.recall

    def add(self, phrase_type: str, ok: bool) -> None:
        self.overall.add(ok)
        self.by_type.setdefault(phrase_type, RecallCount()).add(ok)

    def get_summary(self) -> Dict[str, object]:
        return {
            "recall": self.overall.recall,
            "correct": self.overall.correct,
            "total": self.overall.total,
            "by_type": {
                name: {"recall": c.recall, "correct": c.correct, "total": c.total}
                for name, c in self.by_type.items()
            },
        }


def _gt_phrases(gt: Sequence[SentenceRecord]):
    for record in gt:
        for entity in record.entities:
            if entity.gt_boxes:
                yield (record.sentence_id, entity.phrase_id), entity.phrase_type.value, union_hull(
                    entity.gt_boxes
                )


def recall_at_1(
    predictions: Mapping[PhraseKey, Optional[BoundingBox]],
    gt: Sequence[SentenceRecord],
    correct_iou: float = 0.5,
) -> RecallReport:
    """
    Fraction of GT phrases whose predicted box has IOU >= correct_iou with
    the union of the phrase's annotated boxes

    Phrases without GT boxes are excluded; a GT phrase without a prediction
    counts as a miss.
    """
    report = RecallReport()
    for key, phrase_type, gt_box in _gt_phrases(gt):
        box = predictions.get(key)
        report.add(phrase_type, box is not None and iou(box, gt_box) >= correct_iou)
    return report


def upper_bound(
    candidates: Mapping[PhraseKey, Sequence[BoundingBox]],
    gt: Sequence[SentenceRecord],
    correct_iou: float = 0.5,
) -> RecallReport:
    """Fraction of GT phrases with at least one candidate at IOU >= correct_iou"""
    report = RecallReport()
    for key, phrase_type, gt_box in _gt_phrases(gt):
        boxes = candidates.get(key, ())
        report.add(phrase_type, any(iou(b, gt_box) >= correct_iou for b in boxes))
    return report


def recall_by_cue(
    predictions: Mapping[PhraseKey, Optional[BoundingBox]],
    gt: Sequence[SentenceRecord],
    tables: Sequence[CueCostTable],
    correct_iou: float = 0.5,
) -> Dict[str, RecallCount]:
    """Recall@1 restricted, for every SPC slot, to the phrases where that slot is available"""
    available: Dict[PhraseKey, List[bool]] = {}
    for table in tables:
        for p, phrase_id in enumerate(table.phrase_ids):
            available[(table.sentence_id, phrase_id)] = [bool(a) for a in table.available[p]]

    counts = {slot: RecallCount() for slot in SPC_SLOTS}
    for key, _, gt_box in _gt_phrases(gt):
        flags = available.get(key)
        if flags is None:
            continue
        box = predictions.get(key)
        ok = box is not None and iou(box, gt_box) >= correct_iou
        for slot, flag in zip(SPC_SLOTS, flags):
            if flag:
                counts[slot].add(ok)
    return counts
