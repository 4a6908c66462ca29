"""
Phrase-pair cues: spatial relation classifiers for verbs, prepositions and attachments
"""

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..errors import DataFormatError, TrainingError
from ..language.tuples import is_attachment_pair
from ..learners.svm import RbfSvmModel, RbfSvmTrainer
from ..models.cues import N_PPC, PairClassifierKey
from ..models.geometry import BoundingBox
from ..models.inference import PairTerm
from ..models.language import RelationKind, RelationTuple
from ..utils.geometry import boxes_to_array, iou_many, spatial_pair_feature, union_hull
from ..utils.logger import get_logger
from ..utils.sanitizer import PairKeyBuilder

BANK_FORMAT = "groundkit-pair-bank/1"
PAIR_FEATURE_DIM = 6
PPC_INDEX: Dict[RelationKind, int] = {kind: i for i, kind in enumerate(RelationKind)}


def pair_feature(b: BoundingBox, b2: BoundingBox, s_left: float, s_right: float) -> np.ndarray:
    """Relative box geometry followed by the two phrases' SPC scores"""
    return np.concatenate([spatial_pair_feature(b, b2), [float(s_left), float(s_right)]])


def pair_features_grid(
    left_boxes: Sequence[BoundingBox],
    right_boxes: Sequence[BoundingBox],
    left_scores: Sequence[float],
    right_scores: Sequence[float],
) -> np.ndarray:
    """(len(left) * len(right)) x 6 pair features, left index major"""
    a = boxes_to_array(left_boxes)[:, None, :]
    b = boxes_to_array(right_boxes)[None, :, :]
    shape = (a.shape[0], b.shape[1])
    feats = np.stack(
        [
            (a[..., 0] - b[..., 0]) / a[..., 2],
            (a[..., 1] - b[..., 1]) / a[..., 3],
            b[..., 2] / a[..., 2],
            b[..., 3] / a[..., 3],
            np.broadcast_to(np.asarray(left_scores, dtype=float)[:, None], shape),
            np.broadcast_to(np.asarray(right_scores, dtype=float)[None, :], shape),
        ],
        axis=-1,
    )
    return feats.reshape(-1, PAIR_FEATURE_DIM)


def effective_kind(relation: RelationTuple) -> RelationKind:
    """People -> clothing/bodyparts pairs are always attachments"""
    if is_attachment_pair(relation.left, relation.right):
        return RelationKind.ATTACHMENT
    return relation.kind


def as_effective(relation: RelationTuple) -> RelationTuple:
    if effective_kind(relation) == relation.kind:
        return relation
    return relation.model_copy(update={"kind": RelationKind.ATTACHMENT})


class PairModelBank:
    """
    Pairwise spatial SVMs keyed by (kind, left, relation, right)

    Lookups are order sensitive. ``key_builder`` turns relation tuples into
    keys; it is not serialized and has to be supplied again on load.
    """

    def __init__(
        self,
        models: Optional[Dict[PairClassifierKey, RbfSvmModel]] = None,
        min_count: int = 30,
        counts: Optional[Dict[str, int]] = None,
        key_builder: Optional[PairKeyBuilder] = None,
    ):
        self.models: Dict[PairClassifierKey, RbfSvmModel] = dict(models or {})
        for key, model in self.models.items():
            if model.dim != PAIR_FEATURE_DIM:
                raise DataFormatError(f"Pair model {key} has dim {model.dim}, expected 6")
        self.min_count = min_count
        self.counts = dict(counts or {})
        self.key_builder = key_builder or PairKeyBuilder()

    def __len__(self) -> int:
        return len(self.models)

    def __contains__(self, key: PairClassifierKey) -> bool:
        return key in self.models

    def keys(self) -> List[PairClassifierKey]:
        return sorted(self.models, key=lambda k: k.file_stem)

    def key_for(self, relation: RelationTuple) -> Optional[PairClassifierKey]:
        return self.key_builder.key_for(as_effective(relation))

    def model_for(self, relation: RelationTuple) -> Optional[RbfSvmModel]:
        key = self.key_for(relation)
        return self.models.get(key) if key is not None else None

    def save(self, directory: Union[str, Path]) -> None:
        """One JSON file per model plus index.json"""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        entries = []
        for key in self.keys():
            filename = f"{key.file_stem}.json"
            self.models[key].save(directory / filename)
            entries.append(
                {
                    "kind": key.kind.value,
                    "left_key": key.left_key,
                    "rel_key": key.rel_key,
                    "right_key": key.right_key,
                    "file": filename,
                    "count": self.counts.get(key.file_stem, 0),
                }
            )
        index = {"format": BANK_FORMAT, "min_count": self.min_count, "models": entries}
        with open(directory / "index.json", "w", encoding="utf-8") as f:
            json.dump(index, f, indent=2, sort_keys=True)

    @classmethod
    def load(
        cls, directory: Union[str, Path], key_builder: Optional[PairKeyBuilder] = None
    ) -> "PairModelBank":
        directory = Path(directory)
        index_path = directory / "index.json"
        if not index_path.exists():
            raise DataFormatError("Pair bank index not found", path=str(index_path))
        with open(index_path, "r", encoding="utf-8") as f:
            index = json.load(f)
        if index.get("format") != BANK_FORMAT:
            raise DataFormatError(f"Not a pair bank (format={index.get('format')!r})", path=str(index_path))

        models, counts = {}, {}
        for entry in index.get("models", []):
            key = PairClassifierKey(
                kind=RelationKind(entry["kind"]),
                left_key=entry["left_key"],
                rel_key=entry.get("rel_key", ""),
                right_key=entry["right_key"],
            )
            models[key] = RbfSvmModel.load(directory / entry["file"])
            counts[key.file_stem] = int(entry.get("count", 0))
        return cls(models, index.get("min_count", 30), counts, key_builder)

    def get_summary(self) -> Dict[str, Any]:
        by_kind = {kind.value: 0 for kind in RelationKind}
        for key in self.models:
            by_kind[key.kind.value] += 1
        return {"models": len(self.models), "by_kind": by_kind, "min_count": self.min_count}


class PairSample(BaseModel):
    """A relation with its image's candidate boxes and both phrases' SPC scores"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    relation: RelationTuple
    candidates: List[BoundingBox]
    left_scores: np.ndarray = Field(..., description="SPC score of every candidate for the left phrase")
    right_scores: np.ndarray = Field(..., description="SPC score of every candidate for the right phrase")

    @field_validator("left_scores", "right_scores", mode="before")
    @classmethod
    def coerce_scores(cls, v):
        return np.asarray(v, dtype=float).reshape(-1)

    @model_validator(mode="after")
    def validate_lengths(self):
        n = len(self.candidates)
        if self.left_scores.size != n or self.right_scores.size != n:
            raise ValueError("One SPC score per candidate required on both sides")
        return self

    def correct_pairs(self, correct_iou: float = 0.5) -> Tuple[np.ndarray, np.ndarray]:
        """Boolean masks of candidates localizing the left and right phrases"""
        arr = boxes_to_array(self.candidates)
        masks = []
        for entity in (self.relation.left, self.relation.right):
            if not entity.gt_boxes:
                masks.append(np.zeros(len(self.candidates), dtype=bool))
            else:
                masks.append(iou_many(union_hull(entity.gt_boxes), arr) >= correct_iou)
        return masks[0], masks[1]


class PairBankTrainer:
    """
    Trains one spatial SVM per pair key seen at least ``min_count`` times

    The positive example of a sample is its best-overlapping candidate pair
    (both sides at IOU >= correct_iou); negatives are random candidate
    pairings that do not localize both phrases.
    """

    def __init__(
        self,
        key_builder: Optional[PairKeyBuilder] = None,
        min_count: int = 30,
        neg_ratio: int = 3,
        trainer: Optional[RbfSvmTrainer] = None,
        correct_iou: float = 0.5,
        debug: bool = False,
    ):
        self.key_builder = key_builder or PairKeyBuilder()
        self.min_count = min_count
        self.neg_ratio = neg_ratio
        self.trainer = trainer or RbfSvmTrainer(debug=debug)
        self.correct_iou = correct_iou
        self.logger = get_logger(__name__, debug=debug)
        self.skipped: Dict[str, int] = {}

    def examples(
        self, samples: Iterable[PairSample], seed: int = 0
    ) -> Dict[PairClassifierKey, Tuple[List[np.ndarray], List[np.ndarray]]]:
        """Positive and negative pair features grouped by key"""
        rng = np.random.default_rng(seed)
        grouped: Dict[PairClassifierKey, Tuple[List[np.ndarray], List[np.ndarray]]] = {}
        for sample in samples:
            key = self.key_builder.key_for(as_effective(sample.relation))
            if key is None:
                continue
            left_ok, right_ok = sample.correct_pairs(self.correct_iou)
            if not left_ok.any() or not right_ok.any():
                continue

            arr = boxes_to_array(sample.candidates)
            li = _best(sample.relation.left.gt_boxes, arr, left_ok)
            ri = _best(sample.relation.right.gt_boxes, arr, right_ok)
            pos, neg = grouped.setdefault(key, ([], []))
            pos.append(
                pair_feature(
                    sample.candidates[li], sample.candidates[ri],
                    sample.left_scores[li], sample.right_scores[ri],
                )
            )

            bad = ~(left_ok[:, None] & right_ok[None, :])
            np.fill_diagonal(bad, False)
            pool = np.flatnonzero(bad.reshape(-1))
            if pool.size == 0:
                continue
            picks = rng.choice(pool, size=min(self.neg_ratio, pool.size), replace=False)
            n = len(sample.candidates)
            for flat in sorted(int(p) for p in picks):
                i, j = divmod(flat, n)
                neg.append(
                    pair_feature(
                        sample.candidates[i], sample.candidates[j],
                        sample.left_scores[i], sample.right_scores[j],
                    )
                )
        return grouped

    def fit(self, samples: Iterable[PairSample], seed: int = 0) -> PairModelBank:
        grouped = self.examples(samples, seed)
        models: Dict[PairClassifierKey, RbfSvmModel] = {}
        counts: Dict[str, int] = {}
        self.skipped = {}

        for offset, key in enumerate(sorted(grouped, key=lambda k: k.file_stem)):
            pos, neg = grouped[key]
            if len(pos) < self.min_count:
                self.skipped[key.file_stem] = len(pos)
                continue
            if not neg:
                self.skipped[key.file_stem] = len(pos)
                self.logger.warning(f"⚠️ No negative pairings for {key}, skipped")
                continue
            try:
                models[key] = self.trainer.fit(np.array(pos), np.array(neg), seed=seed + offset)
            except TrainingError as e:
                self.skipped[key.file_stem] = len(pos)
                self.logger.warning(f"⚠️ Could not train {key}: {e}")
                continue
            counts[key.file_stem] = len(pos)
            self.logger.debug(f"🔍 Trained {key} on {len(pos)} positives, {len(neg)} negatives")

        self.logger.info(
            f"✅ Pair bank: {len(models)} models trained, {len(self.skipped)} keys under "
            f"min_count={self.min_count} or untrainable"
        )
        return PairModelBank(models, self.min_count, counts, self.key_builder)


def _best(gt_boxes: List[BoundingBox], arr: np.ndarray, ok: np.ndarray) -> int:
    overlaps = np.where(ok, iou_many(union_hull(gt_boxes), arr), -1.0)
    return int(np.argmax(overlaps))


def train_pair_bank(
    samples: Iterable[PairSample],
    key_builder: Optional[PairKeyBuilder] = None,
    min_count: int = 30,
    neg_ratio: int = 3,
    seed: int = 0,
    trainer: Optional[RbfSvmTrainer] = None,
) -> PairModelBank:
    """Train the pair bank (see PairBankTrainer)"""
    bank_trainer = PairBankTrainer(key_builder, min_count, neg_ratio, trainer)
    return bank_trainer.fit(samples, seed=seed)


def ppc_cost(
    bank: PairModelBank,
    r: RelationTuple,
    b: BoundingBox,
    b2: BoundingBox,
    s_left: float,
    s_right: float,
) -> Tuple[float, bool]:
    """(-log P(relation | boxes), True), or (0, False) when the bank has no model for r"""
    model = bank.model_for(r)
    if model is None:
        return 0.0, False
    prob = float(model.probabilities(pair_feature(b, b2, s_left, s_right)[None, :])[0])
    return max(0.0, -float(np.log(prob))), True


def pair_cost_tensor(
    bank: PairModelBank,
    r: RelationTuple,
    left_boxes: Sequence[BoundingBox],
    right_boxes: Sequence[BoundingBox],
    left_scores: Sequence[float],
    right_scores: Sequence[float],
) -> Tuple[np.ndarray, np.ndarray]:
    """
    PPC costs of every candidate pairing

    Returns:
        (len(left) x len(right) x 3 costs, 3 availability flags); only the
        slot of the relation's effective kind can be available
    """
    costs = np.zeros((len(left_boxes), len(right_boxes), N_PPC))
    available = np.zeros(N_PPC, dtype=bool)
    model = bank.model_for(r)
    if model is None:
        return costs, available

    feats = pair_features_grid(left_boxes, right_boxes, left_scores, right_scores)
    probs = model.probabilities(feats).reshape(len(left_boxes), len(right_boxes))
    slot = PPC_INDEX[effective_kind(r)]
    costs[:, :, slot] = np.maximum(0.0, -np.log(probs))
    available[slot] = True
    return costs, available


def weighted_pair_terms(
    relations: Sequence[RelationTuple],
    phrase_index: Dict[str, int],
    bank: PairModelBank,
    boxes: Sequence[Sequence[BoundingBox]],
    scores: Sequence[Sequence[float]],
    wq: np.ndarray,
) -> List[PairTerm]:
    """
    Weighted pair matrices for a sentence, one per ordered phrase pair

    Relations between the same ordered pair are summed. Relations whose
    phrases are not in ``phrase_index`` are ignored.
    """
    wq = np.asarray(wq, dtype=float)
    merged: Dict[Tuple[int, int], np.ndarray] = {}
    for relation in relations:
        i = phrase_index.get(relation.left.phrase_id)
        j = phrase_index.get(relation.right.phrase_id)
        if i is None or j is None or i == j:
            continue
        costs, available = pair_cost_tensor(bank, relation, boxes[i], boxes[j], scores[i], scores[j])
        if not available.any():
            continue
        weighted = costs @ (available.astype(float) * wq)
        merged[(i, j)] = merged[(i, j)] + weighted if (i, j) in merged else weighted
    return [PairTerm(i=i, j=j, costs=m) for (i, j), m in sorted(merged.items())]
