"""
Single-phrase cue costs and their assembly into cue tables
"""

import math
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from ..errors import DimensionError, MissingFeatureError, TrainingError
from ..learners.cca import CcaModel, embed
from ..learners.svm import PROB_FLOOR, RbfSvmModel, RbfSvmTrainer, predict_prob
from ..models.cues import (
    N_SPC,
    SIZE_SLOTS,
    SLOT_INDEX,
    CueCostTable,
    CueRow,
    DetectorScoreTable,
    PhraseCueConfig,
)
from ..models.geometry import BoundingBox, ImageSize
from ..models.language import EntityMention, PhraseType, RelationKind, RelationTuple, SentenceRecord
from ..utils.geometry import boxes_to_array, iou_many, position_feature, union_hull
from ..utils.logger import get_logger
from .io import ImageCandidates

# detector slot -> name of the score table feeding it
DETECTOR_SLOTS = ("object_det", "adjective", "subject_verb", "verb_object")


def region_key(image_id: str, box_index: int) -> str:
    """Vector table key of a candidate region"""
    return f"{image_id}/box/{box_index}"


def union_key(image_id: str, subject_index: int, object_index: int) -> str:
    """Vector table key of the union box of an ordered detection pair"""
    return f"{image_id}/union/{subject_index}-{object_index}"


def phrase_key(sentence_id: str, phrase_id: str) -> str:
    """Vector table key of a phrase"""
    return f"{sentence_id}/phrase/{phrase_id}"


def _neg_log(prob: float) -> float:
    return max(0.0, -math.log(prob))


def size_cost(box: BoundingBox, img: ImageSize) -> float:
    """1 - (w / W) * (h / H)"""
    return max(0.0, 1.0 - (box.w / img.width) * (box.h / img.height))


def position_cost(svm: Optional[RbfSvmModel], box: BoundingBox, img: ImageSize) -> Optional[float]:
    """-log P(type | position); None when the phrase type has no model"""
    if svm is None:
        return None
    return _neg_log(predict_prob(svm, position_feature(box, img)))


def detector_cost(
    table: DetectorScoreTable,
    categories: Sequence[str],
    image_id: str,
    box_index: int,
    prob_floor: float = PROB_FLOOR,
) -> Optional[float]:
    """
    -log of the mean detector probability over the matched categories

    Categories absent from the table count as ``prob_floor``. Returns None
    when no category matched.
    """
    if not categories:
        return None
    probs = [table.get(image_id, box_index, c, default=prob_floor) for c in categories]
    return _neg_log(max(float(np.mean(probs)), prob_floor))


def spc_score(row: CueRow, weights) -> np.ndarray:
    """Masked weighted sum of the cue costs of every candidate"""
    weights = np.asarray(weights, dtype=float).reshape(-1)
    if weights.size != N_SPC:
        raise DimensionError(f"SPC weights need {N_SPC} entries, got {weights.size}")
    return row.costs @ (row.available.astype(float) * weights)


def _words(entity: EntityMention) -> List[str]:
    return [t.lower() for t in entity.head_tokens]


def _dedup(items: List[str]) -> List[str]:
    return list(dict.fromkeys(items))


class CueAssembler:
    """
    Fills the 14 single-phrase cue slots of a phrase against its candidates

    Detector slots are routed through the phrase dictionaries; a slot whose
    dictionary does not match the phrase, or whose model is missing, is
    marked unavailable and stores 0.
    """

    def __init__(
        self,
        cue_config: PhraseCueConfig,
        cca_model: Optional[CcaModel] = None,
        position_svms: Optional[Mapping[str, RbfSvmModel]] = None,
        detector_tables: Optional[Mapping[str, DetectorScoreTable]] = None,
        prob_floor: float = PROB_FLOOR,
        debug: bool = False,
    ):
        self.cue_config = cue_config
        self.cca_model = cca_model
        self.position_svms = dict(position_svms or {})
        self.detector_tables = dict(detector_tables or {})
        self.prob_floor = prob_floor
        self.logger = get_logger(__name__, debug=debug)

    # Dictionary routing

    def object_categories(self, entity: EntityMention) -> List[str]:
        cats: List[str] = []
        for word in _words(entity):
            cats.extend(self.cue_config.object_dict.get(word, []))
        return _dedup(cats)

    def adjective_categories(self, entity: EntityMention) -> List[str]:
        """Adjective detectors; colour words on people use the people-specific detector"""
        is_people = entity.phrase_type == PhraseType.PEOPLE
        cats: List[str] = []
        for word in _words(entity):
            options = self.cue_config.adjective_dict.get(word, [])
            people = [c for c in options if c.startswith("people-")]
            if is_people and people:
                cats.extend(people)
            else:
                cats.extend(c for c in options if not c.startswith("people-"))
        return _dedup(cats)

    def _verb_of(self, relation: RelationTuple) -> Optional[str]:
        words = [relation.relation_word] if relation.kind == RelationKind.VERB else relation.rel_words
        for word in words:
            verb = self.cue_config.canonical_verb(word) if self.cue_config.verb_forms else word
            if verb:
                return verb
        return None

    def verb_categories(
        self, entity: EntityMention, tuples: Sequence[RelationTuple], as_subject: bool
    ) -> List[str]:
        """
        Subject-verb (or verb-object) detectors of the verbs the phrase takes part in

        The "<type>-<verb>" detector is used when the dictionary has it, the
        catch-all "<verb>" detector otherwise.
        """
        table = self.cue_config.subject_verb_dict if as_subject else self.cue_config.verb_object_dict
        cats: List[str] = []
        for relation in tuples:
            if relation.kind == RelationKind.PREPOSITION:
                continue
            side = relation.left if as_subject else relation.right
            if side.phrase_id != entity.phrase_id:
                continue
            verb = self._verb_of(relation)
            if verb is None or verb not in table:
                continue
            typed = f"{entity.phrase_type.value}-{verb}"
            cats.append(typed if typed in table[verb] else verb)
        return _dedup(cats)

    def phrase_categories(
        self, entity: EntityMention, tuples: Sequence[RelationTuple] = ()
    ) -> Dict[str, List[str]]:
        return {
            "object_det": self.object_categories(entity),
            "adjective": self.adjective_categories(entity),
            "subject_verb": self.verb_categories(entity, tuples, as_subject=True),
            "verb_object": self.verb_categories(entity, tuples, as_subject=False),
        }

    # Assembly

    def assemble_row(
        self,
        entity: EntityMention,
        candidates: Sequence[BoundingBox],
        image_id: str,
        img: ImageSize,
        tuples: Sequence[RelationTuple] = (),
        phrase_vec: Optional[np.ndarray] = None,
        region_vecs: Optional[np.ndarray] = None,
        box_indices: Optional[Sequence[int]] = None,
    ) -> CueRow:
        """
        Cue costs of one phrase against its candidates

        Args:
            entity: the phrase
            candidates: candidate boxes
            image_id: image of the candidates
            img: image size
            tuples: relation tuples of the sentence (for verb detectors)
            phrase_vec: phrase feature for the cca cue
            region_vecs: candidates x d region features for the cca cue
            box_indices: detector-table index of every candidate (default 0..C-1)
        """
        n = len(candidates)
        if n == 0:
            raise ValueError(f"Phrase {entity.phrase_id} has no candidates")
        box_indices = list(box_indices) if box_indices is not None else list(range(n))
        costs = np.zeros((n, N_SPC))
        available = np.zeros(N_SPC, dtype=bool)

        available[SLOT_INDEX["cca"]] = True
        costs[:, SLOT_INDEX["cca"]] = self._cca_costs(entity, phrase_vec, region_vecs, n)

        svm = self.position_svms.get(entity.phrase_type.value)
        if svm is not None:
            feats = np.array([position_feature(b, img) for b in candidates])
            probs = svm.probabilities(feats)
            costs[:, SLOT_INDEX["position"]] = np.maximum(0.0, -np.log(probs))
            available[SLOT_INDEX["position"]] = True

        size_slot = SLOT_INDEX[SIZE_SLOTS[entity.phrase_type]]
        arr = boxes_to_array(candidates)
        costs[:, size_slot] = np.maximum(0.0, 1.0 - arr[:, 2] * arr[:, 3] / img.area)
        available[size_slot] = True

        for slot, categories in self.phrase_categories(entity, tuples).items():
            table = self.detector_tables.get(slot)
            if table is None or not categories:
                continue
            slot_index = SLOT_INDEX[slot]
            for c, box_index in enumerate(box_indices):
                costs[c, slot_index] = detector_cost(
                    table, categories, image_id, box_index, self.prob_floor
                )
            available[slot_index] = True

        return CueRow(
            phrase_id=entity.phrase_id,
            phrase_type=entity.phrase_type,
            costs=costs,
            available=available,
        )

    def _cca_costs(
        self,
        entity: EntityMention,
        phrase_vec: Optional[np.ndarray],
        region_vecs: Optional[np.ndarray],
        n: int,
    ) -> np.ndarray:
        if self.cca_model is None:
            return np.zeros(n)
        if phrase_vec is None:
            raise MissingFeatureError(f"No phrase feature for {entity.phrase_id}")
        if region_vecs is None:
            raise MissingFeatureError(f"No region features for the candidates of {entity.phrase_id}")
        phrase = embed(self.cca_model, phrase_vec, "x")
        if not phrase.normalizable:
            self.logger.warning(f"⚠️ Degenerate phrase embedding for {entity.phrase_id}")
            return np.full(n, 2.0)
        regions = self.cca_model.embed_many(region_vecs, "y")
        cost = 1.0 - regions @ phrase.vector
        # regions that vanish under projection get the maximal cost
        cost[np.linalg.norm(regions, axis=1) == 0] = 2.0
        return np.clip(cost, 0.0, 2.0)

    def assemble_table(
        self,
        image_id: str,
        sentence_id: str,
        entities: Sequence[EntityMention],
        candidates: Sequence[BoundingBox],
        img: ImageSize,
        tuples: Sequence[RelationTuple] = (),
        vectors: Optional[Mapping[str, np.ndarray]] = None,
    ) -> CueCostTable:
        """
        Cue table of a sentence's phrases over the image's candidate boxes

        Phrase and region features are looked up in ``vectors`` under
        ``phrase_key`` and ``region_key`` when a CCA model is set.
        """
        rows = []
        for entity in entities:
            phrase_vec = region_vecs = None
            if self.cca_model is not None:
                phrase_vec = _lookup(vectors, phrase_key(sentence_id, entity.phrase_id))
                region_vecs = np.array(
                    [_lookup(vectors, region_key(image_id, i)) for i in range(len(candidates))]
                )
            rows.append(
                self.assemble_row(
                    entity, candidates, image_id, img, tuples, phrase_vec, region_vecs
                )
            )

        gt_boxes = [union_hull(e.gt_boxes) if e.gt_boxes else None for e in entities]
        self.logger.debug(f"🔍 Cue table {sentence_id}: {len(rows)} phrases x {len(candidates)} boxes")
        return CueCostTable(
            image_id=image_id,
            sentence_id=sentence_id,
            phrase_ids=[e.phrase_id for e in entities],
            phrase_types=[e.phrase_type for e in entities],
            candidates=list(candidates),
            costs=np.stack([r.costs for r in rows]) if rows else np.zeros((0, len(candidates), N_SPC)),
            available=np.stack([r.available for r in rows]) if rows else np.zeros((0, N_SPC), dtype=bool),
            gt_boxes=gt_boxes,
        )


def _lookup(vectors: Optional[Mapping[str, np.ndarray]], key: str) -> np.ndarray:
    if vectors is None or key not in vectors:
        raise MissingFeatureError(f"Missing feature vector '{key}'")
    return np.asarray(vectors[key], dtype=float)


def assemble_spc(
    phrase: EntityMention,
    candidates: Sequence[BoundingBox],
    assembler: CueAssembler,
    image_id: str,
    img: ImageSize,
    tuples: Sequence[RelationTuple] = (),
    phrase_vec: Optional[np.ndarray] = None,
    region_vecs: Optional[np.ndarray] = None,
) -> CueRow:
    """One CueCostTable row for a phrase"""
    return assembler.assemble_row(
        phrase, candidates, image_id, img, tuples, phrase_vec, region_vecs
    )


def fit_position_svms(
    sentences: Sequence[SentenceRecord],
    candidates: Mapping[str, ImageCandidates],
    trainer: Optional[RbfSvmTrainer] = None,
    neg_ratio: int = 3,
    correct_iou: float = 0.5,
    seed: int = 0,
) -> Dict[str, RbfSvmModel]:
    """
    One position SVM per phrase type

    Positives are the GT unions of the type's phrases; negatives are sampled
    among the image's candidates that miss the phrase (IOU < correct_iou).
    Types without enough data are skipped with a warning.
    """
    logger = get_logger(__name__)
    trainer = trainer or RbfSvmTrainer()
    rng = np.random.default_rng(seed)
    positives: Dict[str, List[np.ndarray]] = {}
    negatives: Dict[str, List[np.ndarray]] = {}
    for record in sentences:
        image = candidates.get(record.image_id)
        if image is None or not image.boxes:
            continue
        img = image.image_size
        arr = boxes_to_array(image.boxes)
        for entity in record.entities:
            if not entity.gt_boxes:
                continue
            gt = union_hull(entity.gt_boxes)
            name = entity.phrase_type.value
            positives.setdefault(name, []).append(position_feature(gt, img))
            misses = np.flatnonzero(iou_many(gt, arr) < correct_iou)
            if misses.size:
                picked = rng.choice(misses, size=min(neg_ratio, misses.size), replace=False)
                negatives.setdefault(name, []).extend(
                    position_feature(image.boxes[int(k)], img) for k in sorted(picked)
                )

    models: Dict[str, RbfSvmModel] = {}
    for offset, name in enumerate(sorted(positives)):
        if not negatives.get(name):
            logger.warning(f"⚠️ No negatives for the '{name}' position SVM, skipped")
            continue
        try:
            models[name] = trainer.fit(np.array(positives[name]), np.array(negatives[name]), seed=seed + offset)
        except TrainingError as e:
            logger.warning(f"⚠️ Could not train the '{name}' position SVM: {e}")
    logger.info(f"✅ {len(models)} position SVMs trained")
    return models
