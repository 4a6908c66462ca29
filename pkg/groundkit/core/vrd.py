"""
Visual relationship detection: CCA, size, position and spatial-predicate
scores combined by a rank-SVM
"""

import math
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..config.settings import GroundkitConfig
from ..errors import DimensionError, MissingFeatureError, TrainingError
from ..learners.cca import CcaModel, cca_cost, embed, fit_cca
from ..learners.rank import RankSvmModel, RankSvmTrainer
from ..learners.svm import RbfSvmModel, RbfSvmTrainer
from ..models.bundle import WeightedModelBundle
from ..models.geometry import BoundingBox, ImageSize
from ..models.vrd import (
    N_CCA_SCORES,
    N_VRD_FEATURES,
    RecallResult,
    RelationshipCandidate,
    VrdDetections,
    VrdGroundTruth,
    VrdRelationship,
    VrdVocabulary,
)
from ..utils.geometry import boxes_to_array, iou, iou_many, position_feature, spatial_pair_feature
from ..utils.logger import get_logger
from .cues import region_key, size_cost, union_key

# names feeding the text view of each CCA score, and the box feeding its region view
TEXT_LAYOUT: List[Tuple[str, ...]] = [("s",), ("o",), ("s", "p"), ("p", "o"), ("p",), ("s", "p", "o")]
REGION_LAYOUT: List[str] = ["subject", "object", "subject", "object", "union", "union"]

# model index (of five) behind each of the six scores
SCORE_MODELS: List[int] = [0, 0, 1, 2, 3, 4]

NEUTRAL_PROB = 0.5

Triple = Tuple[str, str, str]


def text_vector(vocab: VrdVocabulary, names: Mapping[str, str], layout: Tuple[str, ...]) -> np.ndarray:
    return np.concatenate([np.asarray(vocab.vectors[names[part]], dtype=float) for part in layout])


def vrd_cca_scores(
    models: Sequence[CcaModel],
    subj_box_feat: np.ndarray,
    obj_box_feat: np.ndarray,
    union_box_feat: np.ndarray,
    names: Triple,
    vocab: VrdVocabulary,
) -> np.ndarray:
    """
    Six cosine-distance costs between boxes and class/predicate names

    ``models`` holds one CCA model per score; the box-class model appears
    twice (subject and object).
    """
    if len(models) != N_CCA_SCORES:
        raise DimensionError(f"VRD scoring needs {N_CCA_SCORES} CCA models, got {len(models)}")
    regions = {"subject": subj_box_feat, "object": obj_box_feat, "union": union_box_feat}
    for name, feat in regions.items():
        if feat is None:
            raise MissingFeatureError(f"Missing {name} box feature")
    parts = dict(zip("spo", names))
    return np.array(
        [
            cca_cost(model, text_vector(vocab, parts, layout), regions[region]).cost
            for model, layout, region in zip(models, TEXT_LAYOUT, REGION_LAYOUT)
        ]
    )


def vrd_feature(
    cca6: Sequence[float],
    size_subj: float,
    size_obj: float,
    pos_subj: float,
    pos_obj: float,
    spatial_pred_prob: float,
) -> np.ndarray:
    """The 11 relationship features in their fixed order"""
    cca6 = np.asarray(cca6, dtype=float).reshape(-1)
    if cca6.size != N_CCA_SCORES:
        raise DimensionError(f"Expected {N_CCA_SCORES} CCA scores, got {cca6.size}")
    return np.concatenate([cca6, [size_subj, size_obj, pos_subj, pos_obj, spatial_pred_prob]])


def _lookup(vectors: Mapping[str, np.ndarray], key: str, what: str) -> np.ndarray:
    if key not in vectors:
        raise MissingFeatureError(f"Missing region feature for {what} ('{key}')")
    return np.asarray(vectors[key], dtype=float)


class VrdScorer:
    """
    Scores every predicate for every ordered pair of detected boxes

    Missing position SVMs give the neutral cost -log 0.5 and missing
    predicate SVMs the neutral probability 0.5.
    """

    def __init__(
        self,
        cca_models: Sequence[CcaModel],
        vocab: VrdVocabulary,
        position_svms: Optional[Mapping[str, RbfSvmModel]] = None,
        predicate_svms: Optional[Mapping[str, RbfSvmModel]] = None,
        rank_svm: Optional[RankSvmModel] = None,
        top_k: int = 10,
        debug: bool = False,
    ):
        if len(cca_models) != N_CCA_SCORES:
            raise DimensionError(f"VRD scoring needs {N_CCA_SCORES} CCA models, got {len(cca_models)}")
        if rank_svm is not None and rank_svm.dim != N_VRD_FEATURES:
            raise DimensionError(f"Rank-SVM has dim {rank_svm.dim}, expected {N_VRD_FEATURES}")
        self.cca_models = list(cca_models)
        self.vocab = vocab
        self.position_svms = dict(position_svms or {})
        self.predicate_svms = dict(predicate_svms or {})
        self.rank_svm = rank_svm
        self.top_k = top_k
        self.logger = get_logger(__name__, debug=debug)
        self._text_cache: Dict[Tuple[int, str, str], np.ndarray] = {}

    @classmethod
    def from_bundle(cls, bundle: WeightedModelBundle, vocab: VrdVocabulary, top_k: int = 10) -> "VrdScorer":
        return cls(
            bundle.vrd_cca,
            vocab,
            bundle.vrd_position_svms,
            bundle.vrd_predicate_svms,
            bundle.rank_svm,
            top_k,
        )

    def update_bundle(self, bundle: WeightedModelBundle) -> None:
        bundle.vrd_cca = list(self.cca_models)
        bundle.vrd_position_svms = dict(self.position_svms)
        bundle.vrd_predicate_svms = dict(self.predicate_svms)
        bundle.rank_svm = self.rank_svm

    def position_cost(self, class_name: str, box: BoundingBox, img: ImageSize) -> float:
        svm = self.position_svms.get(class_name)
        if svm is None:
            return -math.log(NEUTRAL_PROB)
        prob = float(svm.probabilities(position_feature(box, img)[None, :])[0])
        return max(0.0, -math.log(prob))

    def predicate_probs(self, subj_box: BoundingBox, obj_box: BoundingBox) -> np.ndarray:
        feat = spatial_pair_feature(subj_box, obj_box)[None, :]
        probs = np.full(len(self.vocab.predicates), NEUTRAL_PROB)
        for p, name in enumerate(self.vocab.predicates):
            svm = self.predicate_svms.get(name)
            if svm is not None:
                probs[p] = float(svm.probabilities(feat)[0])
        return probs

    def _texts(self, slot: int, s: str, o: str) -> np.ndarray:
        """Embedded text views for every predicate (P x k), cached per class pair"""
        key = (slot, s, o)
        if key not in self._text_cache:
            rows = [
                text_vector(self.vocab, {"s": s, "p": p, "o": o}, TEXT_LAYOUT[slot])
                for p in self.vocab.predicates
            ]
            self._text_cache[key] = self.cca_models[slot].embed_many(np.array(rows), "x")
        return self._text_cache[key]

    def _slot_costs(self, slot: int, s: str, o: str, region: np.ndarray) -> np.ndarray:
        texts = self._texts(slot, s, o)
        embedded = embed(self.cca_models[slot], region, "y")
        if not embedded.normalizable:
            return np.full(texts.shape[0], 2.0)
        costs = 1.0 - texts @ embedded.vector
        costs[np.linalg.norm(texts, axis=1) == 0] = 2.0
        return np.clip(costs, 0.0, 2.0)

    def pair_features(
        self,
        detections: VrdDetections,
        i: int,
        j: int,
        vectors: Mapping[str, np.ndarray],
    ) -> np.ndarray:
        """predicates x 11 features of the ordered pair (i, j)"""
        img = detections.image_size
        image_id = detections.image_id
        s, o = detections.classes[i], detections.classes[j]
        subj, obj = detections.boxes[i], detections.boxes[j]
        key = union_key(image_id, i, j)
        if key not in vectors:
            key = union_key(image_id, j, i)
        regions = {
            "subject": _lookup(vectors, region_key(image_id, i), f"box {i} of {image_id}"),
            "object": _lookup(vectors, region_key(image_id, j), f"box {j} of {image_id}"),
            "union": _lookup(vectors, key, f"union of boxes {i}, {j} of {image_id}"),
        }

        n_pred = len(self.vocab.predicates)
        cca = np.stack(
            [self._slot_costs(slot, s, o, regions[REGION_LAYOUT[slot]]) for slot in range(N_CCA_SCORES)],
            axis=1,
        )
        fixed = np.array(
            [
                size_cost(subj, img),
                size_cost(obj, img),
                self.position_cost(s, subj, img),
                self.position_cost(o, obj, img),
            ]
        )
        return np.hstack(
            [cca, np.broadcast_to(fixed, (n_pred, 4)), self.predicate_probs(subj, obj)[:, None]]
        )

    def score_pairs(
        self, detections: VrdDetections, vectors: Mapping[str, np.ndarray]
    ) -> List[Tuple[int, int, np.ndarray]]:
        """(subject index, object index, predicates x 11 features) for every ordered pair"""
        n = len(detections.boxes)
        return [
            (i, j, self.pair_features(detections, i, j, vectors))
            for i in range(n)
            for j in range(n)
            if i != j
        ]

    def score_relationships(
        self, detections: VrdDetections, vectors: Mapping[str, np.ndarray], top_k: Optional[int] = None
    ) -> List[RelationshipCandidate]:
        """
        Top-k predicates of every ordered box pair, ranked by descending score

        Equal scores keep (subject index, object index, predicate index) order.
        """
        top_k = top_k or self.top_k
        if len(detections.boxes) < 2:
            return []
        if self.rank_svm is None:
            self.logger.warning("⚠️ No rank-SVM; every relationship scores 0")
        weights = self.rank_svm.weights if self.rank_svm is not None else np.zeros(N_VRD_FEATURES)

        scored = []
        for i, j, feats in self.score_pairs(detections, vectors):
            scores = feats @ weights
            order = np.lexsort((np.arange(scores.size), -scores))[:top_k]
            for p in order:
                scored.append((-float(scores[p]), i, j, int(p), feats[p]))
        scored.sort(key=lambda item: item[:4])

        return [
            RelationshipCandidate(
                subject_index=i,
                object_index=j,
                subject_class=detections.classes[i],
                object_class=detections.classes[j],
                subject_box=detections.boxes[i],
                object_box=detections.boxes[j],
                predicate=self.vocab.predicates[p],
                predicate_index=p,
                feature=feature.tolist(),
                score=-neg_score,
            )
            for neg_score, i, j, p, feature in scored
        ]


def score_relationships(
    detections: VrdDetections,
    vocab: VrdVocabulary,
    bundle: WeightedModelBundle,
    vectors: Mapping[str, np.ndarray],
    top_k: int = 10,
) -> List[RelationshipCandidate]:
    """Score one image's detections with the VRD models of a bundle"""
    return VrdScorer.from_bundle(bundle, vocab, top_k).score_relationships(detections, vectors)


def is_correct(
    candidate: RelationshipCandidate, relationship: VrdRelationship, correct_iou: float = 0.5
) -> bool:
    """Same triple and both boxes at IOU >= correct_iou with the ground truth"""
    return (
        candidate.triple == relationship.triple
        and iou(candidate.subject_box, relationship.subject_box) >= correct_iou
        and iou(candidate.object_box, relationship.object_box) >= correct_iou
    )


def eval_recall_at(
    candidates: Sequence[RelationshipCandidate],
    gt: VrdGroundTruth,
    k: int = 100,
    zero_shot_only: bool = False,
    one_to_one: bool = True,
    correct_iou: float = 0.5,
) -> RecallResult:
    """
    Portion of ground-truth relationships recalled by the top-k candidates

    With ``one_to_one`` each candidate, walked down the ranking, claims the
    first unmatched ground truth it localizes; otherwise a ground truth is
    recalled whenever any top-k candidate localizes it.
    """
    targets = gt.zero_shot() if zero_shot_only else list(gt.relationships)
    if not targets:
        return RecallResult(k=k, applicable=False)

    matched = [False] * len(targets)
    for candidate in candidates[:k]:
        for index, relationship in enumerate(targets):
            if matched[index] and one_to_one:
                continue
            if is_correct(candidate, relationship, correct_iou):
                matched[index] = True
                if one_to_one:
                    break
    hits = sum(matched)
    return RecallResult(k=k, recall=hits / len(targets), matched=hits, total=len(targets))


def aggregate_recall(results: Sequence[RecallResult]) -> RecallResult:
    """Pooled recall over images (not-applicable images are skipped)"""
    k = results[0].k if results else 0
    matched = sum(r.matched for r in results if r.applicable)
    total = sum(r.total for r in results if r.applicable)
    if total == 0:
        return RecallResult(k=k, applicable=False)
    return RecallResult(k=k, recall=matched / total, matched=matched, total=total)


def training_triples(gts: Sequence[VrdGroundTruth]) -> Set[Triple]:
    return {r.triple for gt in gts for r in gt.relationships}


def mark_zero_shot(gt: VrdGroundTruth, seen: Set[Triple]) -> VrdGroundTruth:
    """Copy of gt with seen_in_training set from the training triple set"""
    return VrdGroundTruth(
        image_id=gt.image_id,
        relationships=[
            r.model_copy(update={"seen_in_training": r.triple in seen}) for r in gt.relationships
        ],
    )


def zero_shot_violations(gts: Sequence[VrdGroundTruth], seen: Set[Triple]) -> List[str]:
    """Unseen-flagged relationships whose triple does occur in training"""
    return [
        f"{gt.image_id}: {'-'.join(r.triple)}"
        for gt in gts
        for r in gt.zero_shot()
        if r.triple in seen
    ]


class VrdTrainingImage(BaseModel):
    """Detections and annotated relationships of one training image"""

    detections: VrdDetections
    gt: VrdGroundTruth


def match_detection(box: BoundingBox, detections: VrdDetections, correct_iou: float = 0.5) -> Optional[int]:
    """Index of the detection overlapping ``box`` most, if it reaches correct_iou"""
    if not detections.boxes:
        return None
    overlaps = iou_many(box, boxes_to_array(detections.boxes))
    best = int(np.argmax(overlaps))
    return best if overlaps[best] >= correct_iou else None


def build_rank_training(
    images: Sequence[VrdTrainingImage],
    scorer: VrdScorer,
    vectors: Mapping[str, np.ndarray],
    neg_ratio: int = 3,
    seed: int = 0,
    correct_iou: float = 0.5,
) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    (positive feature, negative feature) pairs from every image

    Positives are candidates with a ground-truth triple and both boxes
    localized; negatives are the image's other candidates. Up to
    ``neg_ratio`` negatives are drawn per positive.

    Raises:
        TrainingError: when no candidate is positive
    """
    rng = np.random.default_rng(seed)
    pairs: List[Tuple[np.ndarray, np.ndarray]] = []
    for image in images:
        det = image.detections
        positives, negatives = [], []
        for i, j, feats in scorer.score_pairs(det, vectors):
            for p, predicate in enumerate(scorer.vocab.predicates):
                triple = (det.classes[i], predicate, det.classes[j])
                good = any(
                    r.triple == triple
                    and iou(det.boxes[i], r.subject_box) >= correct_iou
                    and iou(det.boxes[j], r.object_box) >= correct_iou
                    for r in image.gt.relationships
                )
                (positives if good else negatives).append(feats[p])
        if not negatives:
            continue
        for positive in positives:
            picks = rng.choice(len(negatives), size=min(neg_ratio, len(negatives)), replace=False)
            pairs.extend((positive, negatives[int(n)]) for n in picks)
    if not pairs:
        raise TrainingError("No correctly localized relationship among the training candidates")
    return pairs


class VrdTrainer:
    """
    Fits the five CCA models, per-class position SVMs, the one-vs-rest
    predicate spatial SVMs and the rank-SVM from training images
    """

    def __init__(self, config: Optional[GroundkitConfig] = None, debug: bool = False):
        self.config = config or GroundkitConfig()
        self.logger = get_logger(__name__, debug=debug or self.config.debug)
        svm = self.config.svm
        self.svm_trainer = RbfSvmTrainer(
            c=svm.c, gamma=svm.gamma, kkt_tol=svm.kkt_tol, max_iter=svm.max_iter, platt_folds=svm.platt_folds
        )

    def _matched(self, image: VrdTrainingImage):
        det = image.detections
        for r in image.gt.relationships:
            i = match_detection(r.subject_box, det)
            j = match_detection(r.object_box, det)
            if i is not None and j is not None and i != j:
                yield r, i, j

    def fit_cca(
        self, images: Sequence[VrdTrainingImage], vocab: VrdVocabulary, vectors: Mapping[str, np.ndarray]
    ) -> List[CcaModel]:
        rows: List[Tuple[List[np.ndarray], List[np.ndarray]]] = [([], []) for _ in range(5)]
        for image in images:
            det = image.detections
            for r, i, j in self._matched(image):
                parts = {"s": r.subject_class, "p": r.predicate, "o": r.object_class}
                subj = _lookup(vectors, region_key(det.image_id, i), f"box {i} of {det.image_id}")
                obj = _lookup(vectors, region_key(det.image_id, j), f"box {j} of {det.image_id}")
                key = union_key(det.image_id, i, j)
                if key not in vectors:
                    key = union_key(det.image_id, j, i)
                union = _lookup(vectors, key, f"union of boxes {i}, {j} of {det.image_id}")
                regions = {"subject": subj, "object": obj, "union": union}
                for slot in range(1, N_CCA_SCORES):
                    texts, boxes = rows[SCORE_MODELS[slot]]
                    texts.append(text_vector(vocab, parts, TEXT_LAYOUT[slot]))
                    boxes.append(regions[REGION_LAYOUT[slot]])
                # the box-class model also learns from the subject side
                rows[0][0].append(text_vector(vocab, parts, TEXT_LAYOUT[0]))
                rows[0][1].append(subj)

        models = []
        for index, (texts, boxes) in enumerate(rows):
            x, y = np.array(texts), np.array(boxes)
            if x.ndim != 2 or x.shape[0] < 2:
                raise TrainingError(f"CCA model {index + 1} has fewer than two training pairs")
            k = min(self.config.cca.components, x.shape[1], y.shape[1])
            models.append(fit_cca(x, y, k, reg=self.config.cca.reg, eig_power=self.config.cca.eig_power))
        return [models[m] for m in SCORE_MODELS]

    def fit_position_svms(self, images: Sequence[VrdTrainingImage], seed: int = 0) -> Dict[str, RbfSvmModel]:
        rng = np.random.default_rng(seed)
        positives: Dict[str, List[np.ndarray]] = {}
        negatives: Dict[str, List[np.ndarray]] = {}
        for image in images:
            det = image.detections
            img = det.image_size
            matched: Dict[str, Set[int]] = {}
            for r, i, j in self._matched(image):
                matched.setdefault(r.subject_class, set()).add(i)
                matched.setdefault(r.object_class, set()).add(j)
            for class_name, indices in sorted(matched.items()):
                others = [k for k in range(len(det.boxes)) if k not in indices]
                for k in sorted(indices):
                    positives.setdefault(class_name, []).append(position_feature(det.boxes[k], img))
                if others:
                    size = min(self.config.svm.neg_ratio * len(indices), len(others))
                    for k in sorted(rng.choice(others, size=size, replace=False)):
                        negatives.setdefault(class_name, []).append(
                            position_feature(det.boxes[int(k)], img)
                        )
        return self._train_each(positives, negatives, seed, "position")

    def fit_predicate_svms(
        self, images: Sequence[VrdTrainingImage], vocab: VrdVocabulary, seed: int = 0
    ) -> Dict[str, RbfSvmModel]:
        features: Dict[str, List[np.ndarray]] = {p: [] for p in vocab.predicates}
        for image in images:
            det = image.detections
            for r, i, j in self._matched(image):
                if r.predicate in features:
                    features[r.predicate].append(spatial_pair_feature(det.boxes[i], det.boxes[j]))

        rng = np.random.default_rng(seed)
        positives, negatives = {}, {}
        for predicate, pos in features.items():
            rest = [f for other, feats in features.items() if other != predicate for f in feats]
            if not pos or not rest:
                continue
            size = min(self.config.svm.neg_ratio * len(pos), len(rest))
            positives[predicate] = pos
            negatives[predicate] = [rest[int(k)] for k in sorted(rng.choice(len(rest), size=size, replace=False))]
        return self._train_each(positives, negatives, seed, "predicate")

    def _train_each(self, positives, negatives, seed: int, what: str) -> Dict[str, RbfSvmModel]:
        models = {}
        for offset, name in enumerate(sorted(positives)):
            if not negatives.get(name):
                self.logger.warning(f"⚠️ No negatives for {what} SVM '{name}', skipped")
                continue
            try:
                models[name] = self.svm_trainer.fit(
                    np.array(positives[name]), np.array(negatives[name]), seed=seed + offset
                )
            except TrainingError as e:
                self.logger.warning(f"⚠️ Could not train {what} SVM '{name}': {e}")
        self.logger.info(f"✅ {len(models)} {what} SVMs trained")
        return models

    def fit(
        self,
        images: Sequence[VrdTrainingImage],
        vocab: VrdVocabulary,
        vectors: Mapping[str, np.ndarray],
        seed: int = 0,
    ) -> VrdScorer:
        self.logger.info(f"🔍 Training VRD models on {len(images)} images")
        cca_models = self.fit_cca(images, vocab, vectors)
        scorer = VrdScorer(
            cca_models,
            vocab,
            self.fit_position_svms(images, seed),
            self.fit_predicate_svms(images, vocab, seed),
            top_k=self.config.vrd.top_k,
        )
        vrd = self.config.vrd
        pairs = build_rank_training(images, scorer, vectors, vrd.neg_ratio, seed)
        scorer.rank_svm = RankSvmTrainer(c=vrd.rank_c, epochs=vrd.rank_epochs).fit(pairs, seed=seed)
        self.logger.info(f"✅ Rank-SVM trained on {len(pairs)} ranked pairs")
        return scorer
