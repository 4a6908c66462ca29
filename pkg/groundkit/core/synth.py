"""
Synthetic datasets with planted structure, for checking learning and inference
"""

from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..models.cues import N_PPC, N_SPC, SIZE_SLOTS, SLOT_INDEX, CueCostTable
from ..models.geometry import BoundingBox, ImageSize
from ..models.language import PHRASE_TYPES, EntityMention, PhraseType, RelationKind, RelationTuple, SentenceRecord
from ..models.vrd import VrdDetections, VrdGroundTruth, VrdRelationship, VrdVocabulary
from ..utils.geometry import boxes_to_array, clip_box, iou, iou_many
from ..utils.logger import get_logger
from . import io
from .cues import region_key, union_key
from .io import ImageCandidates
from .learn import PairExample
from .ppc import PairSample
from .vrd import VrdTrainingImage, mark_zero_shot, training_triples

logger = get_logger(__name__)

CORRECT_MIN_IOU = 0.8
INCORRECT_MAX_IOU = 0.45

# slots that may carry pure-noise costs, in the order they are switched on
NOISE_SLOTS = ["position", "object_det", "adjective", "subject_verb", "verb_object"]
PLANTED_PAIR_SLOT = 1  # preposition

SPATIAL_PREDICATES = ["left of", "right of", "above", "below"]


class SynthConfig(BaseModel):
    """Shape and noise of a synthetic grounding dataset"""

    n_images: int = Field(default=50, description="Images (one sentence each)")
    phrases_per_image: int = Field(default=3, description="Phrases per sentence")
    candidates_per_phrase: int = Field(default=6, description="Candidate boxes contributed per phrase")
    noise: float = Field(default=0.05, description="Gaussian noise on the informative cue")
    noise_cues: int = Field(default=5, description="Pure-noise SPC slots switched on (0-5)")
    relation_density: float = Field(default=1.0, description="Chance that neighbouring phrases are related")
    pair_noise: float = Field(default=0.05, description="Gaussian noise on the planted pair cue")
    image_width: float = 600.0
    image_height: float = 400.0

    @field_validator("n_images", "phrases_per_image")
    @classmethod
    def validate_counts(cls, v):
        if v < 1:
            raise ValueError("image and phrase counts must be at least 1")
        return v

    @field_validator("candidates_per_phrase")
    @classmethod
    def validate_candidates(cls, v):
        if v < 2:
            raise ValueError("candidates_per_phrase must be at least 2")
        return v

    @field_validator("noise", "pair_noise")
    @classmethod
    def validate_noise(cls, v):
        if v < 0:
            raise ValueError("noise levels must be non-negative")
        return v

    @field_validator("noise_cues")
    @classmethod
    def validate_noise_cues(cls, v):
        if not 0 <= v <= len(NOISE_SLOTS):
            raise ValueError(f"noise_cues must be between 0 and {len(NOISE_SLOTS)}")
        return v

    @field_validator("relation_density")
    @classmethod
    def validate_density(cls, v):
        if not 0.0 <= v <= 1.0:
            raise ValueError("relation_density must be in [0, 1]")
        return v


class SynthGroundingDataset(BaseModel):
    """Sentences, candidates, cue tables and pairwise examples with known oracle weights"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    config: SynthConfig
    seed: int
    sentences: List[SentenceRecord] = Field(default_factory=list)
    candidates: List[ImageCandidates] = Field(default_factory=list)
    tables: List[CueCostTable] = Field(default_factory=list)
    relations: List[RelationTuple] = Field(default_factory=list)
    pair_examples: List[PairExample] = Field(default_factory=list)

    def get_summary(self) -> Dict[str, object]:
        return {
            "images": len(self.sentences),
            "phrases": sum(len(s.entities) for s in self.sentences),
            "candidates": sum(len(c.boxes) for c in self.candidates),
            "relations": len(self.relations),
            "seed": self.seed,
        }

    def write(self, out_dir: Union[str, Path]) -> Dict[str, str]:
        """Write every part as JSON Lines under out_dir; returns the file map"""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        files = {
            "sentences": out / "sentences.jsonl",
            "candidates": out / "candidates.jsonl",
            "cues": out / "cues.jsonl",
            "pairs": out / "pairs.jsonl",
        }
        io.write_sentences(files["sentences"], self.sentences)
        io.write_candidates(files["candidates"], self.candidates)
        io.write_cue_tables(files["cues"], self.tables)
        io.write_pair_examples(files["pairs"], self.pair_examples)
        return {k: str(v) for k, v in files.items()}


def _random_box(rng: np.random.Generator, x0: float, y0: float, max_w: float, max_h: float) -> BoundingBox:
    w = rng.uniform(0.3, 0.8) * max_w
    h = rng.uniform(0.3, 0.8) * max_h
    return BoundingBox(x=x0 + rng.uniform(0, max_w - w), y=y0 + rng.uniform(0, max_h - h), w=w, h=h)


def _jittered(rng: np.random.Generator, gt: BoundingBox, img: ImageSize) -> BoundingBox:
    for _ in range(50):
        box = clip_box(
            BoundingBox(
                x=gt.x + rng.uniform(-0.03, 0.03) * gt.w,
                y=gt.y + rng.uniform(-0.03, 0.03) * gt.h,
                w=gt.w * rng.uniform(0.95, 1.05),
                h=gt.h * rng.uniform(0.95, 1.05),
            ),
            img,
        )
        if iou(box, gt) >= CORRECT_MIN_IOU:
            return box
    return gt


def _distractor(rng: np.random.Generator, gts: List[BoundingBox], img: ImageSize) -> BoundingBox:
    arr = boxes_to_array(gts)
    for _ in range(200):
        box = _random_box(rng, 0.0, 0.0, img.width, img.height)
        if np.all(iou_many(box, arr) <= INCORRECT_MAX_IOU):
            return box
    # small enough to stay below the threshold against any ground truth
    return BoundingBox(x=0.0, y=0.0, w=1.0, h=1.0)


class GroundingSynthesizer:
    """
    Builds grounding datasets where one SPC slot (cca) is informative

    The informative cost is 1 - IOU(candidate, GT) plus Gaussian noise; the
    other switched-on slots hold uniform noise. Neighbouring phrases may be
    linked by a relation whose preposition slot encodes how well both boxes
    are localized.
    """

    def __init__(self, config: Optional[SynthConfig] = None, debug: bool = False):
        self.config = config or SynthConfig()
        self.logger = get_logger(__name__, debug=debug)

    def generate(self, seed: int = 0) -> SynthGroundingDataset:
        cfg = self.config
        rng = np.random.default_rng(seed)
        dataset = SynthGroundingDataset(config=cfg, seed=seed)
        for k in range(cfg.n_images):
            self._image(rng, f"img{k:05d}", dataset)
        self.logger.debug(f"🔍 Synthetic grounding dataset: {dataset.get_summary()}")
        return dataset

    def _image(self, rng: np.random.Generator, image_id: str, dataset: SynthGroundingDataset) -> None:
        cfg = self.config
        img = ImageSize(width=cfg.image_width, height=cfg.image_height)
        n = cfg.phrases_per_image
        cell = img.width / n
        gts = [_random_box(rng, p * cell, 0.0, cell, img.height) for p in range(n)]

        boxes: List[BoundingBox] = []
        for p in range(n):
            boxes.append(_jittered(rng, gts[p], img))
            boxes.extend(_distractor(rng, gts, img) for _ in range(cfg.candidates_per_phrase - 1))
        boxes = [boxes[i] for i in rng.permutation(len(boxes))]
        arr = boxes_to_array(boxes)

        linked = [bool(rng.random() < cfg.relation_density) for _ in range(n - 1)]

        tokens: List[str] = []
        entities: List[EntityMention] = []
        for p in range(n):
            if p > 0:
                tokens.append("near" if linked[p - 1] else "and")
            noun = f"thing{p}"
            entities.append(
                EntityMention(
                    phrase_id=str(p),
                    token_span=(len(tokens), len(tokens) + 2),
                    phrase_type=PHRASE_TYPES[-p % len(PHRASE_TYPES)],
                    head_tokens=["a", noun],
                    gt_boxes=[gts[p]],
                )
            )
            tokens.extend(["a", noun])
        # each related neighbour hangs off the previous noun phrase as a PP
        parse = f"(NP (DT a) (NN thing{n - 1}))"
        for p in range(n - 2, -1, -1):
            joint = f"(PP (IN near) {parse})" if linked[p] else f"(CC and) {parse}"
            parse = f"(NP (NP (DT a) (NN thing{p})) {joint})"
        parse = f"(ROOT (S {parse}))"
        sentence_id = f"{image_id}.0"
        dataset.sentences.append(
            SentenceRecord(image_id=image_id, sentence_id=sentence_id, tokens=tokens, parse=parse, entities=entities)
        )
        dataset.candidates.append(
            ImageCandidates(image_id=image_id, width=img.width, height=img.height, boxes=boxes)
        )

        overlaps = np.stack([iou_many(gt, arr) for gt in gts])
        costs = np.zeros((n, len(boxes), N_SPC))
        available = np.zeros((n, N_SPC), dtype=bool)
        for p in range(n):
            informative = 1.0 - overlaps[p] + rng.normal(0.0, cfg.noise, len(boxes)) if cfg.noise > 0 else 1.0 - overlaps[p]
            costs[p, :, SLOT_INDEX["cca"]] = np.maximum(informative, 0.0)
            size_slot = SLOT_INDEX[SIZE_SLOTS[entities[p].phrase_type]]
            for slot in [size_slot] + [SLOT_INDEX[s] for s in NOISE_SLOTS[: cfg.noise_cues]]:
                costs[p, :, slot] = rng.random(len(boxes))
            available[p, SLOT_INDEX["cca"]] = True
            available[p, size_slot] = True
            for name in NOISE_SLOTS[: cfg.noise_cues]:
                available[p, SLOT_INDEX[name]] = True

        table = CueCostTable(
            image_id=image_id,
            sentence_id=sentence_id,
            phrase_ids=[e.phrase_id for e in entities],
            phrase_types=[e.phrase_type for e in entities],
            candidates=boxes,
            costs=costs,
            available=available,
            gt_boxes=list(gts),
        )
        dataset.tables.append(table)

        for p in range(n - 1):
            if not linked[p]:
                continue
            relation = RelationTuple(
                left=entities[p], rel_words=["near"], right=entities[p + 1], kind=RelationKind.PREPOSITION
            )
            dataset.relations.append(relation)
            localized = np.minimum(overlaps[p][:, None], overlaps[p + 1][None, :])
            planted = 1.0 - localized
            if cfg.pair_noise > 0:
                planted = planted + rng.normal(0.0, cfg.pair_noise, planted.shape)
            pair_costs = np.zeros((len(boxes), len(boxes), N_PPC))
            pair_costs[:, :, PLANTED_PAIR_SLOT] = np.maximum(planted, 0.0)
            pair_available = np.zeros(N_PPC, dtype=bool)
            pair_available[PLANTED_PAIR_SLOT] = True
            dataset.pair_examples.append(
                PairExample(
                    left_costs=costs[p],
                    left_available=available[p],
                    right_costs=costs[p + 1],
                    right_available=available[p + 1],
                    pair_costs=pair_costs,
                    pair_available=pair_available,
                    left_correct=overlaps[p] >= 0.5,
                    right_correct=overlaps[p + 1] >= 0.5,
                )
            )


def synth_grounding_dataset(config: Optional[SynthConfig] = None, seed: int = 0) -> SynthGroundingDataset:
    """Generate a grounding dataset (see GroundingSynthesizer)"""
    return GroundingSynthesizer(config).generate(seed)


def synth_pair_samples(
    n: int, seed: int = 0, candidates: int = 8, width: float = 800.0, height: float = 400.0
) -> List[PairSample]:
    """
    Pair samples with a planted "left of" layout

    The right phrase's box always sits about 1.3 widths to the right of the
    left phrase's box at roughly the same size.
    """
    rng = np.random.default_rng(seed)
    img = ImageSize(width=width, height=height)
    samples = []
    for k in range(n):
        w = rng.uniform(60, 120)
        h = rng.uniform(60, 120)
        left_gt = BoundingBox(x=rng.uniform(10, width / 2 - 2 * w), y=rng.uniform(10, height - h - 10), w=w, h=h)
        right_gt = BoundingBox(
            x=left_gt.x + 1.3 * w * rng.uniform(0.95, 1.05),
            y=left_gt.y + h * rng.uniform(-0.05, 0.05),
            w=w * rng.uniform(0.95, 1.05),
            h=h * rng.uniform(0.95, 1.05),
        )
        boxes = [left_gt, right_gt] + [
            _distractor(rng, [left_gt, right_gt], img) for _ in range(candidates - 2)
        ]
        left = EntityMention(
            phrase_id=f"{k}.left", token_span=(0, 1), phrase_type=PhraseType.OTHER,
            head_tokens=["ball"], gt_boxes=[left_gt],
        )
        right = EntityMention(
            phrase_id=f"{k}.right", token_span=(2, 3), phrase_type=PhraseType.OTHER,
            head_tokens=["bench"], gt_boxes=[right_gt],
        )
        samples.append(
            PairSample(
                relation=RelationTuple(left=left, rel_words=["near"], right=right, kind=RelationKind.PREPOSITION),
                candidates=boxes,
                left_scores=rng.random(candidates),
                right_scores=rng.random(candidates),
            )
        )
    return samples


class SynthVrdDataset(BaseModel):
    """Vocabulary, train/test images and region features for relationship detection"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    vocab: VrdVocabulary
    train: List[VrdTrainingImage]
    test: List[VrdTrainingImage]
    vectors: Dict[str, np.ndarray]

    def write(self, out_dir: Union[str, Path]) -> Dict[str, str]:
        """Write vocabulary, detections, ground truth and features under out_dir"""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        files = {
            "vocab": out / "vrd_vocab.json",
            "train_detections": out / "vrd_train_detections.jsonl",
            "train_gt": out / "vrd_train_gt.jsonl",
            "test_detections": out / "vrd_test_detections.jsonl",
            "test_gt": out / "vrd_test_gt.jsonl",
            "vectors": out / "vrd_vectors.jsonl",
        }
        io.write_vocabulary(files["vocab"], self.vocab)
        io.write_vrd_detections(files["train_detections"], [t.detections for t in self.train])
        io.write_vrd_ground_truth(files["train_gt"], [t.gt for t in self.train])
        io.write_vrd_detections(files["test_detections"], [t.detections for t in self.test])
        io.write_vrd_ground_truth(files["test_gt"], [t.gt for t in self.test])
        io.write_vectors(files["vectors"], self.vectors)
        return {k: str(v) for k, v in files.items()}


def _geometric_predicate(subject: BoundingBox, obj: BoundingBox) -> str:
    dx = (obj.x + obj.w / 2) - (subject.x + subject.w / 2)
    dy = (obj.y + obj.h / 2) - (subject.y + subject.h / 2)
    if abs(dx) >= abs(dy):
        return "left of" if dx > 0 else "right of"
    return "above" if dy > 0 else "below"


def _place(rng: np.random.Generator, subject: BoundingBox, predicate: str) -> BoundingBox:
    w = subject.w * rng.uniform(0.9, 1.1)
    h = subject.h * rng.uniform(0.9, 1.1)
    shift = 1.4
    dx, dy = {
        "left of": (shift * subject.w, 0.0),
        "right of": (-shift * subject.w, 0.0),
        "above": (0.0, shift * subject.h),
        "below": (0.0, -shift * subject.h),
    }[predicate]
    return BoundingBox(x=subject.x + dx, y=subject.y + dy, w=w, h=h)


def synth_vrd_dataset(
    n_train: int = 40,
    n_test: int = 10,
    n_classes: int = 5,
    seed: int = 0,
    text_dim: int = 4,
    region_dim: int = 8,
    noise: float = 0.05,
) -> SynthVrdDataset:
    """
    Relationship dataset whose predicates follow the box layout

    Each image holds a chain of three objects related by spatial predicates
    and one distractor detection. Region features are linear in the class
    vectors (union features also in the layout predicate) plus noise.
    """
    rng = np.random.default_rng(seed)
    classes = [f"class{c}" for c in range(n_classes)]
    names = classes + SPATIAL_PREDICATES
    vectors_by_name = {name: rng.normal(0, 1, text_dim) for name in names}
    vocab = VrdVocabulary(
        object_classes=classes,
        predicates=list(SPATIAL_PREDICATES),
        vectors={k: v.tolist() for k, v in vectors_by_name.items()},
    )
    box_map = rng.normal(0, 1, (region_dim, text_dim))
    union_map = rng.normal(0, 1, (region_dim, 3 * text_dim))
    img = ImageSize(width=1000.0, height=1000.0)

    features: Dict[str, np.ndarray] = {}
    images: List[VrdTrainingImage] = []
    for k in range(n_train + n_test):
        image_id = f"vrd{k:05d}"
        side = rng.uniform(80, 120)
        boxes = [BoundingBox(x=rng.uniform(400, 460), y=rng.uniform(400, 460), w=side, h=side)]
        labels = [classes[int(rng.integers(n_classes))]]
        relationships = []
        for _ in range(2):
            predicate = SPATIAL_PREDICATES[int(rng.integers(len(SPATIAL_PREDICATES)))]
            boxes.append(_place(rng, boxes[-1], predicate))
            labels.append(classes[int(rng.integers(n_classes))])
            relationships.append(
                VrdRelationship(
                    subject_class=labels[-2],
                    predicate=predicate,
                    object_class=labels[-1],
                    subject_box=boxes[-2],
                    object_box=boxes[-1],
                )
            )
        detected = [_jittered(rng, b, img) for b in boxes]
        detected.append(_distractor(rng, boxes, img))
        labels.append(classes[int(rng.integers(n_classes))])

        for i, (box, label) in enumerate(zip(detected, labels)):
            features[region_key(image_id, i)] = box_map @ vectors_by_name[label] + rng.normal(0, noise, region_dim)
        for i in range(len(detected)):
            for j in range(len(detected)):
                if i == j:
                    continue
                layout = _geometric_predicate(detected[i], detected[j])
                text = np.concatenate([vectors_by_name[labels[i]], vectors_by_name[layout], vectors_by_name[labels[j]]])
                features[union_key(image_id, i, j)] = union_map @ text + rng.normal(0, noise, region_dim)

        images.append(
            VrdTrainingImage(
                detections=VrdDetections(
                    image_id=image_id, boxes=detected, classes=labels, width=img.width, height=img.height
                ),
                gt=VrdGroundTruth(image_id=image_id, relationships=relationships),
            )
        )

    train, test = images[:n_train], images[n_train:]
    seen = training_triples([image.gt for image in train])
    test = [VrdTrainingImage(detections=t.detections, gt=mark_zero_shot(t.gt, seen)) for t in test]
    logger.debug(f"🔍 Synthetic VRD dataset: {len(train)} train, {len(test)} test images")
    return SynthVrdDataset(vocab=vocab, train=train, test=test, vectors=features)
