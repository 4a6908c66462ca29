"""
Cue models for GROUNDKIT: slot layout, dictionaries, detector scores and cost tables
"""

from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .geometry import BoundingBox
from .language import PHRASE_TYPES, PhraseType, RelationKind

SIZE_SLOTS: Dict[PhraseType, str] = {t: f"size_{t.value}" for t in PHRASE_TYPES}

SPC_SLOTS: List[str] = [
    "cca",
    "position",
    *SIZE_SLOTS.values(),
    "object_det",
    "adjective",
    "subject_verb",
    "verb_object",
]

PPC_SLOTS: List[str] = [kind.value for kind in RelationKind]

N_SPC = len(SPC_SLOTS)
N_PPC = len(PPC_SLOTS)

SLOT_INDEX: Dict[str, int] = {name: i for i, name in enumerate(SPC_SLOTS)}


class PhraseCueConfig(BaseModel):
    """Dictionaries routing phrases to detector categories"""

    adjective_dict: Dict[str, List[str]] = Field(default_factory=dict)
    object_dict: Dict[str, List[str]] = Field(default_factory=dict)
    subject_verb_dict: Dict[str, List[str]] = Field(default_factory=dict)
    verb_object_dict: Dict[str, List[str]] = Field(default_factory=dict)
    verb_forms: Dict[str, str] = Field(
        default_factory=dict, description="Surface form to canonical verb"
    )
    phrase_type_size_slots: List[PhraseType] = Field(default_factory=lambda: list(PHRASE_TYPES))

    @field_validator("adjective_dict", "object_dict", "subject_verb_dict", "verb_object_dict")
    @classmethod
    def validate_unique_categories(cls, v):
        for term, categories in v.items():
            if len(set(categories)) != len(categories):
                raise ValueError(f"Duplicate categories listed for '{term}'")
        return v

    @field_validator("phrase_type_size_slots")
    @classmethod
    def validate_size_slots(cls, v):
        if sorted(t.value for t in v) != sorted(t.value for t in PHRASE_TYPES):
            raise ValueError("Size slots must cover the eight phrase types exactly")
        return v

    def canonical_verb(self, word: str) -> Optional[str]:
        return self.verb_forms.get(word.lower())


class DetectorScoreTable:
    """Softmax probabilities keyed by (image_id, box_index, category)"""

    def __init__(self, name: str = "detector"):
        self.name = name
        self._scores: Dict[Tuple[str, int, str], float] = {}

    def add(self, image_id: str, box_index: int, category: str, prob: float) -> None:
        if not 0.0 <= prob <= 1.0:
            raise ValueError(f"Probability out of range for {category}: {prob}")
        self._scores[(str(image_id), int(box_index), category)] = float(prob)

    def get(
        self, image_id: str, box_index: int, category: str, default: Optional[float] = None
    ) -> Optional[float]:
        return self._scores.get((str(image_id), int(box_index), category), default)

    def categories(self) -> List[str]:
        return sorted({key[2] for key in self._scores})

    def records(self) -> Iterable[Dict[str, Any]]:
        for (image_id, box, category), prob in sorted(self._scores.items()):
            yield {"image_id": image_id, "box": box, "category": category, "prob": prob}

    def __len__(self) -> int:
        return len(self._scores)

    def __contains__(self, key: Tuple[str, int, str]) -> bool:
        return (str(key[0]), int(key[1]), key[2]) in self._scores


class CueRow(BaseModel):
    """Cue costs of one phrase against its candidates"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    phrase_id: str
    phrase_type: PhraseType
    costs: np.ndarray = Field(..., description="candidates x 14 costs")
    available: np.ndarray = Field(..., description="14 availability flags")

    @model_validator(mode="after")
    def validate_shapes(self):
        if self.costs.ndim != 2 or self.costs.shape[1] != N_SPC:
            raise ValueError(f"Cue costs must be (candidates, {N_SPC}), got {self.costs.shape}")
        if self.available.shape != (N_SPC,):
            raise ValueError(f"Availability must have {N_SPC} entries")
        return self


class CueCostTable(BaseModel):
    """Per-sentence SPC costs over a shared candidate list"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    image_id: str = Field(..., description="Image identifier")
    sentence_id: str = Field(default="", description="Sentence identifier")
    phrase_ids: List[str] = Field(..., description="Phrase identifiers, row order")
    phrase_types: List[PhraseType] = Field(..., description="Phrase types, row order")
    candidates: List[BoundingBox] = Field(..., description="Shared candidate boxes")
    costs: np.ndarray = Field(..., description="phrases x candidates x 14")
    available: np.ndarray = Field(..., description="phrases x 14 mask")
    gt_boxes: List[Optional[BoundingBox]] = Field(
        default_factory=list, description="Union ground-truth box per phrase"
    )
    cue_names: List[str] = Field(default_factory=lambda: list(SPC_SLOTS))

    @model_validator(mode="after")
    def validate_layout(self):
        n_phrases, n_candidates = len(self.phrase_ids), len(self.candidates)
        if self.cue_names != SPC_SLOTS:
            raise ValueError("Cue table must use the 14 standard SPC slots in order")
        if self.costs.shape != (n_phrases, n_candidates, N_SPC):
            raise ValueError(
                f"Cost tensor shape {self.costs.shape} != {(n_phrases, n_candidates, N_SPC)}"
            )
        if self.available.shape != (n_phrases, N_SPC):
            raise ValueError(f"Availability shape {self.available.shape} != {(n_phrases, N_SPC)}")
        if len(self.phrase_types) != n_phrases:
            raise ValueError("One phrase type per phrase required")
        if not self.gt_boxes:
            self.gt_boxes = [None] * n_phrases
        elif len(self.gt_boxes) != n_phrases:
            raise ValueError("One ground-truth entry per phrase required")
        return self

    def row(self, index: int) -> CueRow:
        return CueRow(
            phrase_id=self.phrase_ids[index],
            phrase_type=self.phrase_types[index],
            costs=self.costs[index],
            available=self.available[index],
        )

    def index_of(self, phrase_id: str) -> int:
        return self.phrase_ids.index(phrase_id)

    def scores(self, weights: np.ndarray) -> np.ndarray:
        """phrases x candidates SPC scores under the given weights"""
        weights = np.asarray(weights, dtype=float)
        return np.einsum("pcs,ps,s->pc", self.costs, self.available.astype(float), weights)

    def to_record(self, index: int) -> Dict[str, Any]:
        """JSONL cue record for one phrase"""
        gt = self.gt_boxes[index]
        return {
            "image_id": self.image_id,
            "sentence_id": self.sentence_id,
            "phrase_id": self.phrase_ids[index],
            "phrase_type": self.phrase_types[index].value,
            "candidates": [b.to_list() for b in self.candidates],
            "costs": self.costs[index].tolist(),
            "available": [bool(a) for a in self.available[index]],
            "gt_box": gt.to_list() if gt is not None else None,
        }


class PairClassifierKey(BaseModel):
    """Identity of a pairwise spatial classifier"""

    model_config = ConfigDict(frozen=True)

    kind: RelationKind = Field(..., description="Relation kind")
    left_key: str = Field(..., description="Left phrase category ('people' for people)")
    rel_key: str = Field(default="", description="Relation word, empty for attachments")
    right_key: str = Field(..., description="Right phrase category")

    @model_validator(mode="after")
    def validate_key(self):
        if not self.left_key or not self.right_key:
            raise ValueError("Pair keys need both phrase categories")
        if self.kind == RelationKind.ATTACHMENT and self.rel_key:
            raise ValueError("Attachment keys carry no relation word")
        if self.kind != RelationKind.ATTACHMENT and not self.rel_key:
            raise ValueError(f"{self.kind.value} keys need a relation word")
        return self

    @property
    def name(self) -> str:
        """Dictionary form, e.g. 'people-sitting-bench' or 'people-hat'"""
        if self.kind == RelationKind.ATTACHMENT:
            return f"{self.left_key}-{self.right_key}"
        return f"{self.left_key}-{self.rel_key}-{self.right_key}"

    @property
    def file_stem(self) -> str:
        return f"{self.kind.value}__{self.name}"

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.name}"
