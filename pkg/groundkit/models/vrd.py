"""
Visual relationship detection models for GROUNDKIT
"""

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_serializer, field_validator, model_validator

from .geometry import BoundingBox, ImageSize

CCA_SCORE_NAMES: List[str] = [
    "cca_box_class_subject",
    "cca_box_class_object",
    "cca_subject_box_subject_predicate",
    "cca_object_box_predicate_object",
    "cca_union_box_subject_object",
    "cca_union_box_triple",
]

VRD_FEATURE_NAMES: List[str] = [
    *CCA_SCORE_NAMES,
    "size_subject",
    "size_object",
    "position_subject",
    "position_object",
    "spatial_predicate",
]

N_CCA_SCORES = len(CCA_SCORE_NAMES)
N_VRD_FEATURES = len(VRD_FEATURE_NAMES)


def _box(value) -> BoundingBox:
    return BoundingBox.from_list(value) if isinstance(value, (list, tuple)) else value


class VrdVocabulary(BaseModel):
    """Object classes, predicates and their text vectors"""

    object_classes: List[str] = Field(..., description="Object class names")
    predicates: List[str] = Field(..., description="Predicate names")
    vectors: Dict[str, List[float]] = Field(..., description="Text vector per name")

    @model_validator(mode="after")
    def validate_vectors(self):
        missing = [n for n in [*self.object_classes, *self.predicates] if n not in self.vectors]
        if missing:
            raise ValueError(f"Names without a vector: {', '.join(missing[:5])}")
        dims = {len(v) for v in self.vectors.values()}
        if len(dims) > 1:
            raise ValueError(f"Text vectors have mixed dimensions: {sorted(dims)}")
        return self

    @property
    def vector_dim(self) -> int:
        return len(next(iter(self.vectors.values()))) if self.vectors else 0

    def predicate_index(self, name: str) -> int:
        return self.predicates.index(name)


class VrdRelationship(BaseModel):
    """Ground-truth (subject, predicate, object) with boxes"""

    subject_class: str
    predicate: str
    object_class: str
    subject_box: BoundingBox
    object_box: BoundingBox
    seen_in_training: bool = Field(default=True, description="Triple occurs in training data")

    @field_validator("subject_box", "object_box", mode="before")
    @classmethod
    def parse_box(cls, v):
        return _box(v)

    @field_serializer("subject_box", "object_box")
    def serialize_box(self, box: BoundingBox):
        return box.to_list()

    @property
    def triple(self) -> Tuple[str, str, str]:
        return (self.subject_class, self.predicate, self.object_class)


class VrdGroundTruth(BaseModel):
    """Relationships annotated for one image"""

    image_id: str
    relationships: List[VrdRelationship] = Field(default_factory=list)

    def zero_shot(self) -> List[VrdRelationship]:
        return [r for r in self.relationships if not r.seen_in_training]


class VrdDetections(BaseModel):
    """Externally supplied object detections for one image"""

    image_id: str
    boxes: List[BoundingBox]
    classes: List[str]
    scores: Optional[List[float]] = None
    width: Optional[float] = Field(default=None, description="Image width in pixels")
    height: Optional[float] = Field(default=None, description="Image height in pixels")

    @field_validator("boxes", mode="before")
    @classmethod
    def parse_boxes(cls, v):
        return [_box(b) for b in v]

    @property
    def image_size(self) -> ImageSize:
        """Declared image size, or the extent of the detections when absent"""
        if self.width is not None and self.height is not None:
            return ImageSize(width=self.width, height=self.height)
        width = max((b.x2 for b in self.boxes), default=1.0)
        height = max((b.y2 for b in self.boxes), default=1.0)
        return ImageSize(width=max(width, 1.0), height=max(height, 1.0))

    @field_serializer("boxes")
    def serialize_boxes(self, boxes: List[BoundingBox]):
        return [b.to_list() for b in boxes]

    @model_validator(mode="after")
    def validate_lengths(self):
        if len(self.boxes) != len(self.classes):
            raise ValueError("One class per detected box required")
        if self.scores is not None and len(self.scores) != len(self.boxes):
            raise ValueError("One score per detected box required")
        return self


class RelationshipCandidate(BaseModel):
    """Scored (subject box, predicate, object box) hypothesis"""

    subject_index: int
    object_index: int
    subject_class: str
    object_class: str
    subject_box: BoundingBox
    object_box: BoundingBox
    predicate: str
    predicate_index: int
    feature: List[float]
    score: float

    @field_validator("subject_box", "object_box", mode="before")
    @classmethod
    def parse_box(cls, v):
        return _box(v)

    @field_serializer("subject_box", "object_box")
    def serialize_box(self, box: BoundingBox):
        return box.to_list()

    @model_validator(mode="after")
    def validate_candidate(self):
        if self.subject_index == self.object_index:
            raise ValueError("Subject and object must be different detections")
        if len(self.feature) != N_VRD_FEATURES:
            raise ValueError(f"Relationship feature must have {N_VRD_FEATURES} values")
        return self

    @property
    def triple(self) -> Tuple[str, str, str]:
        return (self.subject_class, self.predicate, self.object_class)


class RecallResult(BaseModel):
    """Recall at K; not applicable when there is no ground truth"""

    k: int
    recall: Optional[float] = None
    matched: int = 0
    total: int = 0
    applicable: bool = True

    def get_summary(self) -> Dict[str, object]:
        return {
            "k": self.k,
            "recall": self.recall,
            "matched": self.matched,
            "total": self.total,
            "applicable": self.applicable,
        }
