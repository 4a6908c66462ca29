"""
GROUNDKIT models package
"""

from .geometry import BoundingBox, ImageSize
from .language import (
    PHRASE_TYPES,
    EntityMention,
    ParseTree,
    PhraseType,
    PronounClass,
    PronounLink,
    RelationKind,
    RelationTuple,
    SentenceRecord,
    TupleExtraction,
)
from .cues import (
    N_PPC,
    N_SPC,
    PPC_SLOTS,
    SPC_SLOTS,
    CueCostTable,
    CueRow,
    DetectorScoreTable,
    PairClassifierKey,
    PhraseCueConfig,
)
from .inference import Assignment, JointProblem, PairTerm, RankedCandidate
from .vrd import (
    N_CCA_SCORES,
    N_VRD_FEATURES,
    VRD_FEATURE_NAMES,
    RecallResult,
    RelationshipCandidate,
    VrdDetections,
    VrdGroundTruth,
    VrdRelationship,
    VrdVocabulary,
)
from .bundle import WeightedModelBundle

__all__ = [
    # Geometry
    "BoundingBox",
    "ImageSize",
    # Language
    "PHRASE_TYPES",
    "EntityMention",
    "ParseTree",
    "PhraseType",
    "PronounClass",
    "PronounLink",
    "RelationKind",
    "RelationTuple",
    "SentenceRecord",
    "TupleExtraction",
    # Cues
    "N_PPC",
    "N_SPC",
    "PPC_SLOTS",
    "SPC_SLOTS",
    "CueCostTable",
    "CueRow",
    "DetectorScoreTable",
    "PairClassifierKey",
    "PhraseCueConfig",
    # Inference
    "Assignment",
    "JointProblem",
    "PairTerm",
    "RankedCandidate",
    # VRD
    "N_CCA_SCORES",
    "N_VRD_FEATURES",
    "VRD_FEATURE_NAMES",
    "RecallResult",
    "RelationshipCandidate",
    "VrdDetections",
    "VrdGroundTruth",
    "VrdRelationship",
    "VrdVocabulary",
    # Bundle
    "WeightedModelBundle",
]
