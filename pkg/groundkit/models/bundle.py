"""
Serializable bundle of everything learned by GROUNDKIT
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..errors import DataFormatError, DimensionError
from ..learners.cca import CcaModel
from ..learners.rank import RankSvmModel
from ..learners.svm import RbfSvmModel
from ..utils.validator import BundleValidator
from .cues import N_PPC, N_SPC

BUNDLE_FORMAT = "groundkit-bundle/1"

# phrase -> region embedding used by the cca cue
PHRASE_REGION_CCA = "phrase_region"


class WeightedModelBundle(BaseModel):
    """Learned weights and models for grounding and relationship detection"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    ws: np.ndarray = Field(default_factory=lambda: np.ones(N_SPC), description="SPC weights")
    wq: np.ndarray = Field(default_factory=lambda: np.zeros(N_PPC), description="PPC weights")
    position_svms: Dict[str, RbfSvmModel] = Field(
        default_factory=dict, description="Position SVM per phrase type"
    )
    pair_bank_dir: Optional[str] = Field(default=None, description="Pair model bank directory")
    cca: Dict[str, CcaModel] = Field(default_factory=dict, description="Named CCA models")
    vrd_cca: List[CcaModel] = Field(
        default_factory=list, description="CCA model behind each of the six VRD scores"
    )
    vrd_position_svms: Dict[str, RbfSvmModel] = Field(
        default_factory=dict, description="Position SVM per VRD object class"
    )
    vrd_predicate_svms: Dict[str, RbfSvmModel] = Field(
        default_factory=dict, description="One-vs-rest spatial SVM per predicate"
    )
    rank_svm: Optional[RankSvmModel] = Field(default=None, description="VRD rank-SVM")
    config_fingerprint: str = Field(default="", description="Configuration hash")
    versions: Dict[str, str] = Field(default_factory=dict, description="Component versions")

    @field_validator("ws", "wq", mode="before")
    @classmethod
    def coerce_weights(cls, v):
        return np.asarray(v, dtype=float)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "format": BUNDLE_FORMAT,
            "ws": self.ws.tolist(),
            "wq": self.wq.tolist(),
            "position_svms": {k: m.to_dict() for k, m in sorted(self.position_svms.items())},
            "pair_bank_dir": self.pair_bank_dir,
            "cca": {k: m.to_dict() for k, m in sorted(self.cca.items())},
            "vrd_cca": [m.to_dict() for m in self.vrd_cca],
            "vrd_position_svms": {k: m.to_dict() for k, m in sorted(self.vrd_position_svms.items())},
            "vrd_predicate_svms": {
                k: m.to_dict() for k, m in sorted(self.vrd_predicate_svms.items())
            },
            "rank_svm": self.rank_svm.to_dict() if self.rank_svm is not None else None,
            "config_fingerprint": self.config_fingerprint,
            "versions": dict(self.versions),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "WeightedModelBundle":
        if data.get("format") != BUNDLE_FORMAT:
            raise DataFormatError(f"Not a model bundle (format={data.get('format')!r})")
        try:
            bundle = cls(
                ws=data["ws"],
                wq=data["wq"],
                position_svms={
                    k: RbfSvmModel.from_dict(v) for k, v in data.get("position_svms", {}).items()
                },
                pair_bank_dir=data.get("pair_bank_dir"),
                cca={k: CcaModel.from_dict(v) for k, v in data.get("cca", {}).items()},
                vrd_cca=[CcaModel.from_dict(v) for v in data.get("vrd_cca", [])],
                vrd_position_svms={
                    k: RbfSvmModel.from_dict(v)
                    for k, v in data.get("vrd_position_svms", {}).items()
                },
                vrd_predicate_svms={
                    k: RbfSvmModel.from_dict(v)
                    for k, v in data.get("vrd_predicate_svms", {}).items()
                },
                rank_svm=RankSvmModel.from_dict(data["rank_svm"]) if data.get("rank_svm") else None,
                config_fingerprint=data.get("config_fingerprint", ""),
                versions=data.get("versions", {}),
            )
        except KeyError as e:
            raise DataFormatError(f"Model bundle is missing {e}") from e
        bundle.check_dimensions()
        return bundle

    def validate_dimensions(self) -> List[str]:
        """Dimension problems, empty when the bundle is consistent"""
        return BundleValidator().validate_bundle(self)

    def check_dimensions(self) -> None:
        errors = self.validate_dimensions()
        if errors:
            raise DimensionError("; ".join(errors))

    def save(self, path: Union[str, Path]) -> None:
        self.check_dimensions()
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "WeightedModelBundle":
        path = Path(path)
        if not path.exists():
            raise DataFormatError("Model bundle not found", path=str(path))
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise DataFormatError(f"Invalid JSON: {e}", path=str(path)) from e
        return cls.from_dict(data)

    def get_summary(self) -> Dict[str, Any]:
        return {
            "ws": [round(float(w), 6) for w in self.ws],
            "wq": [round(float(w), 6) for w in self.wq],
            "position_svms": sorted(self.position_svms),
            "pair_bank_dir": self.pair_bank_dir,
            "cca": sorted(self.cca),
            "vrd_cca_models": len(self.vrd_cca),
            "vrd_predicate_svms": len(self.vrd_predicate_svms),
            "rank_svm": self.rank_svm is not None,
            "config_fingerprint": self.config_fingerprint,
        }
