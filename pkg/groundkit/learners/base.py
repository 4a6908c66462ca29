"""
Base interface for learned models in GROUNDKIT
"""

import json
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, ClassVar, Dict, Type, TypeVar, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..errors import DataFormatError, DimensionError

ModelT = TypeVar("ModelT", bound="LearnedModel")


def as_vector(values: Any, dim: int, what: str = "feature") -> np.ndarray:
    """Coerce to a finite 1-D float vector of the expected dimension"""
    vector = np.asarray(values, dtype=float).reshape(-1)
    if vector.size != dim:
        raise DimensionError(f"{what} has dimension {vector.size}, model expects {dim}")
    if not np.all(np.isfinite(vector)):
        raise ValueError(f"{what} has non-finite values")
    return vector


class LearnedModel(BaseModel, ABC):
    """
    Abstract base class for trained models

    Every model serializes to a JSON object carrying a ``model_type`` tag so
    that bundles and banks can reload it through the model registry.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    model_type: ClassVar[str] = "model"

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """Serialize to JSON-compatible data"""
        pass

    @classmethod
    @abstractmethod
    def from_dict(cls: Type[ModelT], data: Dict[str, Any]) -> ModelT:
        """Rebuild from serialized data"""
        pass

    @abstractmethod
    def get_model_info(self) -> Dict[str, Any]:
        """Short description of the model"""
        pass

    def save(self, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f)

    @classmethod
    def load(cls: Type[ModelT], path: Union[str, Path]) -> ModelT:
        path = Path(path)
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        if data.get("model_type") != cls.model_type:
            raise DataFormatError(
                f"expected model_type '{cls.model_type}', found '{data.get('model_type')}'",
                path=str(path),
            )
        return cls.from_dict(data)
