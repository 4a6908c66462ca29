"""
Learned-model factory for GROUNDKIT
"""

from typing import Any, Dict, List, Type

from ..errors import DataFormatError
from .base import LearnedModel
from .cca import CcaModel
from .rank import RankSvmModel
from .svm import RbfSvmModel


class ModelFactory:
    """Rebuild serialized models from their ``model_type`` tag"""

    _registry: Dict[str, Type[LearnedModel]] = {
        CcaModel.model_type: CcaModel,
        RbfSvmModel.model_type: RbfSvmModel,
        RankSvmModel.model_type: RankSvmModel,
    }

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> LearnedModel:
        """
        Create a model from serialized data

        Raises:
            DataFormatError: If the model type is missing or unknown
        """
        model_type = data.get("model_type")
        if model_type not in ModelFactory._registry:
            raise DataFormatError(f"Unsupported model type: {model_type}")
        return ModelFactory._registry[model_type].from_dict(data)

    @staticmethod
    def get_available_models() -> List[str]:
        return sorted(ModelFactory._registry)
