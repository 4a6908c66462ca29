"""
Exception hierarchy for GROUNDKIT
"""

from typing import Any, Dict, Optional


class GroundkitError(Exception):
    """Base exception for GROUNDKIT errors"""

    code = "groundkit_error"

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form used by the CLI"""
        return {"error": self.code, "message": str(self)}


class ConfigurationError(GroundkitError):
    """Invalid or inconsistent configuration"""

    code = "configuration_error"


class DataFormatError(GroundkitError):
    """Input file does not follow its schema"""

    code = "data_format_error"

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line


class ParseError(GroundkitError):
    """Malformed bracketed parse"""

    code = "parse_error"

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at character {offset})")
        self.offset = offset

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["offset"] = self.offset
        return data


class DimensionError(GroundkitError):
    """Vector or matrix dimension does not match the model"""

    code = "dimension_error"


class TrainingError(GroundkitError):
    """Training data cannot produce a model"""

    code = "training_error"


class BudgetExceededError(GroundkitError):
    """Exhaustive enumeration would exceed its budget"""

    code = "budget_exceeded"


class MissingFeatureError(GroundkitError):
    """A region feature required for scoring is absent"""

    code = "missing_feature"


class AssetError(GroundkitError):
    """Dictionary asset missing or with unexpected size"""

    code = "asset_error"
