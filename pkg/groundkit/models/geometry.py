"""
Geometry models for GROUNDKIT
"""

import math
from typing import List, Sequence

from pydantic import BaseModel, ConfigDict, Field, field_validator


class BoundingBox(BaseModel):
    """Axis-aligned region in pixel coordinates, stored as (x, y, w, h)"""

    model_config = ConfigDict(frozen=True)

    x: float = Field(..., description="Left edge in pixels")
    y: float = Field(..., description="Top edge in pixels")
    w: float = Field(..., description="Width in pixels")
    h: float = Field(..., description="Height in pixels")

    @field_validator("x", "y", "w", "h")
    @classmethod
    def validate_finite(cls, v):
        if not math.isfinite(v):
            raise ValueError("Box coordinates must be finite")
        return v

    @field_validator("w", "h")
    @classmethod
    def validate_positive(cls, v):
        if v <= 0:
            raise ValueError("Box width and height must be positive")
        return v

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def area(self) -> float:
        return self.w * self.h

    @classmethod
    def from_list(cls, values: Sequence[float]) -> "BoundingBox":
        """Build from [x, y, w, h]"""
        if len(values) != 4:
            raise ValueError(f"Expected 4 box values, got {len(values)}")
        x, y, w, h = (float(v) for v in values)
        return cls(x=x, y=y, w=w, h=h)

    @classmethod
    def from_corners(cls, x1: float, y1: float, x2: float, y2: float) -> "BoundingBox":
        """Build from corner coordinates (x1, y1, x2, y2)"""
        return cls(x=x1, y=y1, w=x2 - x1, h=y2 - y1)

    def to_list(self) -> List[float]:
        return [self.x, self.y, self.w, self.h]


class ImageSize(BaseModel):
    """Image dimensions used to normalize box features"""

    model_config = ConfigDict(frozen=True)

    width: float = Field(..., description="Image width in pixels")
    height: float = Field(..., description="Image height in pixels")

    @field_validator("width", "height")
    @classmethod
    def validate_positive(cls, v):
        if not math.isfinite(v) or v <= 0:
            raise ValueError("Image dimensions must be positive")
        return v

    @property
    def area(self) -> float:
        return self.width * self.height
