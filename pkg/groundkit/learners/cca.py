"""
Two-view canonical correlation analysis for phrase/region compatibility
"""

from typing import Any, ClassVar, Dict, Literal

import numpy as np
import scipy.linalg as la
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import DimensionError, TrainingError
from .base import LearnedModel, as_vector

View = Literal["x", "y"]

# relative eigenvalue floor below which a covariance counts as rank-deficient
_RANK_TOL = 1e-12
_ZERO_NORM = 1e-12


class Embedding(BaseModel):
    """Unit-length embedded vector, or a zero vector when projection vanishes"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    vector: np.ndarray
    normalizable: bool = True


class CcaCost(BaseModel):
    """Cosine distance between two embeddings"""

    cost: float
    degenerate: bool = False


class CcaModel(LearnedModel):
    """Paired linear projections maximizing cross-view correlation"""

    model_type: ClassVar[str] = "cca"

    proj_x: np.ndarray = Field(..., description="d_x x k projection")
    proj_y: np.ndarray = Field(..., description="d_y x k projection")
    mean_x: np.ndarray
    mean_y: np.ndarray
    correlations: np.ndarray = Field(..., description="Canonical correlations, non-increasing")
    eig_power: float = 4.0
    reg: float = 0.0

    @model_validator(mode="after")
    def validate_layout(self):
        k = self.correlations.size
        if self.proj_x.shape != (self.mean_x.size, k) or self.proj_y.shape != (self.mean_y.size, k):
            raise DimensionError("Projection shapes do not match means and correlations")
        if k > min(self.mean_x.size, self.mean_y.size):
            raise DimensionError("More components than the smaller view dimension")
        if np.any(self.correlations < 0) or np.any(self.correlations > 1 + 1e-8):
            raise ValueError("Correlations must lie in [0, 1]")
        if np.any(np.diff(self.correlations) > 1e-12):
            raise ValueError("Correlations must be non-increasing")
        if self.eig_power < 0:
            raise ValueError("eig_power must be non-negative")
        return self

    @property
    def k(self) -> int:
        return int(self.correlations.size)

    @property
    def dim_x(self) -> int:
        return int(self.mean_x.size)

    @property
    def dim_y(self) -> int:
        return int(self.mean_y.size)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model_type": self.model_type,
            "dim_x": self.dim_x,
            "dim_y": self.dim_y,
            "k": self.k,
            "reg": self.reg,
            "eig_power": self.eig_power,
            "proj_x": self.proj_x.tolist(),
            "proj_y": self.proj_y.tolist(),
            "mean_x": self.mean_x.tolist(),
            "mean_y": self.mean_y.tolist(),
            "correlations": self.correlations.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CcaModel":
        model = cls(
            proj_x=np.asarray(data["proj_x"], dtype=float).reshape(data["dim_x"], data["k"]),
            proj_y=np.asarray(data["proj_y"], dtype=float).reshape(data["dim_y"], data["k"]),
            mean_x=np.asarray(data["mean_x"], dtype=float),
            mean_y=np.asarray(data["mean_y"], dtype=float),
            correlations=np.asarray(data["correlations"], dtype=float),
            eig_power=float(data.get("eig_power", 4.0)),
            reg=float(data.get("reg", 0.0)),
        )
        return model

    def get_model_info(self) -> Dict[str, Any]:
        return {
            "type": self.model_type,
            "dims": [self.dim_x, self.dim_y],
            "components": self.k,
            "top_correlation": float(self.correlations[0]) if self.k else None,
        }

    def _scaled_projection(self, view: View) -> tuple:
        if view == "x":
            proj, mean = self.proj_x, self.mean_x
        elif view == "y":
            proj, mean = self.proj_y, self.mean_y
        else:
            raise ValueError(f"Unknown view '{view}'")
        scale = self.correlations ** self.eig_power
        return proj * scale[None, :], mean

    def embed_many(self, values: np.ndarray, view: View) -> np.ndarray:
        """Embed the rows of a matrix; rows that vanish stay zero"""
        proj, mean = self._scaled_projection(view)
        values = np.atleast_2d(np.asarray(values, dtype=float))
        if values.shape[1] != mean.size:
            raise DimensionError(
                f"view {view} expects dimension {mean.size}, got {values.shape[1]}"
            )
        projected = (values - mean) @ proj
        norms = np.linalg.norm(projected, axis=1, keepdims=True)
        safe = np.where(norms > _ZERO_NORM, norms, 1.0)
        return np.where(norms > _ZERO_NORM, projected / safe, 0.0)


def fit_cca(
    x: np.ndarray, y: np.ndarray, k: int, reg: float = 0.0, eig_power: float = 4.0
) -> CcaModel:
    """
    Fit CCA by whitening both views and taking the SVD of the cross-covariance

    Args:
        x: n x d_x matrix (phrase or text view)
        y: n x d_y matrix (region view), rows paired with x
        k: number of components
        reg: ridge added to both auto-covariances
        eig_power: exponent applied to correlations when embedding

    Returns:
        Fitted CcaModel
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or y.ndim != 2:
        raise DimensionError("Both views must be 2-D matrices")
    n, dx = x.shape
    if y.shape[0] != n:
        raise DimensionError(f"Views have {n} and {y.shape[0]} rows; rows must be paired")
    if n < 2:
        raise TrainingError("CCA needs at least two paired rows")
    dy = y.shape[1]
    if k < 1 or k > min(dx, dy):
        raise DimensionError(f"k={k} must be between 1 and min(d_x, d_y)={min(dx, dy)}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise TrainingError("CCA inputs contain non-finite values")
    if reg < 0:
        raise ValueError("reg must be non-negative")

    mean_x = x.mean(axis=0)
    mean_y = y.mean(axis=0)
    xc = x - mean_x
    yc = y - mean_y

    # population covariances make duplicated rows leave the fit unchanged
    cxx = xc.T @ xc / n + reg * np.eye(dx)
    cyy = yc.T @ yc / n + reg * np.eye(dy)
    cxy = xc.T @ yc / n

    isqrt_x = _inverse_sqrt(cxx, "x")
    isqrt_y = _inverse_sqrt(cyy, "y")

    u, s, vt = la.svd(isqrt_x @ cxy @ isqrt_y, full_matrices=False)
    proj_x = isqrt_x @ u[:, :k]
    proj_y = isqrt_y @ vt[:k].T
    correlations = np.clip(s[:k], 0.0, 1.0)

    # largest-magnitude entry of each x column is made positive
    pivots = np.argmax(np.abs(proj_x), axis=0)
    signs = np.sign(proj_x[pivots, np.arange(k)])
    signs[signs == 0] = 1.0
    proj_x = proj_x * signs
    proj_y = proj_y * signs

    return CcaModel(
        proj_x=proj_x,
        proj_y=proj_y,
        mean_x=mean_x,
        mean_y=mean_y,
        correlations=correlations,
        eig_power=eig_power,
        reg=reg,
    )


def _inverse_sqrt(cov: np.ndarray, view: str) -> np.ndarray:
    eigvals, eigvecs = la.eigh(cov)
    floor = _RANK_TOL * max(float(eigvals.max()), 1.0)
    if eigvals.min() <= floor:
        raise TrainingError(
            f"Covariance of view {view} is rank-deficient; set reg > 0 to regularize it"
        )
    return (eigvecs / np.sqrt(eigvals)) @ eigvecs.T


def embed(model: CcaModel, v: Any, view: View) -> Embedding:
    """Center, project, scale by correlations**eig_power and L2-normalize"""
    proj, mean = model._scaled_projection(view)
    vector = as_vector(v, mean.size, what=f"view {view} vector")
    projected = (vector - mean) @ proj
    norm = float(np.linalg.norm(projected))
    if norm <= _ZERO_NORM:
        return Embedding(vector=np.zeros(model.k), normalizable=False)
    return Embedding(vector=projected / norm)


def cosine_cost(a: Embedding, b: Embedding) -> CcaCost:
    """1 - cosine similarity of two embeddings, in [0, 2]"""
    if not (a.normalizable and b.normalizable):
        return CcaCost(cost=2.0, degenerate=True)
    cost = 1.0 - float(np.dot(a.vector, b.vector))
    return CcaCost(cost=min(max(cost, 0.0), 2.0))


def cca_cost(model: CcaModel, phrase_vec: Any, region_vec: Any) -> CcaCost:
    """Cosine distance between the embedded phrase (x view) and region (y view)"""
    return cosine_cost(embed(model, phrase_vec, "x"), embed(model, region_vec, "y"))
