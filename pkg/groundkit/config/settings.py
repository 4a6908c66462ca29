"""
Configuration settings for GROUNDKIT
"""

import hashlib
import json
import os
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

import yaml
from pydantic import BaseModel, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class RetrievalConfig(BaseModel):
    """Candidate retrieval before joint inference"""

    m: int = Field(default=30, description="Candidates kept per phrase")
    nms_iou: float = Field(default=0.8, description="NMS IOU threshold")
    correct_iou: float = Field(default=0.5, description="IOU counted as a correct localization")

    @field_validator("m")
    @classmethod
    def validate_m(cls, v):
        if v < 1:
            raise ValueError("m must be at least 1")
        return v

    @field_validator("nms_iou", "correct_iou")
    @classmethod
    def validate_ratio(cls, v):
        if not 0.0 < v <= 1.0:
            raise ValueError("IOU thresholds must be in (0, 1]")
        return v


class CueConfig(BaseModel):
    """Single-phrase cue computation"""

    prob_floor: float = Field(default=1e-7, description="Probability floor before -log")
    assets_dir: Optional[str] = Field(
        default=None, description="Dictionary directory (defaults to packaged assets)"
    )
    validate_asset_counts: bool = Field(
        default=True, description="Check dictionary sizes at load time"
    )

    @field_validator("prob_floor")
    @classmethod
    def validate_floor(cls, v):
        if not 0.0 < v < 0.5:
            raise ValueError("prob_floor must be in (0, 0.5)")
        return v


class CCAConfig(BaseModel):
    """Two-view embedding"""

    components: int = Field(default=64, description="Number of canonical components")
    reg: float = Field(default=1e-4, description="Ridge added to both auto-covariances")
    eig_power: float = Field(default=4.0, description="Exponent applied to correlations")

    @field_validator("components")
    @classmethod
    def validate_components(cls, v):
        if v < 1:
            raise ValueError("components must be at least 1")
        return v

    @field_validator("reg", "eig_power")
    @classmethod
    def validate_non_negative(cls, v):
        if v < 0:
            raise ValueError("reg and eig_power must be non-negative")
        return v


class SVMConfig(BaseModel):
    """RBF SVM with Platt scaling"""

    c: float = Field(default=1.0, description="Box constraint")
    gamma: Optional[float] = Field(default=None, description="RBF width (None = 1/dim)")
    kkt_tol: float = Field(default=1e-3, description="KKT violation tolerance")
    max_iter: int = Field(default=100000, description="Maximum SMO pair updates")
    platt_folds: int = Field(default=3, description="Folds for Platt decision values")
    neg_ratio: int = Field(default=3, description="Negatives sampled per positive")

    @field_validator("c", "kkt_tol")
    @classmethod
    def validate_positive(cls, v):
        if v <= 0:
            raise ValueError("c and kkt_tol must be positive")
        return v

    @field_validator("gamma")
    @classmethod
    def validate_gamma(cls, v):
        if v is not None and v <= 0:
            raise ValueError("gamma must be positive")
        return v

    @field_validator("platt_folds")
    @classmethod
    def validate_folds(cls, v):
        if v < 2:
            raise ValueError("platt_folds must be at least 2")
        return v


class PairConfig(BaseModel):
    """Phrase-pair classifier bank"""

    min_count: int = Field(default=30, description="Minimum training occurrences per key")
    neg_ratio: int = Field(default=3, description="Negative pairings per positive")
    restrict_to_dictionary: bool = Field(
        default=False, description="Only train keys listed in the pair dictionaries"
    )

    @field_validator("min_count", "neg_ratio")
    @classmethod
    def validate_counts(cls, v):
        if v < 1:
            raise ValueError("min_count and neg_ratio must be at least 1")
        return v


class SolverConfig(BaseModel):
    """Joint assignment solver"""

    provider: Literal["exact", "relaxed", "auto"] = Field(
        default="auto", description="Solver to use"
    )
    exhaustive_budget: int = Field(default=1_000_000, description="Max enumerated assignments")
    iters: int = Field(default=500, description="Projected-gradient iterations")
    tol: float = Field(default=1e-6, description="Objective change tolerance")
    restarts: int = Field(default=4, description="Relaxation starting points")
    block_moves: bool = Field(default=True, description="Pairwise block improvement after rounding")

    @field_validator("exhaustive_budget", "iters", "restarts")
    @classmethod
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError("solver budgets must be at least 1")
        return v


class SearchConfig(BaseModel):
    """Direct-search weight learning"""

    restarts: int = Field(default=20, description="Random restarts")
    init_scale: float = Field(default=0.25, description="Initial simplex step")
    simplex_mode: Literal["absolute", "relative"] = Field(
        default="absolute", description="Absolute steps or fminsearch-style relative steps"
    )
    max_evals: int = Field(default=2000, description="Function evaluation budget per run")
    xtol: float = Field(default=1e-8, description="Simplex diameter tolerance")
    ftol: float = Field(default=1e-12, description="Function spread tolerance")
    method: Literal["direct", "rank_svm"] = Field(default="direct", description="Learning method")
    rank_c: float = Field(default=1.0, description="Rank-SVM regularization (rank_svm method)")
    rank_epochs: int = Field(default=50, description="Rank-SVM epochs (rank_svm method)")

    @field_validator("restarts", "max_evals")
    @classmethod
    def validate_counts(cls, v):
        if v < 1:
            raise ValueError("restarts and max_evals must be at least 1")
        return v

    @field_validator("init_scale")
    @classmethod
    def validate_scale(cls, v):
        if v <= 0:
            raise ValueError("init_scale must be positive")
        return v


class VRDConfig(BaseModel):
    """Visual relationship detection"""

    n_objects: int = Field(default=100, description="Object class vocabulary size")
    n_predicates: int = Field(default=70, description="Predicate vocabulary size")
    top_k: int = Field(default=10, description="Predicates kept per ordered box pair")
    neg_ratio: int = Field(default=3, description="Negatives per positive for rank training")
    rank_c: float = Field(default=1.0, description="Rank-SVM regularization")
    rank_epochs: int = Field(default=100, description="Rank-SVM epochs")
    one_to_one: bool = Field(default=True, description="Greedy one-to-one GT matching")

    @field_validator("top_k", "n_objects", "n_predicates", "neg_ratio")
    @classmethod
    def validate_counts(cls, v):
        if v < 1:
            raise ValueError("VRD counts must be at least 1")
        return v


class RuntimeConfig(BaseModel):
    """Reproducibility and parallelism"""

    seed: int = Field(default=0, description="Master random seed")
    threads: int = Field(default=1, description="Worker threads for per-image work")

    @field_validator("threads")
    @classmethod
    def validate_threads(cls, v):
        if v < 1:
            raise ValueError("threads must be at least 1")
        return v


class GroundkitConfig(BaseSettings):
    """Main GROUNDKIT configuration"""

    model_config = SettingsConfigDict(
        env_prefix="GROUNDKIT_",
        env_file=".env",
        env_file_encoding="utf-8",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )

    retrieval: RetrievalConfig = Field(default_factory=RetrievalConfig)
    cues: CueConfig = Field(default_factory=CueConfig)
    cca: CCAConfig = Field(default_factory=CCAConfig)
    svm: SVMConfig = Field(default_factory=SVMConfig)
    pairs: PairConfig = Field(default_factory=PairConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    search: SearchConfig = Field(default_factory=SearchConfig)
    vrd: VRDConfig = Field(default_factory=VRDConfig)
    runtime: RuntimeConfig = Field(default_factory=RuntimeConfig)
    debug: bool = Field(default=False, description="Enable debug mode")

    @model_validator(mode="after")
    def validate_cross_sections(self):
        if self.vrd.top_k > self.vrd.n_predicates:
            raise ValueError("vrd.top_k cannot exceed vrd.n_predicates")
        return self

    @classmethod
    def from_file(cls, config_path: Union[str, Path]) -> "GroundkitConfig":
        """Load configuration from YAML file"""
        config_path = Path(config_path)

        if not config_path.exists():
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        with open(config_path, "r", encoding="utf-8") as f:
            config_data = yaml.safe_load(f) or {}

        return cls(**config_data)

    @classmethod
    def from_dict(cls, config_dict: Dict[str, Any]) -> "GroundkitConfig":
        """Load configuration from dictionary"""
        return cls(**config_dict)

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary"""
        return self.model_dump()

    def to_yaml(self, file_path: Union[str, Path]) -> None:
        """Save configuration to YAML file"""
        with open(file_path, "w", encoding="utf-8") as f:
            yaml.dump(self.model_dump(), f, default_flow_style=False, indent=2)

    def fingerprint(self) -> str:
        """SHA-256 of the canonical configuration, recorded in bundles"""
        payload = json.dumps(self.model_dump(mode="json"), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def get_default_config() -> GroundkitConfig:
    """Get default configuration"""
    return GroundkitConfig()


def load_config(config_path: Optional[Union[str, Path]] = None) -> GroundkitConfig:
    """
    Load configuration from file or environment

    Priority:
    1. Provided config_path
    2. GROUNDKIT_CONFIG_PATH environment variable
    3. Common file names in the working directory
    4. Default configuration
    """
    if config_path:
        return GroundkitConfig.from_file(config_path)

    env_config_path = os.getenv("GROUNDKIT_CONFIG_PATH")
    if env_config_path and Path(env_config_path).exists():
        return GroundkitConfig.from_file(env_config_path)

    common_names = [
        "groundkit_config.yaml",
        "groundkit_config.yml",
        "groundkit.yaml",
        "groundkit.yml",
        ".groundkit.yaml",
        ".groundkit.yml",
    ]

    for name in common_names:
        if Path(name).exists():
            return GroundkitConfig.from_file(name)

    return GroundkitConfig()


SAMPLE_CONFIG = """# GROUNDKIT configuration - phrase grounding and relationship detection
# ====================================================================

# Candidate retrieval (top-M after NMS on single-phrase scores)
retrieval:
  m: 30
  nms_iou: 0.8
  correct_iou: 0.5

# Single-phrase cues
cues:
  prob_floor: 1.0e-7
  assets_dir: null          # packaged dictionaries when null
  validate_asset_counts: true

# Region-phrase embedding
cca:
  components: 64
  reg: 1.0e-4
  eig_power: 4.0

# RBF SVM + Platt scaling (position and pairwise spatial models)
svm:
  c: 1.0
  gamma: null               # 1/feature_dim when null
  kkt_tol: 1.0e-3
  max_iter: 100000
  platt_folds: 3
  neg_ratio: 3

# Phrase-pair classifier bank
pairs:
  min_count: 30
  neg_ratio: 3
  restrict_to_dictionary: false

# Joint assignment
solver:
  provider: "auto"          # "exact", "relaxed" or "auto"
  exhaustive_budget: 1000000
  iters: 500
  tol: 1.0e-6
  restarts: 4
  block_moves: true

# Weight learning
search:
  restarts: 20
  init_scale: 0.25
  simplex_mode: "absolute"  # "absolute" or "relative"
  max_evals: 2000
  xtol: 1.0e-8
  ftol: 1.0e-12
  method: "direct"          # "direct" or "rank_svm"
  rank_c: 1.0
  rank_epochs: 50

# Visual relationship detection
vrd:
  n_objects: 100
  n_predicates: 70
  top_k: 10
  neg_ratio: 3
  rank_c: 1.0
  rank_epochs: 100
  one_to_one: true

runtime:
  seed: 0
  threads: 1

# Debug mode
debug: false
"""


def create_sample_config(output_path: Union[str, Path] = "groundkit_config.yaml") -> None:
    """Create a sample configuration file"""
    with open(output_path, "w", encoding="utf-8") as f:
        f.write(SAMPLE_CONFIG)
