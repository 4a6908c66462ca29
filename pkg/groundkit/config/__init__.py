"""
Configuration package for GROUNDKIT
"""

from .settings import (
    CCAConfig,
    CueConfig,
    GroundkitConfig,
    PairConfig,
    RetrievalConfig,
    RuntimeConfig,
    SearchConfig,
    SolverConfig,
    SVMConfig,
    VRDConfig,
    create_sample_config,
    get_default_config,
    load_config,
)

__all__ = [
    "GroundkitConfig",
    "RetrievalConfig",
    "CueConfig",
    "CCAConfig",
    "SVMConfig",
    "PairConfig",
    "SolverConfig",
    "SearchConfig",
    "VRDConfig",
    "RuntimeConfig",
    "load_config",
    "get_default_config",
    "create_sample_config",
]
