"""
GROUNDKIT - Phrase localization with single-phrase and phrase-pair cues
"""

__version__ = "0.1.0"
__author__ = "GROUNDKIT Team"
__description__ = "Phrase grounding and relationship detection from weighted linguistic cues"

# models first: the bundle validator resolves model types lazily
from . import models  # noqa: E402,F401


def get_version():
    """Get GROUNDKIT version"""
    return __version__


def get_info():
    """Get package information"""
    return {
        "name": "groundkit",
        "version": __version__,
        "description": __description__,
        "author": __author__,
    }


def check_installation():
    """Check what's available"""
    status = {
        "core": True,
        "config": False,
        "models": False,
        "pipeline": False,
        "solvers": False,
    }

    try:
        from .config.settings import GroundkitConfig, create_sample_config, load_config

        status["config"] = True
        globals().update(
            {
                "GroundkitConfig": GroundkitConfig,
                "load_config": load_config,
                "create_sample_config": create_sample_config,
            }
        )
    except ImportError:
        pass

    try:
        from .models import BoundingBox, CueCostTable, SentenceRecord, WeightedModelBundle

        status["models"] = True
        globals().update(
            {
                "BoundingBox": BoundingBox,
                "CueCostTable": CueCostTable,
                "SentenceRecord": SentenceRecord,
                "WeightedModelBundle": WeightedModelBundle,
            }
        )
    except ImportError:
        pass

    try:
        from .core.pipeline import GroundingPipeline

        status["pipeline"] = True
        globals().update({"GroundingPipeline": GroundingPipeline})
    except ImportError:
        pass

    try:
        from .solvers.factory import SolverFactory

        status["solvers"] = True
        globals().update({"SolverFactory": SolverFactory})
    except ImportError:
        pass

    return status


_status = check_installation()

__all__ = ["get_version", "get_info", "check_installation"]

if _status["config"]:
    __all__.extend(["GroundkitConfig", "load_config", "create_sample_config"])

if _status["models"]:
    __all__.extend(["BoundingBox", "CueCostTable", "SentenceRecord", "WeightedModelBundle"])

if _status["pipeline"]:
    __all__.extend(["GroundingPipeline"])

if _status["solvers"]:
    __all__.extend(["SolverFactory"])
