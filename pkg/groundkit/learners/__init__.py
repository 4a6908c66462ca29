"""
Learners for GROUNDKIT: CCA, RBF SVM with Platt scaling, linear rank-SVM
"""

from .base import LearnedModel
from .cca import CcaCost, CcaModel, Embedding, cca_cost, cosine_cost, embed, fit_cca
from .factory import ModelFactory
from .rank import RankSvmModel, RankSvmTrainer, count_violations, rank_score, train_rank_svm
from .svm import (
    RbfSvmModel,
    RbfSvmTrainer,
    grid_search_gamma,
    predict_prob,
    train_rbf_svm,
)

__all__ = [
    "LearnedModel",
    "ModelFactory",
    "CcaModel",
    "CcaCost",
    "Embedding",
    "fit_cca",
    "embed",
    "cca_cost",
    "cosine_cost",
    "RbfSvmModel",
    "RbfSvmTrainer",
    "train_rbf_svm",
    "predict_prob",
    "grid_search_gamma",
    "RankSvmModel",
    "RankSvmTrainer",
    "train_rank_svm",
    "rank_score",
    "count_violations",
]
