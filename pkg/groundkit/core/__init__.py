"""
Core functionality package for GROUNDKIT
"""

from .assets import AssetStore, build_verb_categories
from .cues import CueAssembler, assemble_spc, fit_position_svms, phrase_key, region_key, union_key
from .learn import LearnResult, PairExample, learn_weights_q, learn_weights_s
from .metrics import RecallCount, RecallReport, recall_at_1, recall_by_cue, upper_bound
from .pipeline import GroundingPipeline, GroundingResult, retrieval_upper_bound, save_predictions
from .ppc import PairBankTrainer, PairModelBank, PairSample, ppc_cost, train_pair_bank
from .retrieval import retrieve_candidates
from .synth import SynthConfig, synth_grounding_dataset, synth_pair_samples, synth_vrd_dataset
from .vrd import VrdScorer, VrdTrainer, eval_recall_at, score_relationships

__all__ = [
    "AssetStore",
    "build_verb_categories",
    "CueAssembler",
    "assemble_spc",
    "fit_position_svms",
    "phrase_key",
    "region_key",
    "union_key",
    "LearnResult",
    "PairExample",
    "learn_weights_q",
    "learn_weights_s",
    "RecallCount",
    "RecallReport",
    "recall_at_1",
    "recall_by_cue",
    "upper_bound",
    "GroundingPipeline",
    "GroundingResult",
    "retrieval_upper_bound",
    "save_predictions",
    "PairBankTrainer",
    "PairModelBank",
    "PairSample",
    "ppc_cost",
    "train_pair_bank",
    "retrieve_candidates",
    "SynthConfig",
    "synth_grounding_dataset",
    "synth_pair_samples",
    "synth_vrd_dataset",
    "VrdScorer",
    "VrdTrainer",
    "eval_recall_at",
    "score_relationships",
]
