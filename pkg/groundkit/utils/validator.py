"""
Validation utilities for GROUNDKIT
"""

from typing import TYPE_CHECKING, List

import numpy as np

from ..models.cues import N_PPC, N_SPC, SPC_SLOTS, CueCostTable
from ..models.inference import Assignment, JointProblem
from ..models.vrd import N_CCA_SCORES, N_VRD_FEATURES

if TYPE_CHECKING:
    from ..models.bundle import WeightedModelBundle

POSITION_DIM = 4


class BundleValidator:
    """Validator for learned bundles, cue tables and solver results"""

    def validate_bundle(self, bundle: "WeightedModelBundle") -> List[str]:
        """
        Check every dimension a bundle promises (14 / 3 / 6 / 11)

        Returns:
            List of validation errors
        """
        errors = []

        if bundle.ws.shape != (N_SPC,):
            errors.append(f"ws has {bundle.ws.size} weights, expected {N_SPC}")
        if bundle.wq.shape != (N_PPC,):
            errors.append(f"wq has {bundle.wq.size} weights, expected {N_PPC}")
        if not np.all(np.isfinite(bundle.ws)) or not np.all(np.isfinite(bundle.wq)):
            errors.append("weights must be finite")

        if bundle.vrd_cca and len(bundle.vrd_cca) != N_CCA_SCORES:
            errors.append(f"vrd_cca has {len(bundle.vrd_cca)} models, expected {N_CCA_SCORES}")
        if bundle.rank_svm is not None and bundle.rank_svm.dim != N_VRD_FEATURES:
            errors.append(f"rank_svm has dim {bundle.rank_svm.dim}, expected {N_VRD_FEATURES}")

        for group, models in (
            ("position SVM", bundle.position_svms),
            ("VRD position SVM", bundle.vrd_position_svms),
            ("predicate SVM", bundle.vrd_predicate_svms),
        ):
            for name, model in models.items():
                if model.dim != POSITION_DIM:
                    errors.append(f"{group} '{name}' has dim {model.dim}, expected {POSITION_DIM}")

        return errors

    def validate_cue_table(self, table: CueCostTable) -> List[str]:
        errors = []

        if table.cue_names != SPC_SLOTS:
            errors.append("cue slots differ from the standard 14")
        if np.any(table.costs < 0):
            errors.append("negative cue costs")
        if not np.all(np.isfinite(table.costs)):
            errors.append("non-finite cue costs")

        cca = SPC_SLOTS.index("cca")
        size_slots = [i for i, name in enumerate(SPC_SLOTS) if name.startswith("size_")]
        for row, phrase_id in enumerate(table.phrase_ids):
            if not table.available[row, cca]:
                errors.append(f"{phrase_id}: cca cue must always be available")
            n_sizes = int(table.available[row, size_slots].sum())
            if n_sizes != 1:
                errors.append(f"{phrase_id}: {n_sizes} size slots available, expected 1")
            masked = ~table.available[row].astype(bool)
            if np.any(table.costs[row][:, masked] != 0):
                errors.append(f"{phrase_id}: unavailable cues must store 0")

        return errors

    def validate_assignment(
        self, problem: JointProblem, assignment: Assignment, tol: float = 1e-9
    ) -> List[str]:
        errors = []

        if len(assignment.chosen) != problem.n_phrases:
            return [f"{len(assignment.chosen)} indices for {problem.n_phrases} phrases"]
        for i, (index, size) in enumerate(zip(assignment.chosen, problem.sizes)):
            if not 0 <= index < size:
                errors.append(f"phrase {i}: index {index} outside {size} candidates")
        if errors:
            return errors

        recomputed = problem.objective(assignment.chosen)
        if abs(recomputed - assignment.objective) > tol:
            errors.append(f"objective {assignment.objective} != recomputed {recomputed}")

        return errors
