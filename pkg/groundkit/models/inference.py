"""
Joint inference models for GROUNDKIT
"""

from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .geometry import BoundingBox


class PairTerm(BaseModel):
    """Weighted pairwise costs between the candidates of two phrases"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    i: int = Field(..., description="Left phrase index")
    j: int = Field(..., description="Right phrase index")
    costs: np.ndarray = Field(..., description="candidates(i) x candidates(j) costs")

    @model_validator(mode="after")
    def validate_term(self):
        if self.i == self.j:
            raise ValueError("Pair terms link two different phrases")
        if self.costs.ndim != 2 or not np.all(np.isfinite(self.costs)):
            raise ValueError("Pair term costs must be a finite matrix")
        return self


class RankedCandidate(BaseModel):
    """Candidate box kept by retrieval, with its SPC score"""

    index: int = Field(..., description="Index into the original candidate list")
    box: BoundingBox
    score: float


class JointProblem(BaseModel):
    """Phrase-to-box assignment problem over retrieved candidates"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    phrase_ids: List[str] = Field(default_factory=list, description="Phrase identifiers")
    unary: List[np.ndarray] = Field(..., description="SPC scores per phrase")
    pair_terms: List[PairTerm] = Field(default_factory=list, description="Pairwise terms")
    candidates: List[List[BoundingBox]] = Field(
        default_factory=list, description="Candidate boxes per phrase"
    )

    @field_validator("unary", mode="before")
    @classmethod
    def coerce_unary(cls, v):
        return [np.asarray(u, dtype=float) for u in v]

    @model_validator(mode="after")
    def validate_problem(self):
        if not self.phrase_ids:
            self.phrase_ids = [str(i) for i in range(len(self.unary))]
        if len(self.phrase_ids) != len(self.unary):
            raise ValueError("One unary vector per phrase required")
        for index, u in enumerate(self.unary):
            if u.ndim != 1 or u.size == 0:
                raise ValueError(f"Phrase {index} needs at least one candidate")
            if not np.all(np.isfinite(u)):
                raise ValueError(f"Phrase {index} has non-finite unary costs")
        for term in self.pair_terms:
            for side in (term.i, term.j):
                if not 0 <= side < len(self.unary):
                    raise ValueError(f"Pair term references unknown phrase {side}")
            if term.costs.shape != (self.unary[term.i].size, self.unary[term.j].size):
                raise ValueError(f"Pair term ({term.i}, {term.j}) shape mismatch")
        return self

    @property
    def n_phrases(self) -> int:
        return len(self.unary)

    @property
    def sizes(self) -> List[int]:
        return [u.size for u in self.unary]

    def merged_pair_terms(self) -> Dict[tuple, np.ndarray]:
        """Sum terms that share an ordered phrase pair"""
        merged: Dict[tuple, np.ndarray] = {}
        for term in self.pair_terms:
            key = (term.i, term.j)
            merged[key] = merged[key] + term.costs if key in merged else term.costs.copy()
        return merged

    def objective(self, chosen: List[int]) -> float:
        """Joint cost of an assignment"""
        if len(chosen) != self.n_phrases:
            raise ValueError("One chosen index per phrase required")
        total = sum(float(u[c]) for u, c in zip(self.unary, chosen))
        for term in self.pair_terms:
            total += float(term.costs[chosen[term.i], chosen[term.j]])
        return total


class Assignment(BaseModel):
    """One chosen candidate per phrase and the resulting joint cost"""

    chosen: List[int] = Field(..., description="Chosen candidate index per phrase")
    objective: float = Field(..., description="Joint cost")
    solver: str = Field(default="", description="Solver that produced it")
    metadata: Dict[str, Any] = Field(default_factory=dict)

    def boxes(self, problem: JointProblem) -> List[Optional[BoundingBox]]:
        if not problem.candidates:
            return [None] * len(self.chosen)
        return [problem.candidates[i][c] for i, c in enumerate(self.chosen)]
