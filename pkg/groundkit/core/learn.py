"""
Cue weight learning by direct search on localization recall
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..config.settings import SearchConfig
from ..errors import DimensionError, TrainingError
from ..learners.rank import RankSvmTrainer
from ..models.cues import N_PPC, N_SPC, CueCostTable
from ..utils.geometry import boxes_to_array, iou_many
from ..utils.logger import get_logger, log_duration
from ..utils.optimize import nelder_mead
from ..utils.workers import map_ordered

logger = get_logger(__name__)


class PairExample(BaseModel):
    """One relation of a validation sentence, ready for pairwise recall"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    left_costs: np.ndarray = Field(..., description="C x 14 SPC costs of the left phrase")
    left_available: np.ndarray = Field(..., description="14 availability flags")
    right_costs: np.ndarray = Field(..., description="C' x 14 SPC costs of the right phrase")
    right_available: np.ndarray
    pair_costs: np.ndarray = Field(..., description="C x C' x 3 PPC costs")
    pair_available: np.ndarray = Field(..., description="3 availability flags")
    left_correct: np.ndarray = Field(..., description="C flags, IOU >= 0.5 with the left GT")
    right_correct: np.ndarray

    @field_validator("left_available", "right_available", "pair_available", "left_correct", "right_correct", mode="before")
    @classmethod
    def coerce_flags(cls, v):
        return np.asarray(v, dtype=bool)

    @model_validator(mode="after")
    def validate_shapes(self):
        c, c2 = self.left_costs.shape[0], self.right_costs.shape[0]
        if self.left_costs.shape != (c, N_SPC) or self.right_costs.shape != (c2, N_SPC):
            raise DimensionError(f"SPC costs must have {N_SPC} columns")
        if self.pair_costs.shape != (c, c2, N_PPC):
            raise DimensionError(f"Pair costs shape {self.pair_costs.shape} != {(c, c2, N_PPC)}")
        if self.left_correct.shape != (c,) or self.right_correct.shape != (c2,):
            raise DimensionError("One correctness flag per candidate required")
        return self


class LearnResult(BaseModel):
    """Best weights found and the recall they reach"""

    weights: List[float]
    recall: int = Field(..., description="Correct count on the validation set")
    total: int = Field(..., description="Count reached by a perfect predictor")
    restart: int = Field(default=0, description="Restart that produced the weights")
    evals: int = Field(default=0, description="Objective evaluations over all restarts")
    method: str = Field(default="direct")

    @property
    def ratio(self) -> float:
        return self.recall / self.total if self.total else 0.0


def correct_mask(table: CueCostTable, correct_iou: float = 0.5) -> np.ndarray:
    """phrases x candidates flags: IOU with the phrase's GT union >= correct_iou"""
    arr = boxes_to_array(table.candidates)
    mask = np.zeros((len(table.phrase_ids), len(table.candidates)), dtype=bool)
    for p, gt in enumerate(table.gt_boxes):
        if gt is not None:
            mask[p] = iou_many(gt, arr) >= correct_iou
    return mask


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class SpcLearnData:
    """Validation phrases with GT, padded to a common candidate count"""

    def __init__(self, tables: Sequence[CueCostTable], correct_iou: float = 0.5):
        rows = []
        for table in tables:
            correct = correct_mask(table, correct_iou)
            for p, gt in enumerate(table.gt_boxes):
                if gt is not None:
                    rows.append((table.costs[p], table.available[p], correct[p]))

        width = max((r[0].shape[0] for r in rows), default=1)
        n = len(rows)
        costs = np.zeros((n, width, N_SPC))
        available = np.zeros((n, N_SPC))
        correct = np.zeros((n, width), dtype=bool)
        padding = np.ones((n, width), dtype=bool)
        for k, (c, a, ok) in enumerate(rows):
            costs[k, : c.shape[0]] = c
            available[k] = a
            correct[k, : c.shape[0]] = ok
            padding[k, : c.shape[0]] = False

        self.costs = _frozen(costs)
        self.available = _frozen(available)
        self.correct = _frozen(correct)
        self.padding = _frozen(padding)

    def __len__(self) -> int:
        return self.costs.shape[0]

    def recall(self, w: np.ndarray) -> int:
        if len(self) == 0:
            return 0
        w = np.asarray(w, dtype=float).reshape(-1)
        if w.size != N_SPC:
            raise DimensionError(f"w^S needs {N_SPC} entries, got {w.size}")
        scores = np.einsum("pcs,ps,s->pc", self.costs, self.available, w)
        scores = np.where(self.padding, np.inf, scores)
        chosen = np.argmin(scores, axis=1)
        return int(self.correct[np.arange(len(self)), chosen].sum())


class PairLearnData:
    """Pairwise validation relations with w^S folded into fixed unary sums"""

    def __init__(self, examples: Sequence[PairExample], ws: np.ndarray):
        ws = np.asarray(ws, dtype=float).reshape(-1)
        if ws.size != N_SPC:
            raise DimensionError(f"w^S needs {N_SPC} entries, got {ws.size}")
        n = len(examples)
        wl = max((e.left_costs.shape[0] for e in examples), default=1)
        wr = max((e.right_costs.shape[0] for e in examples), default=1)

        base = np.full((n, wl, wr), np.inf)
        q = np.zeros((n, wl, wr, N_PPC))
        left_ok = np.zeros((n, wl), dtype=int)
        right_ok = np.zeros((n, wr), dtype=int)
        for k, e in enumerate(examples):
            c, c2 = e.left_costs.shape[0], e.right_costs.shape[0]
            s_left = e.left_costs @ (e.left_available * ws)
            s_right = e.right_costs @ (e.right_available * ws)
            base[k, :c, :c2] = s_left[:, None] + s_right[None, :]
            q[k, :c, :c2] = e.pair_costs * e.pair_available
            left_ok[k, :c] = e.left_correct
            right_ok[k, :c2] = e.right_correct

        self.base = _frozen(base)
        self.q = _frozen(q)
        self.left_ok = _frozen(left_ok)
        self.right_ok = _frozen(right_ok)

    def __len__(self) -> int:
        return self.base.shape[0]

    @property
    def total(self) -> int:
        return 2 * len(self)

    def recall(self, wq: np.ndarray) -> int:
        if len(self) == 0:
            return 0
        wq = np.asarray(wq, dtype=float).reshape(-1)
        if wq.size != N_PPC:
            raise DimensionError(f"w^Q needs {N_PPC} entries, got {wq.size}")
        scores = self.base + np.einsum("kabq,q->kab", self.q, wq)
        flat = np.argmin(scores.reshape(len(self), -1), axis=1)
        a, b = np.divmod(flat, self.base.shape[2])
        rows = np.arange(len(self))
        return int(self.left_ok[rows, a].sum() + self.right_ok[rows, b].sum())


def recall_objective_s(w: np.ndarray, val: Sequence[CueCostTable], correct_iou: float = 0.5) -> int:
    """Number of GT phrases whose best-scoring candidate has IOU >= correct_iou"""
    return SpcLearnData(val, correct_iou).recall(w)


def recall_objective_q(wq: np.ndarray, ws: np.ndarray, val: Sequence[PairExample]) -> int:
    """Correctly localized boxes (0, 1 or 2 per relation) of the best candidate pairs"""
    return PairLearnData(val, ws).recall(wq)


def restart_inits(dim: int, restarts: int, seed: int) -> List[np.ndarray]:
    """One uniform [0, 1]^dim start per restart, from independent child seeds"""
    children = np.random.SeedSequence(seed).spawn(restarts)
    return [np.random.default_rng(child).random(dim) for child in children]


class DirectSearch:
    """
    Nelder-Mead restarts maximizing an integer recall count

    The best restart wins; ties go to the lower restart index.
    """

    def __init__(self, cfg: Optional[SearchConfig] = None, threads: int = 1, debug: bool = False):
        self.cfg = cfg or SearchConfig()
        self.threads = threads
        self.logger = get_logger(__name__, debug=debug)

    def run(self, recall, dim: int, total: int, seed: int = 0) -> LearnResult:
        inits = restart_inits(dim, self.cfg.restarts, seed)

        def one(x0: np.ndarray) -> Tuple[List[float], int, int]:
            result = nelder_mead(lambda w: -float(recall(w)), x0, cfg=self.cfg)
            return result.x, int(round(-result.fun)), result.evals

        best: Optional[LearnResult] = None
        evals = 0
        for index, (x, count, used) in enumerate(map_ordered(one, inits, self.threads)):
            evals += used
            self.logger.debug(f"🔍 Restart {index}: recall {count}/{total}")
            if best is None or count > best.recall:
                best = LearnResult(weights=x, recall=count, total=total, restart=index)
        assert best is not None
        best.evals = evals
        return best


def learn_weights_s(
    val: Sequence[CueCostTable],
    cfg: Optional[SearchConfig] = None,
    seed: int = 0,
    threads: int = 1,
    correct_iou: float = 0.5,
    method: Optional[str] = None,
) -> LearnResult:
    """
    Learn the 14 SPC weights on validation cue tables

    ``method`` overrides cfg.method: "direct" runs restarted Nelder-Mead on
    recall, "rank_svm" ranks correct candidates above incorrect ones.
    """
    cfg = cfg or SearchConfig()
    data = SpcLearnData(val, correct_iou)
    method = method or cfg.method

    if len(data) == 0:
        logger.warning("⚠️ No validation phrase has a ground-truth box; keeping the first init")
        x0 = restart_inits(N_SPC, 1, seed)[0]
        return LearnResult(weights=x0.tolist(), recall=0, total=0, method=method)

    if method == "rank_svm":
        return _learn_rank_svm(data, cfg, seed)

    with log_duration(logger, "w^S search"):
        result = DirectSearch(cfg, threads).run(data.recall, N_SPC, len(data), seed)
    logger.info(f"✅ w^S learned: recall {result.recall}/{result.total} (restart {result.restart})")
    return result


def _learn_rank_svm(data: SpcLearnData, cfg: SearchConfig, seed: int, neg_ratio: int = 3) -> LearnResult:
    rng = np.random.default_rng(seed)
    features = data.costs * data.available[:, None, :]
    pairs = []
    for k in range(len(data)):
        good = np.flatnonzero(data.correct[k] & ~data.padding[k])
        bad = np.flatnonzero(~data.correct[k] & ~data.padding[k])
        if good.size == 0 or bad.size == 0:
            continue
        better = features[k, good[0]]
        for j in rng.choice(bad, size=min(neg_ratio, bad.size), replace=False):
            pairs.append((better, features[k, int(j)]))
    if not pairs:
        raise TrainingError("No phrase has both correct and incorrect candidates")

    model = RankSvmTrainer(c=cfg.rank_c, epochs=cfg.rank_epochs).fit(pairs, seed=seed)
    # the rank-SVM scores good candidates high; cue weights score them low
    ws = -model.weights
    result = LearnResult(
        weights=ws.tolist(), recall=data.recall(ws), total=len(data), method="rank_svm"
    )
    logger.info(f"✅ w^S learned by rank-SVM: recall {result.recall}/{result.total}")
    return result


def learn_weights_q(
    val: Sequence[PairExample],
    ws: np.ndarray,
    cfg: Optional[SearchConfig] = None,
    seed: int = 0,
    threads: int = 1,
) -> LearnResult:
    """Learn the 3 PPC weights with w^S frozen"""
    cfg = cfg or SearchConfig()
    data = PairLearnData(val, ws)
    if len(data) == 0:
        logger.warning("⚠️ No relation tuples in the validation set; keeping the first init")
        x0 = restart_inits(N_PPC, 1, seed)[0]
        return LearnResult(weights=x0.tolist(), recall=0, total=0)

    with log_duration(logger, "w^Q search"):
        result = DirectSearch(cfg, threads).run(data.recall, N_PPC, data.total, seed)
    logger.info(f"✅ w^Q learned: pair recall {result.recall}/{result.total} (restart {result.restart})")
    return result
