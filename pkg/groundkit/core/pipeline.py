"""
Grounding pipeline for GROUNDKIT: linguistic cues, cue tables, retrieval and joint assignment
"""

from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..config.settings import GroundkitConfig
from ..errors import ConfigurationError, ParseError
from ..language.coref import PronounResolver, expand_tuples_with_pronouns
from ..language.ptb import parse_ptb, tokens_match
from ..language.tuples import TupleExtractor
from ..models.bundle import PHRASE_REGION_CCA, WeightedModelBundle
from ..models.cues import CueCostTable, DetectorScoreTable
from ..models.inference import Assignment, JointProblem
from ..models.language import RelationTuple, SentenceRecord
from ..solvers.factory import SolverFactory
from ..utils.logger import get_logger, log_duration
from ..utils.validator import BundleValidator
from ..utils.workers import map_ordered
from .assets import AssetStore
from .cues import CueAssembler
from .io import ImageCandidates, PhrasePrediction, prediction_map, write_predictions
from .learn import PairExample, correct_mask
from .metrics import RecallCount, RecallReport, recall_at_1, recall_by_cue, upper_bound
from .ppc import PairModelBank, PairSample, pair_cost_tensor, weighted_pair_terms
from .retrieval import retrieve_candidates


class SentenceResult(BaseModel):
    """Grounding of one sentence"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    sentence_id: str
    predictions: List[PhrasePrediction] = Field(default_factory=list)
    relations: int = 0
    objective: Optional[float] = None
    solver: Optional[str] = None


class GroundingResult(BaseModel):
    """Predictions of a whole run plus the cue tables they came from"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    sentences: List[SentenceResult] = Field(default_factory=list)
    tables: List[CueCostTable] = Field(default_factory=list)

    @property
    def predictions(self) -> List[PhrasePrediction]:
        return [p for s in self.sentences for p in s.predictions]

    def get_summary(self) -> Dict[str, object]:
        return {
            "sentences": len(self.sentences),
            "phrases": len(self.predictions),
            "relations": sum(s.relations for s in self.sentences),
        }


class GroundingPipeline:
    """
    Phrase grounding over captioned images

    This class orchestrates the grounding process:
    1. Relation tuples and pronoun links from the sentence parse
    2. Single-phrase cue tables over the image's candidate boxes
    3. Top-M retrieval per phrase
    4. Pairwise costs for the related phrases
    5. Joint assignment
    """

    def __init__(
        self,
        config: GroundkitConfig,
        bundle: Optional[WeightedModelBundle] = None,
        assets: Optional[AssetStore] = None,
        bank: Optional[PairModelBank] = None,
        detector_tables: Optional[Mapping[str, DetectorScoreTable]] = None,
        vectors: Optional[Mapping[str, np.ndarray]] = None,
    ):
        self.config = config
        self.logger = get_logger(__name__, debug=config.debug)
        self.bundle = bundle or WeightedModelBundle()
        self.assets = assets or AssetStore(
            config.cues.assets_dir, validate_counts=config.cues.validate_asset_counts, debug=config.debug
        )
        self.vectors = vectors or {}

        if bank is None and self.bundle.pair_bank_dir and Path(self.bundle.pair_bank_dir).exists():
            bank = PairModelBank.load(
                self.bundle.pair_bank_dir,
                self.assets.pair_key_builder(config.pairs.restrict_to_dictionary),
            )
        self.bank = bank

        self.assembler = CueAssembler(
            self.assets.phrase_cue_config(),
            cca_model=self.bundle.cca.get(PHRASE_REGION_CCA),
            position_svms=self.bundle.position_svms,
            detector_tables=detector_tables,
            prob_floor=config.cues.prob_floor,
            debug=config.debug,
        )
        self.extractor = TupleExtractor(self.assets.pronoun_lexicon, debug=config.debug)
        self.solver = SolverFactory.create_solver(config)
        self.validator = BundleValidator()

        self.logger.info("Grounding pipeline initialized")
        self.logger.info(f"Solver: {self.solver.get_solver_name()}")
        self.logger.info(f"Pair models: {len(self.bank) if self.bank is not None else 0}")

    # Linguistic cues

    def relations(self, record: SentenceRecord) -> List[RelationTuple]:
        """Relation tuples with pronouns rewritten to their antecedents; [] on a bad parse"""
        try:
            tree = parse_ptb(record.parse)
        except ParseError as e:
            self.logger.warning(f"⚠️ Sentence {record.sentence_id}: {e}")
            return []
        if not tokens_match(tree, record.tokens):
            self.logger.warning(f"⚠️ Sentence {record.sentence_id}: parse tokens differ from the sentence")

        extraction = self.extractor.extract(tree, list(record.entities))
        for warning in extraction.warnings:
            self.logger.warning(f"⚠️ Sentence {record.sentence_id}: {warning}")

        resolver = PronounResolver(self.assets.pronoun_lexicon)
        links = resolver.resolve(tree, list(record.entities))
        return expand_tuples_with_pronouns(extraction.tuples, links, resolver.containers)

    # Cue tables

    def cue_table(
        self,
        record: SentenceRecord,
        candidates: ImageCandidates,
        relations: Sequence[RelationTuple] = (),
    ) -> CueCostTable:
        return self.assembler.assemble_table(
            record.image_id,
            record.sentence_id,
            record.entities,
            candidates.boxes,
            candidates.image_size,
            relations,
            self.vectors,
        )

    # Inference

    def ground_table(
        self, table: CueCostTable, relations: Sequence[RelationTuple] = ()
    ) -> Tuple[Optional[Assignment], List[PhrasePrediction]]:
        """Retrieve, build the joint problem and solve it for one cue table"""
        if not table.phrase_ids:
            return None, []
        if self.config.debug:
            for problem_text in self.validator.validate_cue_table(table):
                self.logger.warning(f"⚠️ Table {table.sentence_id}: {problem_text}")

        cfg = self.config.retrieval
        scores = table.scores(self.bundle.ws)
        retrieved = [
            retrieve_candidates(table.candidates, scores[p], cfg.m, cfg.nms_iou)
            for p in range(len(table.phrase_ids))
        ]
        boxes = [[c.box for c in kept] for kept in retrieved]
        unary = [np.array([c.score for c in kept]) for kept in retrieved]

        pair_terms = []
        if self.bank is not None and relations and np.any(self.bundle.wq != 0):
            index = {pid: i for i, pid in enumerate(table.phrase_ids)}
            pair_terms = weighted_pair_terms(relations, index, self.bank, boxes, unary, self.bundle.wq)

        problem = JointProblem(
            phrase_ids=list(table.phrase_ids), unary=unary, pair_terms=pair_terms, candidates=boxes
        )
        assignment = self.solver.solve(problem)
        if self.config.debug:
            for problem_text in self.validator.validate_assignment(problem, assignment, tol=1e-6):
                self.logger.warning(f"⚠️ Assignment {table.sentence_id}: {problem_text}")

        predictions = [
            PhrasePrediction(
                image_id=table.image_id,
                sentence_id=table.sentence_id,
                phrase_id=pid,
                phrase_type=table.phrase_types[p],
                box=boxes[p][assignment.chosen[p]],
                candidate=retrieved[p][assignment.chosen[p]].index,
            )
            for p, pid in enumerate(table.phrase_ids)
        ]
        return assignment, predictions

    def ground_sentence(
        self, record: SentenceRecord, candidates: Optional[ImageCandidates]
    ) -> Tuple[SentenceResult, Optional[CueCostTable]]:
        if candidates is None or not candidates.boxes:
            self.logger.warning(f"⚠️ No candidates for image {record.image_id}")
            return SentenceResult(sentence_id=record.sentence_id), None
        relations = self.relations(record)
        table = self.cue_table(record, candidates, relations)
        assignment, predictions = self.ground_table(table, relations)
        return self._result(record.sentence_id, predictions, relations, assignment), table

    @staticmethod
    def _result(sentence_id, predictions, relations, assignment) -> SentenceResult:
        return SentenceResult(
            sentence_id=sentence_id,
            predictions=predictions,
            relations=len(relations),
            objective=assignment.objective if assignment is not None else None,
            solver=assignment.solver if assignment is not None else None,
        )

    def run(
        self,
        sentences: Sequence[SentenceRecord],
        candidates: Mapping[str, ImageCandidates],
        threads: Optional[int] = None,
    ) -> GroundingResult:
        """Ground every sentence from raw candidates; results keep input order"""
        threads = threads or self.config.runtime.threads
        self.logger.info(f"🔍 Grounding {len(sentences)} sentences")
        with log_duration(self.logger, "Grounding"):
            outputs = map_ordered(
                lambda record: self.ground_sentence(record, candidates.get(record.image_id)),
                sentences,
                threads,
            )
        result = GroundingResult()
        for sentence, table in outputs:
            result.sentences.append(sentence)
            if table is not None:
                result.tables.append(table)
        self.logger.info(f"✅ Grounded {len(result.predictions)} phrases")
        return result

    def run_tables(
        self,
        tables: Sequence[CueCostTable],
        sentences: Optional[Sequence[SentenceRecord]] = None,
        threads: Optional[int] = None,
    ) -> GroundingResult:
        """Ground precomputed cue tables; sentences, when given, supply relations"""
        threads = threads or self.config.runtime.threads
        by_id = {s.sentence_id: s for s in sentences or ()}

        def one(table: CueCostTable) -> SentenceResult:
            record = by_id.get(table.sentence_id)
            relations = self.relations(record) if record is not None else []
            assignment, predictions = self.ground_table(table, relations)
            return self._result(table.sentence_id, predictions, relations, assignment)

        result = GroundingResult(tables=list(tables))
        with log_duration(self.logger, "Grounding"):
            result.sentences.extend(map_ordered(one, tables, threads))
        self.logger.info(f"✅ Grounded {len(result.predictions)} phrases from {len(tables)} cue tables")
        return result

    # Training data for the pairwise stage

    def _related_tables(self, tables: Sequence[CueCostTable], sentences: Sequence[SentenceRecord]):
        by_id = {s.sentence_id: s for s in sentences}
        for table in tables:
            record = by_id.get(table.sentence_id)
            if record is None:
                continue
            index = {pid: i for i, pid in enumerate(table.phrase_ids)}
            for relation in self.relations(record):
                i, j = index.get(relation.left.phrase_id), index.get(relation.right.phrase_id)
                if i is not None and j is not None and i != j:
                    yield table, relation, i, j

    def pair_samples(
        self, tables: Sequence[CueCostTable], sentences: Sequence[SentenceRecord]
    ) -> List[PairSample]:
        """Relations of annotated sentences with their candidates and SPC scores"""
        samples = []
        for table, relation, i, j in self._related_tables(tables, sentences):
            scores = table.scores(self.bundle.ws)
            samples.append(
                PairSample(
                    relation=relation,
                    candidates=list(table.candidates),
                    left_scores=scores[i],
                    right_scores=scores[j],
                )
            )
        self.logger.info(f"🔍 {len(samples)} relation samples for pair training")
        return samples

    def pair_examples(
        self, tables: Sequence[CueCostTable], sentences: Sequence[SentenceRecord]
    ) -> List[PairExample]:
        """Validation examples for learning the pairwise weights (needs a pair bank)"""
        if self.bank is None:
            raise ConfigurationError("Pairwise weight learning needs a trained pair bank")
        correct_iou = self.config.retrieval.correct_iou
        examples = []
        for table, relation, i, j in self._related_tables(tables, sentences):
            if table.gt_boxes[i] is None or table.gt_boxes[j] is None:
                continue
            scores = table.scores(self.bundle.ws)
            costs, available = pair_cost_tensor(
                self.bank, relation, table.candidates, table.candidates, scores[i], scores[j]
            )
            correct = correct_mask(table, correct_iou)
            examples.append(
                PairExample(
                    left_costs=table.costs[i],
                    left_available=table.available[i],
                    right_costs=table.costs[j],
                    right_available=table.available[j],
                    pair_costs=costs,
                    pair_available=available,
                    left_correct=correct[i],
                    right_correct=correct[j],
                )
            )
        self.logger.info(f"🔍 {len(examples)} pairwise validation examples")
        return examples

    # Evaluation

    def evaluate(
        self, result: GroundingResult, gt: Sequence[SentenceRecord]
    ) -> Tuple[RecallReport, Dict[str, RecallCount]]:
        correct_iou = self.config.retrieval.correct_iou
        predictions = prediction_map(result.predictions)
        report = recall_at_1(predictions, gt, correct_iou)
        by_cue = recall_by_cue(predictions, gt, result.tables, correct_iou)
        self.logger.info(f"📊 Recall@1: {report.recall}")
        return report, by_cue


def retrieval_upper_bound(
    tables: Iterable[CueCostTable],
    gt: Sequence[SentenceRecord],
    ws: np.ndarray,
    m: int = 30,
    nms_iou: float = 0.8,
    correct_iou: float = 0.5,
) -> RecallReport:
    """Upper bound over the candidates that survive retrieval under ws"""
    kept: Dict[Tuple[str, str], List] = {}
    for table in tables:
        scores = table.scores(ws)
        for p, pid in enumerate(table.phrase_ids):
            kept[(table.sentence_id, pid)] = [
                c.box for c in retrieve_candidates(table.candidates, scores[p], m, nms_iou)
            ]
    return upper_bound(kept, gt, correct_iou)


def save_predictions(path: Union[str, Path], result: Union[GroundingResult, Iterable[PhrasePrediction]]) -> int:
    """Write predictions as JSON Lines"""
    predictions = result.predictions if isinstance(result, GroundingResult) else result
    return write_predictions(path, predictions)
