"""
JSON Lines readers and writers for GROUNDKIT data files
"""

import json
import struct
from collections import OrderedDict
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ValidationError, field_validator

from ..errors import DataFormatError, DimensionError
from ..models.cues import N_SPC, SPC_SLOTS, CueCostTable, DetectorScoreTable
from ..models.geometry import BoundingBox, ImageSize
from ..models.language import PhraseType, SentenceRecord
from ..models.vrd import RelationshipCandidate, VrdDetections, VrdGroundTruth, VrdVocabulary
from ..utils.logger import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]

VECTOR_MAGIC = b"GKV1"
_HEADER = struct.Struct("<4sII")


class ImageCandidates(BaseModel):
    """Candidate boxes of one image"""

    image_id: str
    width: float
    height: float
    boxes: List[BoundingBox]

    @field_validator("boxes", mode="before")
    @classmethod
    def parse_boxes(cls, v):
        return [BoundingBox.from_list(b) if isinstance(b, (list, tuple)) else b for b in v]

    @property
    def image_size(self) -> ImageSize:
        return ImageSize(width=self.width, height=self.height)

    def to_record(self) -> Dict[str, Any]:
        return {
            "image_id": self.image_id,
            "width": self.width,
            "height": self.height,
            "boxes": [b.to_list() for b in self.boxes],
        }


class PhrasePrediction(BaseModel):
    """Chosen box of one phrase"""

    image_id: str
    sentence_id: str
    phrase_id: str
    phrase_type: PhraseType = PhraseType.OTHER
    box: Optional[BoundingBox] = None
    candidate: Optional[int] = None

    @field_validator("box", mode="before")
    @classmethod
    def parse_box(cls, v):
        return BoundingBox.from_list(v) if isinstance(v, (list, tuple)) else v

    @property
    def key(self) -> Tuple[str, str]:
        return (self.sentence_id, self.phrase_id)

    def to_record(self) -> Dict[str, Any]:
        return {
            "image_id": self.image_id,
            "sentence_id": self.sentence_id,
            "phrase_id": self.phrase_id,
            "phrase_type": self.phrase_type.value,
            "box": self.box.to_list() if self.box is not None else None,
            "candidate": self.candidate,
        }


# Generic JSONL


def read_jsonl(path: PathLike) -> Iterator[Tuple[int, Dict[str, Any]]]:
    """Yield (line number, object) for every non-blank line"""
    path = Path(path)
    if not path.exists():
        raise DataFormatError("File not found", path=str(path))
    with open(path, "r", encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataFormatError(f"Invalid JSON: {e.msg}", path=str(path), line=number) from e
            if not isinstance(record, dict):
                raise DataFormatError("Each line must hold a JSON object", path=str(path), line=number)
            yield number, record


def write_jsonl(path: PathLike, records: Iterable[Mapping[str, Any]]) -> int:
    """Write records one per line with sorted keys; returns the record count"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, sort_keys=True, ensure_ascii=False))
            f.write("\n")
            count += 1
    return count


def _parse(model, record: Dict[str, Any], path: PathLike, line: int):
    try:
        return model.model_validate(record)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise DataFormatError(f"{where}: {first['msg']}", path=str(path), line=line) from e


def _require(record: Dict[str, Any], fields: Iterable[str], path: PathLike, line: int) -> None:
    missing = [f for f in fields if f not in record]
    if missing:
        raise DataFormatError(f"Missing field(s): {', '.join(missing)}", path=str(path), line=line)


# Sentences and candidates


def read_sentences(path: PathLike) -> List[SentenceRecord]:
    return [_parse(SentenceRecord, r, path, n) for n, r in read_jsonl(path)]


def write_sentences(path: PathLike, sentences: Iterable[SentenceRecord]) -> int:
    return write_jsonl(path, (s.model_dump(mode="json") for s in sentences))


def read_candidates(path: PathLike) -> Dict[str, ImageCandidates]:
    """Candidate boxes keyed by image id"""
    result: Dict[str, ImageCandidates] = {}
    for n, record in read_jsonl(path):
        item = _parse(ImageCandidates, record, path, n)
        if item.image_id in result:
            raise DataFormatError(f"Duplicate image {item.image_id}", path=str(path), line=n)
        result[item.image_id] = item
    return result


def write_candidates(path: PathLike, candidates: Iterable[ImageCandidates]) -> int:
    return write_jsonl(path, (c.to_record() for c in candidates))


# Detector scores


def read_detector_scores(path: PathLike) -> Dict[str, DetectorScoreTable]:
    """
    Softmax outputs keyed by detector slot

    Each line is {"detector", "image_id", "box", "category", "prob"} where
    detector is one of object_det, adjective, subject_verb, verb_object.
    """
    tables: Dict[str, DetectorScoreTable] = {}
    for n, record in read_jsonl(path):
        _require(record, ("detector", "image_id", "box", "category", "prob"), path, n)
        slot = record["detector"]
        if slot not in SPC_SLOTS:
            raise DataFormatError(f"Unknown detector slot '{slot}'", path=str(path), line=n)
        table = tables.setdefault(slot, DetectorScoreTable(slot))
        try:
            table.add(record["image_id"], int(record["box"]), record["category"], float(record["prob"]))
        except ValueError as e:
            raise DataFormatError(str(e), path=str(path), line=n) from e
    return tables


def write_detector_scores(path: PathLike, tables: Mapping[str, DetectorScoreTable]) -> int:
    def records():
        for slot in sorted(tables):
            for record in tables[slot].records():
                yield {"detector": slot, **record}

    return write_jsonl(path, records())


# Dense vectors


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".f32")


def read_vectors(path: PathLike) -> Dict[str, np.ndarray]:
    """
    Dense vectors keyed by name

    Lines are either {"key", "vec": [...]} or {"key", "row": i}; row
    references point into a little-endian float32 sidecar next to the file
    (same stem, ".f32" suffix) whose header is magic, dim, count.
    """
    path = Path(path)
    sidecar: Optional[np.ndarray] = None
    vectors: Dict[str, np.ndarray] = OrderedDict()
    dim: Optional[int] = None
    for n, record in read_jsonl(path):
        _require(record, ("key",), path, n)
        if "vec" in record:
            vec = np.asarray(record["vec"], dtype=float)
        elif "row" in record:
            if sidecar is None:
                sidecar = _read_sidecar(_sidecar(path))
            row = int(record["row"])
            if not 0 <= row < sidecar.shape[0]:
                raise DataFormatError(f"Row {row} outside the sidecar", path=str(path), line=n)
            vec = sidecar[row].astype(float)
        else:
            raise DataFormatError("Vector line needs 'vec' or 'row'", path=str(path), line=n)
        if vec.ndim != 1 or not np.all(np.isfinite(vec)):
            raise DataFormatError("Vector must be a finite 1-d list", path=str(path), line=n)
        if dim is not None and vec.size != dim:
            raise DimensionError(f"{path}:{n}: vector of length {vec.size}, expected {dim}")
        dim = vec.size
        vectors[record["key"]] = vec
    return dict(vectors)


def _read_sidecar(path: Path) -> np.ndarray:
    if not path.exists():
        raise DataFormatError("Vector sidecar not found", path=str(path))
    data = path.read_bytes()
    if len(data) < _HEADER.size:
        raise DataFormatError("Truncated sidecar header", path=str(path))
    magic, dim, count = _HEADER.unpack_from(data)
    if magic != VECTOR_MAGIC:
        raise DataFormatError(f"Bad sidecar magic {magic!r}", path=str(path))
    body = np.frombuffer(data, dtype="<f4", offset=_HEADER.size)
    if body.size != dim * count:
        raise DataFormatError(f"Sidecar holds {body.size} floats, header says {dim * count}", path=str(path))
    return body.reshape(count, dim)


def write_vectors(path: PathLike, vectors: Mapping[str, np.ndarray], sidecar: bool = False) -> int:
    """Write a vector table, inline or with a float32 sidecar"""
    path = Path(path)
    keys = sorted(vectors)
    if not sidecar:
        return write_jsonl(path, ({"key": k, "vec": np.asarray(vectors[k], dtype=float).tolist()} for k in keys))

    matrix = np.array([np.asarray(vectors[k], dtype=float) for k in keys]) if keys else np.zeros((0, 0))
    dim = matrix.shape[1] if matrix.ndim == 2 else 0
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(_sidecar(path), "wb") as f:
        f.write(_HEADER.pack(VECTOR_MAGIC, dim, len(keys)))
        f.write(matrix.astype("<f4").tobytes())
    return write_jsonl(path, ({"key": k, "row": i} for i, k in enumerate(keys)))


# Cue tables


def read_cue_tables(path: PathLike) -> List[CueCostTable]:
    """Group per-phrase cue records back into per-sentence tables, file order"""
    groups: Dict[Tuple[str, str], List[Tuple[int, Dict[str, Any]]]] = OrderedDict()
    for n, record in read_jsonl(path):
        _require(
            record,
            ("image_id", "sentence_id", "phrase_id", "phrase_type", "candidates", "costs", "available"),
            path,
            n,
        )
        groups.setdefault((record["image_id"], record["sentence_id"]), []).append((n, record))

    tables = []
    for (image_id, sentence_id), rows in groups.items():
        first_line, first = rows[0]
        candidates = first["candidates"]
        for n, record in rows[1:]:
            if record["candidates"] != candidates:
                raise DataFormatError(
                    f"Sentence {sentence_id} rows disagree on candidates", path=str(path), line=n
                )
        try:
            costs = np.array([r["costs"] for _, r in rows], dtype=float)
            if costs.size == 0:
                costs = costs.reshape(len(rows), len(candidates), N_SPC)
            table = CueCostTable(
                image_id=image_id,
                sentence_id=sentence_id,
                phrase_ids=[r["phrase_id"] for _, r in rows],
                phrase_types=[PhraseType(r["phrase_type"]) for _, r in rows],
                candidates=[BoundingBox.from_list(b) for b in candidates],
                costs=costs,
                available=np.array([r["available"] for _, r in rows], dtype=bool),
                gt_boxes=[
                    BoundingBox.from_list(r["gt_box"]) if r.get("gt_box") else None for _, r in rows
                ],
            )
        except (ValueError, ValidationError) as e:
            raise DataFormatError(f"Bad cue table {sentence_id}: {e}", path=str(path), line=first_line) from e
        if not np.all(np.isfinite(table.costs)) or np.any(table.costs < 0):
            raise DataFormatError(f"Cue costs of {sentence_id} must be finite and non-negative", path=str(path), line=first_line)
        tables.append(table)
    return tables


def write_cue_tables(path: PathLike, tables: Iterable[CueCostTable]) -> int:
    def records():
        for table in tables:
            for i in range(len(table.phrase_ids)):
                yield table.to_record(i)

    return write_jsonl(path, records())


# Pairwise validation examples


def read_pair_examples(path: PathLike):
    from .learn import PairExample

    fields = (
        "left_costs", "left_available", "right_costs", "right_available",
        "pair_costs", "pair_available", "left_correct", "right_correct",
    )
    examples = []
    for n, record in read_jsonl(path):
        _require(record, fields, path, n)
        try:
            examples.append(
                PairExample(
                    **{
                        f: np.asarray(record[f], dtype=float) if "costs" in f else record[f]
                        for f in fields
                    }
                )
            )
        except (ValueError, ValidationError, DimensionError) as e:
            raise DataFormatError(f"Bad pair example: {e}", path=str(path), line=n) from e
    return examples


def write_pair_examples(path: PathLike, examples) -> int:
    return write_jsonl(
        path,
        (
            {
                "left_costs": e.left_costs.tolist(),
                "left_available": e.left_available.tolist(),
                "right_costs": e.right_costs.tolist(),
                "right_available": e.right_available.tolist(),
                "pair_costs": e.pair_costs.tolist(),
                "pair_available": e.pair_available.tolist(),
                "left_correct": e.left_correct.tolist(),
                "right_correct": e.right_correct.tolist(),
            }
            for e in examples
        ),
    )


# Predictions


def read_predictions(path: PathLike) -> List[PhrasePrediction]:
    return [_parse(PhrasePrediction, r, path, n) for n, r in read_jsonl(path)]


def write_predictions(path: PathLike, predictions: Iterable[PhrasePrediction]) -> int:
    return write_jsonl(path, (p.to_record() for p in predictions))


def prediction_map(predictions: Iterable[PhrasePrediction]) -> Dict[Tuple[str, str], Optional[BoundingBox]]:
    return {p.key: p.box for p in predictions}


# Relationship detection


def read_vocabulary(path: PathLike) -> VrdVocabulary:
    path = Path(path)
    if not path.exists():
        raise DataFormatError("Vocabulary not found", path=str(path))
    try:
        with open(path, "r", encoding="utf-8") as f:
            return VrdVocabulary.model_validate(json.load(f))
    except json.JSONDecodeError as e:
        raise DataFormatError(f"Invalid JSON: {e.msg}", path=str(path)) from e
    except ValidationError as e:
        raise DataFormatError(str(e.errors()[0]["msg"]), path=str(path)) from e


def write_vocabulary(path: PathLike, vocab: VrdVocabulary) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(vocab.model_dump(mode="json"), f, indent=2, sort_keys=True)


def read_vrd_detections(path: PathLike) -> List[VrdDetections]:
    return [_parse(VrdDetections, r, path, n) for n, r in read_jsonl(path)]


def write_vrd_detections(path: PathLike, detections: Iterable[VrdDetections]) -> int:
    return write_jsonl(path, (d.model_dump(mode="json", exclude_none=True) for d in detections))


def read_vrd_ground_truth(path: PathLike) -> List[VrdGroundTruth]:
    return [_parse(VrdGroundTruth, r, path, n) for n, r in read_jsonl(path)]


def write_vrd_ground_truth(path: PathLike, gts: Iterable[VrdGroundTruth]) -> int:
    return write_jsonl(path, (g.model_dump(mode="json") for g in gts))


def read_relationship_candidates(path: PathLike) -> Dict[str, List[RelationshipCandidate]]:
    """Scored relationship hypotheses grouped by image, file order kept"""
    result: Dict[str, List[RelationshipCandidate]] = OrderedDict()
    for n, record in read_jsonl(path):
        _require(record, ("image_id",), path, n)
        image_id = record.pop("image_id")
        result.setdefault(image_id, []).append(_parse(RelationshipCandidate, record, path, n))
    return dict(result)


def write_relationship_candidates(
    path: PathLike, candidates: Mapping[str, Iterable[RelationshipCandidate]]
) -> int:
    def records():
        for image_id, items in candidates.items():
            for c in items:
                yield {"image_id": image_id, **c.model_dump(mode="json")}

    return write_jsonl(path, records())
