"""
Dictionary assets: detector routing tables, pair classifier keys and lexicons
"""

from collections import defaultdict
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple, Union

from ..errors import AssetError
from ..language.align import DEFAULT_ASSETS_DIR, PronounLexicon
from ..models.cues import PairClassifierKey, PhraseCueConfig
from ..models.language import PHRASE_TYPES, PhraseType, RelationKind
from ..utils.logger import get_logger
from ..utils.sanitizer import PairKeyBuilder, parse_pair_key

# category counts each packaged dictionary must have
EXPECTED_COUNTS: Dict[str, int] = {
    "adjectives": 83,
    "verbs": 58,
    "subject_verb": 191,
    "verb_object": 225,
    "verb_pairs": 260,
    "preposition_pairs": 216,
    "attachment_pairs": 207,
    "prepositions": 8,
}


def read_tsv(path: Path, columns: int) -> List[List[str]]:
    """Non-comment rows of a TSV file"""
    if not path.exists():
        raise AssetError(f"Dictionary not found: {path}")
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split("\t")]
            if len(parts) != columns:
                raise AssetError(f"{path}:{line_no}: expected {columns} tab-separated columns")
            rows.append(parts)
    return rows


def _grouped(rows: Iterable[List[str]]) -> Dict[str, List[str]]:
    grouped: Dict[str, List[str]] = defaultdict(list)
    for term, category in rows:
        if category not in grouped[term.lower()]:
            grouped[term.lower()].append(category)
    return dict(grouped)


def build_verb_categories(
    counts: Mapping[Tuple[Union[PhraseType, str], str], int], threshold: int = 30
) -> Dict[str, List[str]]:
    """
    Subject-verb or verb-object categories from raw (phrase type, verb) counts

    Every verb gets a catch-all category; a verb also gets a "<type>-<verb>"
    category for each phrase type it occurs with at least ``threshold`` times.
    """
    categories: Dict[str, List[str]] = {}
    for (phrase_type, verb), count in sorted(
        counts.items(), key=lambda item: (str(item[0][1]), str(item[0][0]))
    ):
        type_name = phrase_type.value if isinstance(phrase_type, PhraseType) else str(phrase_type)
        entry = categories.setdefault(verb, [verb])
        if count >= threshold:
            entry.insert(len(entry) - 1, f"{type_name}-{verb}")
    return categories


class AssetStore:
    """
    Loads and validates the packaged (or user supplied) dictionary files
    """

    def __init__(
        self,
        assets_dir: Optional[Union[str, Path]] = None,
        validate_counts: bool = True,
        debug: bool = False,
    ):
        self.assets_dir = Path(assets_dir) if assets_dir else DEFAULT_ASSETS_DIR
        self.logger = get_logger(__name__, debug=debug)

        self.adjective_dict = _grouped(read_tsv(self.assets_dir / "adjectives.tsv", 2))
        self.object_dict = _grouped(read_tsv(self.assets_dir / "objects.tsv", 2))
        self.subject_verb_dict = _grouped(read_tsv(self.assets_dir / "subject_verb.tsv", 2))
        self.verb_object_dict = _grouped(read_tsv(self.assets_dir / "verb_object.tsv", 2))
        self.verb_forms = {
            surface.lower(): verb for surface, verb in read_tsv(self.assets_dir / "verbs.tsv", 2)
        }
        self.prepositions = [row[0].lower() for row in read_tsv(self.assets_dir / "prepositions.tsv", 1)]
        self.pair_keys: Dict[RelationKind, List[str]] = {
            RelationKind.VERB: [r[0] for r in read_tsv(self.assets_dir / "verb_pairs.tsv", 1)],
            RelationKind.PREPOSITION: [
                r[0] for r in read_tsv(self.assets_dir / "preposition_pairs.tsv", 1)
            ],
            RelationKind.ATTACHMENT: [
                r[0] for r in read_tsv(self.assets_dir / "attachment_pairs.tsv", 1)
            ],
        }
        self.pronoun_lexicon = PronounLexicon.from_tsv(self.assets_dir / "pronouns.tsv")

        if validate_counts:
            problems = self.validate_counts()
            if problems:
                raise AssetError("Dictionary sizes differ from the expected ones: " + "; ".join(problems))
        self.logger.debug(f"✅ Dictionaries loaded from {self.assets_dir}")

    def counts(self) -> Dict[str, int]:
        """Number of distinct categories (or keys) per dictionary"""

        def categories(table: Dict[str, List[str]]) -> int:
            return len({c for cats in table.values() for c in cats})

        return {
            "adjectives": categories(self.adjective_dict),
            "verbs": len(set(self.verb_forms.values())),
            "subject_verb": categories(self.subject_verb_dict),
            "verb_object": categories(self.verb_object_dict),
            "verb_pairs": len(set(self.pair_keys[RelationKind.VERB])),
            "preposition_pairs": len(set(self.pair_keys[RelationKind.PREPOSITION])),
            "attachment_pairs": len(set(self.pair_keys[RelationKind.ATTACHMENT])),
            "prepositions": len(set(self.prepositions)),
        }

    def validate_counts(self) -> List[str]:
        actual = self.counts()
        return [
            f"{name}: {actual[name]} != {expected}"
            for name, expected in EXPECTED_COUNTS.items()
            if actual[name] != expected
        ]

    @property
    def verbs(self) -> Set[str]:
        return set(self.verb_forms.values())

    def phrase_cue_config(self) -> PhraseCueConfig:
        return PhraseCueConfig(
            adjective_dict=self.adjective_dict,
            object_dict=self.object_dict,
            subject_verb_dict=self.subject_verb_dict,
            verb_object_dict=self.verb_object_dict,
            verb_forms=self.verb_forms,
            phrase_type_size_slots=list(PHRASE_TYPES),
        )

    def dictionary_keys(self) -> List[PairClassifierKey]:
        """Every pair classifier key listed in the pair dictionaries"""
        keys = []
        for kind, names in self.pair_keys.items():
            words: Iterable[str] = ()
            if kind == RelationKind.VERB:
                words = self.verbs
            elif kind == RelationKind.PREPOSITION:
                words = set(self.prepositions)
            for name in names:
                try:
                    keys.append(parse_pair_key(name, kind, words))
                except ValueError as e:
                    self.logger.warning(f"⚠️ Skipping pair key: {e}")
        return keys

    def pair_key_builder(self, restrict_to_dictionary: bool = False) -> PairKeyBuilder:
        vocabulary = None
        if restrict_to_dictionary:
            vocabulary = {name for names in self.pair_keys.values() for name in names}
        return PairKeyBuilder(
            verb_forms=self.verb_forms,
            prepositions=self.prepositions,
            vocabulary=vocabulary,
        )
