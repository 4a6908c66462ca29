"""
Key sanitization utilities for GROUNDKIT: phrase and pair classifier keys
"""

import re
import unicodedata
from typing import Dict, Iterable, List, Optional, Set

from ..models.cues import PairClassifierKey
from ..models.language import EntityMention, PhraseType, RelationKind, RelationTuple

# words that never name a phrase category
FUNCTION_WORDS = {
    "a", "an", "the", "this", "that", "these", "those", "some", "any", "each", "every",
    "his", "her", "their", "its", "my", "your", "our", "of", "and", "or",
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "several", "many", "few", "other", "another",
}


class KeySanitizer:
    """
    Turns free text into dictionary keys

    Keys are lowercase ASCII words joined by hyphens, accents removed.
    """

    def __init__(self, max_length: int = 50):
        self.max_length = max_length

    def sanitize(self, text: str) -> str:
        if not text:
            return ""

        # Normalize accents
        text = unicodedata.normalize("NFD", str(text))
        text = "".join(c for c in text if unicodedata.category(c) != "Mn")

        text = re.sub(r"[^a-z0-9]+", "-", text.lower())
        text = re.sub(r"-+", "-", text).strip("-")

        if len(text) > self.max_length:
            text = text[: self.max_length].rstrip("-")
        return text

    def content_words(self, tokens: Iterable[str]) -> List[str]:
        words = [self.sanitize(t) for t in tokens]
        return [w for w in words if w and w not in FUNCTION_WORDS]


class PairKeyBuilder:
    """
    Maps relation tuples to pairwise classifier keys

    People phrases collapse to "people"; other phrases are keyed by their
    content words ("blond-hair") or, failing that, their head noun ("hair").
    Verbs map to their canonical form; unknown verbs and prepositions give no key.
    """

    def __init__(
        self,
        verb_forms: Optional[Dict[str, str]] = None,
        prepositions: Optional[Iterable[str]] = None,
        vocabulary: Optional[Iterable[str]] = None,
        sanitizer: Optional[KeySanitizer] = None,
    ):
        self.verb_forms = {k.lower(): v for k, v in (verb_forms or {}).items()}
        self.prepositions: Optional[Set[str]] = (
            {p.lower() for p in prepositions} if prepositions is not None else None
        )
        self.vocabulary: Optional[Set[str]] = set(vocabulary) if vocabulary is not None else None
        self.sanitizer = sanitizer or KeySanitizer()

    def phrase_keys(self, entity: EntityMention) -> List[str]:
        """Candidate phrase keys, most specific first"""
        if entity.phrase_type == PhraseType.PEOPLE:
            return ["people"]
        words = self.sanitizer.content_words(entity.head_tokens)
        if not words:
            return []
        keys = ["-".join(words)]
        if words[-1] != keys[0]:
            keys.append(words[-1])
        return keys

    def relation_key(self, relation: RelationTuple) -> Optional[str]:
        if relation.kind == RelationKind.ATTACHMENT:
            return ""
        word = relation.relation_word
        if relation.kind == RelationKind.VERB:
            if self.verb_forms:
                return self.verb_forms.get(word)
            return word or None
        if self.prepositions is not None and word not in self.prepositions:
            return None
        return word or None

    def key_for(self, relation: RelationTuple) -> Optional[PairClassifierKey]:
        """
        Classifier key of a relation, or None when it has none

        Without a vocabulary the most general phrase keys are used; with one,
        the most specific combination present in the vocabulary wins.
        """
        rel_key = self.relation_key(relation)
        lefts, rights = self.phrase_keys(relation.left), self.phrase_keys(relation.right)
        if rel_key is None or not lefts or not rights:
            return None

        if self.vocabulary is None:
            return PairClassifierKey(
                kind=relation.kind, left_key=lefts[-1], rel_key=rel_key, right_key=rights[-1]
            )
        for left in lefts:
            for right in rights:
                key = PairClassifierKey(
                    kind=relation.kind, left_key=left, rel_key=rel_key, right_key=right
                )
                if key.name in self.vocabulary:
                    return key
        return None


def parse_pair_key(name: str, kind: RelationKind, relation_words: Iterable[str] = ()) -> PairClassifierKey:
    """
    Read a dictionary key such as "people-sitting-bench" or "people-blond-hair"

    Attachment keys split at the first hyphen. Verb and preposition keys
    split around the first token found in ``relation_words``.

    Raises:
        ValueError: when no split is possible
    """
    parts = name.strip().split("-")
    if kind == RelationKind.ATTACHMENT:
        if len(parts) < 2:
            raise ValueError(f"Attachment key '{name}' needs two parts")
        return PairClassifierKey(kind=kind, left_key=parts[0], right_key="-".join(parts[1:]))

    words = set(relation_words)
    for index in range(1, len(parts) - 1):
        if parts[index] in words:
            return PairClassifierKey(
                kind=kind,
                left_key="-".join(parts[:index]),
                rel_key=parts[index],
                right_key="-".join(parts[index + 1 :]),
            )
    raise ValueError(f"No {kind.value} word found in key '{name}'")
