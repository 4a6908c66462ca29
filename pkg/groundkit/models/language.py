"""
Linguistic models for GROUNDKIT: parse trees, entity mentions and relations
"""

from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Tuple

from pydantic import BaseModel, Field, field_serializer, field_validator, model_validator

from .geometry import BoundingBox


class PhraseType(Enum):
    """Closed set of broad phrase types"""

    PEOPLE = "people"
    CLOTHING = "clothing"
    BODYPARTS = "bodyparts"
    ANIMALS = "animals"
    VEHICLES = "vehicles"
    INSTRUMENTS = "instruments"
    SCENE = "scene"
    OTHER = "other"


PHRASE_TYPES: List[PhraseType] = list(PhraseType)


class RelationKind(Enum):
    """Kinds of phrase-pair relations, in pairwise cue slot order"""

    VERB = "verb"
    PREPOSITION = "preposition"
    ATTACHMENT = "attachment"


class PronounClass(Enum):
    """Pronoun classes handled by coreference"""

    SUBJECT = "subject"
    OBJECT = "object"
    REFLEXIVE = "reflexive"
    RECIPROCAL = "reciprocal"
    RELATIVE = "relative"
    INDEFINITE = "indefinite"


class ParseTree(BaseModel):
    """Constituency tree node; leaves carry exactly one token"""

    label: str = Field(..., description="Constituent or part-of-speech tag")
    children: List["ParseTree"] = Field(default_factory=list, description="Ordered children")
    token: Optional[str] = Field(default=None, description="Token for leaf nodes")
    start: int = Field(..., description="First token index")
    end: int = Field(..., description="One past the last token index")

    @property
    def is_leaf(self) -> bool:
        return self.token is not None

    @property
    def token_span(self) -> Tuple[int, int]:
        return (self.start, self.end)

    def preorder(self) -> Iterator["ParseTree"]:
        """Yield nodes in pre-order (node before children, left to right)"""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def leaves(self) -> List["ParseTree"]:
        return [node for node in self.preorder() if node.is_leaf]

    def tokens(self) -> List[str]:
        return [leaf.token for leaf in self.leaves()]

    def parent_map(self) -> Dict[int, "ParseTree"]:
        """Map id(node) to its parent node"""
        parents: Dict[int, ParseTree] = {}
        for node in self.preorder():
            for child in node.children:
                parents[id(child)] = node
        return parents

    def to_bracketed(self) -> str:
        if self.is_leaf:
            return f"({self.label} {self.token})"
        inner = " ".join(child.to_bracketed() for child in self.children)
        return f"({self.label} {inner})"


class EntityMention(BaseModel):
    """Noun-phrase entity mention (or a pronoun mention when pronoun_class is set)"""

    phrase_id: str = Field(..., description="Phrase identifier")
    token_span: Tuple[int, int] = Field(..., description="[start, end) over sentence tokens")
    phrase_type: PhraseType = Field(default=PhraseType.OTHER, description="Broad phrase type")
    head_tokens: List[str] = Field(default_factory=list, description="Words of the phrase")
    gt_boxes: List[BoundingBox] = Field(default_factory=list, description="Annotated boxes")
    pronoun_class: Optional[PronounClass] = Field(default=None, description="Set for pronouns")

    @field_validator("gt_boxes", mode="before")
    @classmethod
    def parse_boxes(cls, v):
        return [BoundingBox.from_list(b) if isinstance(b, (list, tuple)) else b for b in v or []]

    @field_validator("token_span")
    @classmethod
    def validate_span(cls, v):
        if v[0] < 0 or v[1] <= v[0]:
            raise ValueError(f"Entity span must be non-empty, got {list(v)}")
        return v

    @field_serializer("gt_boxes")
    def serialize_boxes(self, boxes: List[BoundingBox]):
        return [b.to_list() for b in boxes]

    @property
    def start(self) -> int:
        return self.token_span[0]

    @property
    def end(self) -> int:
        return self.token_span[1]

    @property
    def is_pronoun(self) -> bool:
        return self.pronoun_class is not None

    @property
    def text(self) -> str:
        return " ".join(self.head_tokens)


class RelationTuple(BaseModel):
    """(left entity, relation words, right entity) with its relation kind"""

    left: EntityMention = Field(..., description="Left entity")
    rel_words: List[str] = Field(default_factory=list, description="Lowercased relation words")
    right: EntityMention = Field(..., description="Right entity")
    kind: RelationKind = Field(..., description="Relation kind")
    metadata: Dict[str, Any] = Field(default_factory=dict, description="Extraction notes")

    @model_validator(mode="after")
    def validate_attachment(self):
        if self.kind == RelationKind.ATTACHMENT and not self.left.is_pronoun:
            if self.left.phrase_type != PhraseType.PEOPLE or self.right.phrase_type not in (
                PhraseType.CLOTHING,
                PhraseType.BODYPARTS,
            ):
                raise ValueError("Attachment relations link people to clothing or body parts")
        return self

    @property
    def signature(self) -> Tuple[str, str, Tuple[str, ...], str]:
        """Identity used for de-duplication"""
        return (self.left.phrase_id, self.kind.value, tuple(self.rel_words), self.right.phrase_id)

    @property
    def relation_word(self) -> str:
        """Head word used for classifier keys (empty for attachments)"""
        if self.kind == RelationKind.ATTACHMENT or not self.rel_words:
            return ""
        return self.rel_words[-1]


class PronounLink(BaseModel):
    """A pronoun mention and the entity it refers to"""

    pronoun: EntityMention = Field(..., description="Pronoun mention")
    antecedent: Optional[EntityMention] = Field(default=None, description="Resolved entity")
    pronoun_class: PronounClass = Field(..., description="Pronoun class")

    @model_validator(mode="after")
    def validate_indefinite(self):
        if self.pronoun_class == PronounClass.INDEFINITE and self.antecedent is not None:
            raise ValueError("Indefinite pronouns have no antecedent")
        return self

    @property
    def pronoun_span(self) -> Tuple[int, int]:
        return self.pronoun.token_span


class TupleExtraction(BaseModel):
    """Relations extracted from one sentence and the problems met on the way"""

    tuples: List[RelationTuple] = Field(default_factory=list)
    links: List[PronounLink] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)

    def get_summary(self) -> Dict[str, Any]:
        counts: Dict[str, int] = {kind.value: 0 for kind in RelationKind}
        for relation in self.tuples:
            counts[relation.kind.value] += 1
        return {
            "tuple_count": len(self.tuples),
            "by_kind": counts,
            "pronoun_links": len(self.links),
            "resolved_links": sum(1 for link in self.links if link.antecedent is not None),
            "warnings": len(self.warnings),
        }


class SentenceRecord(BaseModel):
    """Caption with its parse and annotated entities"""

    image_id: str = Field(..., description="Image identifier")
    sentence_id: str = Field(..., description="Sentence identifier")
    tokens: List[str] = Field(..., description="Whitespace tokens")
    parse: str = Field(..., description="Bracketed constituency parse")
    entities: List[EntityMention] = Field(default_factory=list, description="Entity mentions")

    @model_validator(mode="after")
    def validate_spans(self):
        for entity in self.entities:
            if entity.end > len(self.tokens):
                raise ValueError(
                    f"Entity {entity.phrase_id} span {list(entity.token_span)} exceeds "
                    f"{len(self.tokens)} tokens"
                )
        return self

    def entity(self, phrase_id: str) -> Optional[EntityMention]:
        return next((e for e in self.entities if e.phrase_id == phrase_id), None)


ParseTree.model_rebuild()
