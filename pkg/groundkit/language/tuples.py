"""
Relation tuple extraction from constituency parses
"""

from typing import Dict, List, Optional, Tuple

from ..models.language import (
    EntityMention,
    ParseTree,
    PhraseType,
    RelationKind,
    RelationTuple,
    TupleExtraction,
)
from ..utils.logger import get_logger
from .align import (
    NpAligner,
    PronounLexicon,
    default_pronoun_lexicon,
    find_pronoun_mentions,
    has_coordination,
    is_np,
)

ATTACHED_TYPES = (PhraseType.CLOTHING, PhraseType.BODYPARTS)


def is_attachment_pair(left: EntityMention, right: EntityMention) -> bool:
    return (
        not left.is_pronoun
        and left.phrase_type == PhraseType.PEOPLE
        and right.phrase_type in ATTACHED_TYPES
    )


def collapse_attachments(tuples: List[RelationTuple], tokens: Optional[List[str]] = None) -> List[RelationTuple]:
    """
    Replace verb and preposition tuples of people -> clothing/bodyparts pairs
    with a single attachment tuple, placed where the pair first appeared

    With tokens, the attachment keeps the words from the first relational
    node up to the attached entity. Without them it keeps the collapsed
    relation words in order of appearance.
    """
    collapsed: List[RelationTuple] = []
    attachments: Dict[Tuple[str, str], RelationTuple] = {}
    seen = set()

    for relation in tuples:
        pair = (relation.left.phrase_id, relation.right.phrase_id)
        if not is_attachment_pair(relation.left, relation.right):
            if relation.signature not in seen:
                seen.add(relation.signature)
                collapsed.append(relation)
            continue

        existing = attachments.get(pair)
        if existing is None:
            node_start = relation.metadata.get("node_start")
            if relation.kind == RelationKind.ATTACHMENT:
                words = list(relation.rel_words)
            elif tokens is not None and node_start is not None:
                words = [t.lower() for t in tokens[node_start : relation.right.start]]
            else:
                words = list(relation.rel_words)
            metadata = {k: v for k, v in relation.metadata.items() if k != "node_start"}
            attachment = RelationTuple(
                left=relation.left,
                rel_words=words,
                right=relation.right,
                kind=RelationKind.ATTACHMENT,
                metadata=metadata,
            )
            attachments[pair] = attachment
            collapsed.append(attachment)
        elif tokens is None:
            for word in relation.rel_words:
                if word not in existing.rel_words:
                    existing.rel_words.append(word)
    return collapsed


class TupleExtractor:
    """
    Walks verb and prepositional phrases and pairs the entity up and to the
    left of each with the first mention after its head word
    """

    def __init__(self, pronoun_lexicon: Optional[PronounLexicon] = None, debug: bool = False):
        self.pronoun_lexicon = pronoun_lexicon or default_pronoun_lexicon()
        self.logger = get_logger(__name__, debug=debug)

    def extract(self, tree: ParseTree, entities: List[EntityMention]) -> TupleExtraction:
        warnings: List[str] = []
        tokens = tree.tokens()

        aligned_entities = self._aligned_entities(tree, entities, warnings)
        pronouns = [
            found.mention
            for found in find_pronoun_mentions(tree, entities, self.pronoun_lexicon)
            if found.container is None
        ]
        mentions = sorted(aligned_entities + pronouns, key=lambda m: m.token_span)
        aligner = NpAligner(mentions)
        parents = tree.parent_map()

        raw: List[RelationTuple] = []
        for node in tree.preorder():
            if node.is_leaf:
                continue
            label = node.label.split("-")[0]
            if label == "VP":
                if any(c.label.split("-")[0] == "VP" for c in node.children):
                    continue
                kind, head = RelationKind.VERB, self._head(node, lambda t: t.startswith("VB"))
            elif label == "PP":
                kind, head = RelationKind.PREPOSITION, self._head(node, lambda t: t in ("IN", "TO"))
            else:
                continue
            if head is None:
                continue

            left, crossed = self._entity_up_left(node, parents, aligner)
            right = next(
                (m for m in mentions if m.start >= head.end and m.end <= node.end),
                None,
            )
            if left is None or right is None or left.phrase_id == right.phrase_id:
                continue

            metadata = {"node_start": node.start}
            if crossed:
                metadata["coordination"] = True
            raw.append(
                RelationTuple(
                    left=left,
                    rel_words=[head.token.lower()],
                    right=right,
                    kind=kind,
                    metadata=metadata,
                )
            )

        tuples = collapse_attachments(raw, tokens)
        for relation in tuples:
            relation.metadata.pop("node_start", None)
        self.logger.debug(f"🔍 {len(tuples)} tuples from {len(raw)} relational phrases")
        return TupleExtraction(tuples=tuples, warnings=warnings)

    def _aligned_entities(
        self, tree: ParseTree, entities: List[EntityMention], warnings: List[str]
    ) -> List[EntityMention]:
        spans = {node.token_span for node in tree.preorder() if is_np(node)}
        aligned = []
        for entity in entities:
            if entity.token_span in spans:
                aligned.append(entity)
            else:
                message = f"entity {entity.phrase_id} span {list(entity.token_span)} not found in tree"
                warnings.append(message)
                self.logger.warning(f"⚠️ {message}")
        return aligned

    @staticmethod
    def _head(node: ParseTree, accepts) -> Optional[ParseTree]:
        return next((c for c in node.children if c.is_leaf and accepts(c.label)), None)

    @staticmethod
    def _entity_up_left(
        node: ParseTree, parents: Dict[int, ParseTree], aligner: NpAligner
    ) -> Tuple[Optional[EntityMention], bool]:
        crossed = False
        while id(node) in parents:
            parent = parents[id(node)]
            index = next(i for i, child in enumerate(parent.children) if child is node)
            for sibling in reversed(parent.children[:index]):
                if sibling.label == "CC":
                    crossed = True
                if is_np(sibling):
                    mention = aligner.aligned(sibling)
                    if mention is not None:
                        return mention, crossed or has_coordination(sibling)
            node = parent
        return None, crossed


def extract_tuples(
    tree: ParseTree,
    entities: List[EntityMention],
    pronoun_lexicon: Optional[PronounLexicon] = None,
) -> List[RelationTuple]:
    """Relation tuples of a sentence, in order of their relational phrases"""
    return TupleExtractor(pronoun_lexicon=pronoun_lexicon).extract(tree, entities).tuples
