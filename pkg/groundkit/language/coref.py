"""
Rule-based pronoun resolution and tuple expansion
"""

from typing import Dict, List, Optional

from ..models.language import (
    EntityMention,
    ParseTree,
    PronounClass,
    PronounLink,
    RelationKind,
    RelationTuple,
)
from ..utils.logger import get_logger
from .align import (
    NpAligner,
    PronounLexicon,
    default_pronoun_lexicon,
    find_pronoun_mentions,
    main_subject,
)
from .tuples import collapse_attachments, is_attachment_pair

MAIN_SUBJECT_CLASSES = (PronounClass.SUBJECT, PronounClass.OBJECT)
NEAREST_CLASSES = (PronounClass.REFLEXIVE, PronounClass.RECIPROCAL, PronounClass.RELATIVE)


class PronounResolver:
    """
    Links pronouns to entities of the same sentence

    Subject and object pronouns (possessives included) refer to the main
    subject of the sentence. Reflexive, reciprocal and relative pronouns refer
    to the nearest entity before them. Indefinite pronouns refer to nothing.
    """

    def __init__(self, pronoun_lexicon: Optional[PronounLexicon] = None, debug: bool = False):
        self.pronoun_lexicon = pronoun_lexicon or default_pronoun_lexicon()
        self.logger = get_logger(__name__, debug=debug)
        # possessive pronoun phrase id -> entity whose span contains it
        self.containers: Dict[str, EntityMention] = {}

    def resolve(self, tree: ParseTree, entities: List[EntityMention]) -> List[PronounLink]:
        found = find_pronoun_mentions(tree, entities, self.pronoun_lexicon)
        self.containers = {f.mention.phrase_id: f.container for f in found if f.container is not None}

        nouns = [e for e in entities if not e.is_pronoun]
        subject = main_subject(tree, NpAligner(nouns))

        links = []
        for item in found:
            pronoun = item.mention
            cls = pronoun.pronoun_class
            antecedent = None
            if cls in MAIN_SUBJECT_CLASSES:
                if subject is not None and subject.end <= pronoun.start:
                    antecedent = subject
            elif cls in NEAREST_CLASSES:
                antecedent = self._nearest_before(pronoun, nouns)
            links.append(PronounLink(pronoun=pronoun, antecedent=antecedent, pronoun_class=cls))

        resolved = sum(1 for link in links if link.antecedent is not None)
        self.logger.debug(f"🔍 {resolved}/{len(links)} pronouns resolved")
        return links

    @staticmethod
    def _nearest_before(pronoun: EntityMention, nouns: List[EntityMention]) -> Optional[EntityMention]:
        before = [e for e in nouns if e.end <= pronoun.start]
        if not before:
            return None
        return max(before, key=lambda e: (e.end, e.start))


def resolve_pronouns(
    tree: ParseTree,
    entities: List[EntityMention],
    pronoun_lexicon: Optional[PronounLexicon] = None,
) -> List[PronounLink]:
    """Pronoun links for one sentence"""
    return PronounResolver(pronoun_lexicon=pronoun_lexicon).resolve(tree, entities)


def possessive_attachments(
    links: List[PronounLink], containers: Dict[str, EntityMention]
) -> List[RelationTuple]:
    """
    Attachments implied by possessives, as in "a man puts his hand ..."
    linking the owner of "his" to "hand"
    """
    tuples = []
    for link in links:
        container = containers.get(link.pronoun.phrase_id)
        if container is None or link.antecedent is None:
            continue
        if is_attachment_pair(link.antecedent, container):
            tuples.append(
                RelationTuple(
                    left=link.antecedent,
                    rel_words=[],
                    right=container,
                    kind=RelationKind.ATTACHMENT,
                    metadata={"possessive": link.pronoun.text.lower()},
                )
            )
    return tuples


def expand_tuples_with_pronouns(
    tuples: List[RelationTuple],
    links: List[PronounLink],
    containers: Optional[Dict[str, EntityMention]] = None,
) -> List[RelationTuple]:
    """
    Rewrite pronoun endpoints to their antecedents

    Tuples still touching an unresolved pronoun are dropped and the result
    holds no duplicates. People -> clothing/bodyparts pairs created by the
    rewrite become attachments.
    """
    antecedents = {
        link.pronoun.phrase_id: link.antecedent for link in links if link.antecedent is not None
    }

    def rewrite(mention: EntityMention) -> Optional[EntityMention]:
        if not mention.is_pronoun:
            return mention
        return antecedents.get(mention.phrase_id)

    expanded: List[RelationTuple] = []
    for relation in tuples:
        left, right = rewrite(relation.left), rewrite(relation.right)
        if left is None or right is None:
            continue
        if left is relation.left and right is relation.right:
            expanded.append(relation)
            continue
        metadata = dict(relation.metadata)
        metadata["resolved"] = True
        expanded.append(
            RelationTuple(
                left=left,
                rel_words=list(relation.rel_words),
                right=right,
                kind=relation.kind,
                metadata=metadata,
            )
        )

    if containers:
        expanded.extend(possessive_attachments(links, containers))
    return collapse_attachments(expanded)
