#!/usr/bin/env python3
"""
Linguistic cue extraction tests: parse reading, relation tuples and pronouns
"""

import logging

import pytest

from groundkit.errors import ParseError
from groundkit.language.coref import PronounResolver, expand_tuples_with_pronouns, resolve_pronouns
from groundkit.language.ptb import parse_ptb, tokens_match
from groundkit.language.tuples import TupleExtractor, extract_tuples
from groundkit.models.language import (
    EntityMention,
    PhraseType,
    PronounClass,
    PronounLink,
    RelationKind,
    RelationTuple,
)


def mention(phrase_id, start, end, phrase_type=PhraseType.OTHER, words=None):
    return EntityMention(
        phrase_id=phrase_id,
        token_span=(start, end),
        phrase_type=phrase_type,
        head_tokens=words or [phrase_id],
    )


def as_triples(tuples):
    return [(t.left.phrase_id, t.kind.value, t.rel_words, t.right.phrase_id) for t in tuples]


BOY_FIELD_DOG = (
    "(S (NP (DT A) (NN boy)) (VP (VBG running) (PP (IN in) (NP (DT a) (NN field)))"
    " (PP (IN with) (NP (DT a) (NN dog)))))"
)


def test_parse_minimal_tree():
    tree = parse_ptb("(NP (DT a) (NN boy))")
    assert tree.label == "NP"
    assert tree.token_span == (0, 2)
    assert tree.tokens() == ["a", "boy"]


def test_parse_assigns_spans_left_to_right():
    tree = parse_ptb("(S (NP (DT a) (NN boy)) (VP (VBG running)))")
    assert tree.label == "S"
    assert [c.token_span for c in tree.children] == [(0, 2), (2, 3)]
    assert tokens_match(tree, ["a", "boy", "running"])
    assert not tokens_match(tree, ["a", "boy"])


def test_parse_unwraps_empty_root():
    tree = parse_ptb("( (NP (DT a) (NN boy)) )")
    assert tree.label == "NP"


@pytest.mark.parametrize("text", ["((NP a boy", "", "(NP (DT a)))", "(NP ())"])
def test_parse_rejects_malformed_input(text):
    with pytest.raises(ParseError) as info:
        parse_ptb(text)
    assert info.value.offset >= 0
    assert "offset" in info.value.to_dict()


def test_extract_verb_and_prepositions():
    tree = parse_ptb(BOY_FIELD_DOG)
    entities = [
        mention("boy", 0, 2, PhraseType.PEOPLE),
        mention("field", 4, 6, PhraseType.SCENE),
        mention("dog", 7, 9, PhraseType.ANIMALS),
    ]
    assert as_triples(extract_tuples(tree, entities)) == [
        ("boy", "verb", ["running"], "field"),
        ("boy", "preposition", ["in"], "field"),
        ("boy", "preposition", ["with"], "dog"),
    ]


def test_extract_is_deterministic():
    tree = parse_ptb(BOY_FIELD_DOG)
    entities = [mention("boy", 0, 2), mention("field", 4, 6), mention("dog", 7, 9)]
    first = as_triples(extract_tuples(tree, entities))
    assert first == as_triples(extract_tuples(tree, entities))
    # verb phrase with an embedded preposition gives both kinds
    assert {kind for _, kind, _, _ in first} == {"verb", "preposition"}


def test_clothing_collapses_into_one_attachment():
    tree = parse_ptb("(S (NP (DT a) (NN boy)) (VP (VBG running) (PP (IN in) (NP (DT a) (NN jacket)))))")
    entities = [
        mention("boy", 0, 2, PhraseType.PEOPLE),
        mention("jacket", 4, 6, PhraseType.CLOTHING),
    ]
    tuples = extract_tuples(tree, entities)
    assert len(tuples) == 1
    assert tuples[0].kind == RelationKind.ATTACHMENT
    assert tuples[0].rel_words == ["running", "in"]
    assert tuples[0].relation_word == ""


def test_tree_without_relational_phrases():
    tree = parse_ptb("(NP (DT a) (NN dog))")
    assert extract_tuples(tree, [mention("dog", 0, 2)]) == []


def test_misaligned_entity_is_skipped_with_warning():
    tree = parse_ptb(BOY_FIELD_DOG)
    entities = [mention("boy", 0, 2), mention("field", 5, 6), mention("dog", 7, 9)]
    extraction = TupleExtractor().extract(tree, entities)
    assert extraction.warnings
    assert all("field" not in (t.left.phrase_id, t.right.phrase_id) for t in extraction.tuples)
    assert extraction.get_summary()["warnings"] == 1


def test_misaligned_entity_is_logged_as_warning(caplog):
    extractor = TupleExtractor()
    extractor.logger.addHandler(caplog.handler)
    try:
        with caplog.at_level(logging.WARNING, logger=extractor.logger.name):
            extractor.extract(parse_ptb(BOY_FIELD_DOG), [mention("boy", 0, 2), mention("field", 5, 6)])
    finally:
        extractor.logger.removeHandler(caplog.handler)
    records = [r for r in caplog.records if r.name == extractor.logger.name]
    assert [r.levelno for r in records] == [logging.WARNING]
    assert "entity field span [5, 6] not found in tree" in records[0].getMessage()


def test_attachment_rejects_other_types():
    with pytest.raises(ValueError):
        RelationTuple(
            left=mention("dog", 0, 2, PhraseType.ANIMALS),
            right=mention("jacket", 3, 5, PhraseType.CLOTHING),
            kind=RelationKind.ATTACHMENT,
        )


def test_reflexive_refers_to_nearest_entity():
    tree = parse_ptb("(S (NP (NNS Ducks)) (VP (VBP feed) (NP (PRP themselves))))")
    ducks = mention("ducks", 0, 1, PhraseType.ANIMALS, ["Ducks"])
    links = resolve_pronouns(tree, [ducks])
    assert len(links) == 1
    assert links[0].pronoun_class == PronounClass.REFLEXIVE
    assert links[0].antecedent.phrase_id == "ducks"

    expanded = expand_tuples_with_pronouns(extract_tuples(tree, [ducks]), links)
    assert as_triples(expanded) == [("ducks", "verb", ["feed"], "ducks")]
    assert expanded[0].metadata["resolved"] is True


def test_reflexive_after_multiword_subject():
    tree = parse_ptb("(S (NP (DT A) (NN tennis) (NN player)) (VP (VBZ readies) (NP (PRP herself))))")
    player = mention("player", 0, 3, PhraseType.PEOPLE, ["A", "tennis", "player"])
    links = resolve_pronouns(tree, [player])
    assert [link.antecedent.phrase_id for link in links] == ["player"]


def test_object_pronoun_refers_to_main_subject():
    tree = parse_ptb(
        "(S (NP (NP (DT A) (NN dog)) (VP (VBG laying) (PP (IN on) (NP (DT the) (NN ground)))))"
        " (VP (VBZ looks) (PRT (RP up)) (PP (IN at) (NP (NP (DT the) (NN dog))"
        " (VP (VBG standing) (PP (IN over) (NP (PRP him))))))))"
    )
    entities = [
        mention("dog1", 0, 2, PhraseType.ANIMALS),
        mention("ground", 4, 6, PhraseType.SCENE),
        mention("dog2", 9, 11, PhraseType.ANIMALS),
    ]
    links = resolve_pronouns(tree, entities)
    assert len(links) == 1
    assert links[0].pronoun.token_span == (13, 14)
    assert links[0].pronoun_class == PronounClass.OBJECT
    assert links[0].antecedent.phrase_id == "dog1"


def test_possessive_gives_attachment_to_owner():
    tree = parse_ptb(
        "(S (NP (DT a) (NN man)) (VP (VBZ puts) (NP (PRP$ his) (NN hand))"
        " (PP (IN on) (NP (DT a) (NN table)))))"
    )
    entities = [
        mention("man", 0, 2, PhraseType.PEOPLE),
        mention("hand", 3, 5, PhraseType.BODYPARTS),
        mention("table", 6, 8, PhraseType.OTHER),
    ]
    resolver = PronounResolver()
    links = resolver.resolve(tree, entities)
    assert [link.antecedent.phrase_id for link in links] == ["man"]

    tuples = expand_tuples_with_pronouns(extract_tuples(tree, entities), links, resolver.containers)
    attachments = [t for t in tuples if t.kind == RelationKind.ATTACHMENT]
    assert [(t.left.phrase_id, t.right.phrase_id) for t in attachments] == [("man", "hand")]
    assert ("hand", "preposition", ["on"], "table") in as_triples(tuples)


def test_unresolved_pronoun_tuples_are_dropped_and_duplicates_merged():
    dog = mention("dog", 0, 2, PhraseType.ANIMALS)
    someone = EntityMention(
        phrase_id="pronoun-3",
        token_span=(3, 4),
        head_tokens=["someone"],
        pronoun_class=PronounClass.INDEFINITE,
    )
    ball = mention("ball", 5, 7)
    tuples = [
        RelationTuple(left=dog, rel_words=["sees"], right=someone, kind=RelationKind.VERB),
        RelationTuple(left=dog, rel_words=["with"], right=ball, kind=RelationKind.PREPOSITION),
        RelationTuple(left=dog, rel_words=["with"], right=ball, kind=RelationKind.PREPOSITION),
    ]
    links = [PronounLink(pronoun=someone, antecedent=None, pronoun_class=PronounClass.INDEFINITE)]
    expanded = expand_tuples_with_pronouns(tuples, links)
    assert as_triples(expanded) == [("dog", "preposition", ["with"], "ball")]
    assert all(not t.left.is_pronoun and not t.right.is_pronoun for t in expanded)


def test_indefinite_link_cannot_have_antecedent():
    someone = EntityMention(
        phrase_id="p", token_span=(0, 1), head_tokens=["someone"], pronoun_class=PronounClass.INDEFINITE
    )
    with pytest.raises(ValueError):
        PronounLink(pronoun=someone, antecedent=mention("dog", 2, 3), pronoun_class=PronounClass.INDEFINITE)
