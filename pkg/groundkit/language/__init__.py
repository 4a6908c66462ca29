"""
Linguistic cue extraction: parses, relation tuples and pronoun links
"""

from .align import PronounLexicon, default_pronoun_lexicon, find_pronoun_mentions
from .coref import PronounResolver, expand_tuples_with_pronouns, resolve_pronouns
from .ptb import parse_ptb, tokens_match
from .tuples import TupleExtractor, collapse_attachments, extract_tuples

__all__ = [
    "PronounLexicon",
    "default_pronoun_lexicon",
    "find_pronoun_mentions",
    "PronounResolver",
    "expand_tuples_with_pronouns",
    "resolve_pronouns",
    "parse_ptb",
    "tokens_match",
    "TupleExtractor",
    "collapse_attachments",
    "extract_tuples",
]
