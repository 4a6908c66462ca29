"""
Entity alignment helpers shared by tuple extraction and coreference
"""

from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from ..errors import AssetError
from ..models.language import EntityMention, ParseTree, PronounClass

DEFAULT_ASSETS_DIR = Path(__file__).resolve().parent.parent / "assets"

RELATIVE_TAGS = ("WP", "WDT", "WP$")


class PronounLexicon:
    """Pronoun words and multiword phrases mapped to their class"""

    def __init__(self, entries: Mapping[str, Union[PronounClass, str]]):
        self.entries: Dict[Tuple[str, ...], PronounClass] = {}
        for phrase, cls in entries.items():
            words = tuple(phrase.lower().split())
            if words:
                self.entries[words] = cls if isinstance(cls, PronounClass) else PronounClass(cls)
        self.max_words = max((len(w) for w in self.entries), default=0)

    @classmethod
    def from_class_lists(cls, lists: Mapping[Union[PronounClass, str], Iterable[str]]) -> "PronounLexicon":
        entries: Dict[str, Union[PronounClass, str]] = {}
        for pronoun_class, words in lists.items():
            for word in words:
                entries[word] = pronoun_class
        return cls(entries)

    @classmethod
    def from_tsv(cls, path: Optional[Union[str, Path]] = None) -> "PronounLexicon":
        """Read ``word<TAB>class`` lines (packaged lexicon when path is None)"""
        path = Path(path) if path else DEFAULT_ASSETS_DIR / "pronouns.tsv"
        if not path.exists():
            raise AssetError(f"Pronoun lexicon not found: {path}")
        entries: Dict[str, Union[PronounClass, str]] = {}
        with open(path, "r", encoding="utf-8") as f:
            for line_no, line in enumerate(f, 1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise AssetError(f"{path}:{line_no}: expected 'word<TAB>class'")
                try:
                    entries[parts[0].strip()] = PronounClass(parts[1].strip())
                except ValueError as e:
                    raise AssetError(f"{path}:{line_no}: unknown pronoun class '{parts[1]}'") from e
        return cls(entries)

    def by_class(self) -> Dict[PronounClass, List[str]]:
        grouped: Dict[PronounClass, List[str]] = {c: [] for c in PronounClass}
        for words, cls in self.entries.items():
            grouped[cls].append(" ".join(words))
        return grouped

    def match(self, tokens: List[str], start: int) -> Optional[Tuple[int, PronounClass]]:
        """Longest lexicon phrase starting at ``start``"""
        lowered = [t.lower() for t in tokens]
        for length in range(min(self.max_words, len(tokens) - start), 0, -1):
            cls = self.entries.get(tuple(lowered[start : start + length]))
            if cls is not None:
                return length, cls
        return None


@lru_cache(maxsize=1)
def default_pronoun_lexicon() -> PronounLexicon:
    """Packaged pronoun lexicon, read once"""
    return PronounLexicon.from_tsv()


class PronounMention:
    """Pronoun found in a sentence, with the entity containing it for possessives"""

    def __init__(self, mention: EntityMention, container: Optional[EntityMention] = None):
        self.mention = mention
        self.container = container


def find_pronoun_mentions(
    tree: ParseTree, entities: List[EntityMention], lexicon: PronounLexicon
) -> List[PronounMention]:
    """
    Pronouns outside entity spans, plus possessive determiners (PRP$) inside them
    """
    leaves = tree.leaves()
    tokens = [leaf.token for leaf in leaves]
    found: List[PronounMention] = []
    position = 0
    while position < len(tokens):
        hit = lexicon.match(tokens, position)
        if hit is None:
            position += 1
            continue
        length, cls = hit
        end = position + length
        tag = leaves[position].label
        container = next((e for e in entities if e.start <= position and end <= e.end), None)
        overlaps = any(e.start < end and position < e.end for e in entities)

        keep = False
        if container is not None:
            keep = tag == "PRP$"
        elif not overlaps:
            keep = cls != PronounClass.RELATIVE or tag in RELATIVE_TAGS

        if keep:
            mention = EntityMention(
                phrase_id=f"pronoun-{position}",
                token_span=(position, end),
                head_tokens=tokens[position:end],
                pronoun_class=cls,
            )
            found.append(PronounMention(mention, container))
        position = end
    return found


class NpAligner:
    """Maps NP nodes of a tree to the mentions they denote"""

    def __init__(self, mentions: List[EntityMention]):
        self.by_span: Dict[Tuple[int, int], EntityMention] = {}
        for mention in mentions:
            self.by_span.setdefault(mention.token_span, mention)

    def aligned(self, node: ParseTree) -> Optional[EntityMention]:
        """Exact span match, else the NP's first NP child, recursively"""
        while node is not None:
            mention = self.by_span.get(node.token_span)
            if mention is not None:
                return mention
            first_np = next((c for c in node.children if is_np(c)), None)
            if first_np is None or node.children.index(first_np) != 0:
                return None
            node = first_np
        return None


def is_np(node: ParseTree) -> bool:
    return not node.is_leaf and node.label.split("-")[0] in ("NP", "NX")


def has_coordination(node: ParseTree) -> bool:
    return any(child.label == "CC" for child in node.children)


def root_clause(tree: ParseTree) -> ParseTree:
    """The top S-like clause (the tree itself when it is a clause)"""
    if tree.label.startswith("S"):
        return tree
    for child in tree.children:
        if child.label.startswith("S"):
            return child
    return tree


def main_subject(tree: ParseTree, aligner: NpAligner) -> Optional[EntityMention]:
    """Leftmost NP entity that is a direct child of the root clause"""
    for child in root_clause(tree).children:
        if is_np(child):
            mention = aligner.aligned(child)
            if mention is not None and not mention.is_pronoun:
                return mention
    return None
