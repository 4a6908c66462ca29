"""
Reader for bracketed (Penn Treebank style) constituency parses
"""

import re
from typing import List, Optional, Tuple, Union

from ..errors import ParseError
from ..models.language import ParseTree

_TOKEN = re.compile(r"\(|\)|[^\s()]+")

# label given to bare words sitting next to constituents
ATOM_LABEL = "X"


class _Frame:
    __slots__ = ("label", "offset", "children")

    def __init__(self, label: str, offset: int):
        self.label = label
        self.offset = offset
        self.children: List[Union["_Frame", Tuple[str, int]]] = []


def parse_ptb(text: str) -> ParseTree:
    """
    Parse a bracketed tree, assigning token spans left to right

    "(NP (DT a) (NN boy))" gives an NP spanning tokens [0, 2). A root with an
    empty label, as printed by most parsers, is unwrapped when it has a
    single child.

    Raises:
        ParseError: empty input, unbalanced brackets or empty constituents,
                    with the character offset of the problem
    """
    tokens = [(m.group(), m.start()) for m in _TOKEN.finditer(text or "")]
    if not tokens:
        raise ParseError("empty parse", 0)
    if tokens[0][0] != "(":
        raise ParseError("parse must start with '('", tokens[0][1])

    stack: List[_Frame] = []
    root: Optional[_Frame] = None
    i = 0
    while i < len(tokens):
        tok, offset = tokens[i]
        if root is not None:
            raise ParseError("unexpected content after the end of the tree", offset)
        if tok == "(":
            label = ""
            if i + 1 < len(tokens) and tokens[i + 1][0] not in ("(", ")"):
                label = tokens[i + 1][0]
                i += 1
            stack.append(_Frame(label, offset))
        elif tok == ")":
            if not stack:
                raise ParseError("unbalanced ')'", offset)
            frame = stack.pop()
            if stack:
                stack[-1].children.append(frame)
            else:
                root = frame
        else:
            stack[-1].children.append((tok, offset))
        i += 1

    if stack:
        raise ParseError("unbalanced '(': missing ')'", len(text))
    assert root is not None

    if root.label == "":
        subtrees = [c for c in root.children if isinstance(c, _Frame)]
        if len(root.children) == 1 and subtrees:
            root = subtrees[0]
        else:
            root.label = "ROOT"

    tree, _ = _build(root, 0)
    return tree


def _build(frame: _Frame, position: int) -> Tuple[ParseTree, int]:
    if not frame.label:
        raise ParseError("constituent without a label", frame.offset)
    if not frame.children:
        raise ParseError(f"empty constituent ({frame.label})", frame.offset)

    if len(frame.children) == 1 and not isinstance(frame.children[0], _Frame):
        word, _ = frame.children[0]
        return ParseTree(label=frame.label, token=word, start=position, end=position + 1), position + 1

    start = position
    children: List[ParseTree] = []
    for child in frame.children:
        if isinstance(child, _Frame):
            node, position = _build(child, position)
        else:
            node = ParseTree(label=ATOM_LABEL, token=child[0], start=position, end=position + 1)
            position += 1
        children.append(node)
    return ParseTree(label=frame.label, children=children, start=start, end=position), position


def tokens_match(tree: ParseTree, tokens: List[str]) -> bool:
    """True when the tree's leaves spell exactly the given tokens"""
    return tree.tokens() == list(tokens)
