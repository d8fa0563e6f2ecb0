"""Controlled-language query parsing into query graphs.

The grammar (case-insensitive):

    query       := boilerplate? clause ( (","|"and") clause )*
    boilerplate := "find images with" | "find images where" | "show me"
                 | "images with" | "images where"
    clause      := np ( relphrase np )?
    np          := article? adj* noun
    adj         := COLOR | SHAPE | "big"|"large" | "small"|"tiny"

Multiword relation phrases win by longest match, so "on top of" never reads
as "on". A copula filler ("is", "that is", "which is") between a noun
phrase and a relation phrase is skipped. Nouns are open vocabulary;
adjectives come from the closed color/shape/size sets and anything else in
adjective position is a positioned error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import EmptyQuery, QueryParseError
from .ingest import DEFAULT_VOCABULARY, Vocabulary
from .scene import Predicate


@dataclass(frozen=True)
class QueryNode:
    """One described object: a label plus optional attribute constraints."""

    node_id: int
    label: str
    color: str | None = None
    shape: str | None = None
    size_word: str | None = None  # "big" | "small"

    @property
    def attribute_key(self) -> tuple:
        return (self.label, self.color, self.shape, self.size_word)


@dataclass(frozen=True)
class QueryEdge:
    from_node: int
    predicate: Predicate
    to_node: int


@dataclass(frozen=True)
class QueryGraph:
    nodes: tuple[QueryNode, ...]
    edges: tuple[QueryEdge, ...]
    raw_text: str

    def node(self, node_id: int) -> QueryNode:
        return self.nodes[node_id]


_ARTICLES = {"a", "an", "the"}

_SIZE_WORDS = {"big": "big", "large": "big", "small": "small", "tiny": "small"}

# longest match first; tuples are lowercase token sequences
_RELPHRASES: list[tuple[tuple[str, ...], Predicate]] = [
    (("to", "the", "left", "of"), Predicate.LEFT_OF),
    (("to", "the", "right", "of"), Predicate.RIGHT_OF),
    (("on", "top", "of"), Predicate.ON),
    (("in", "front", "of"), Predicate.IN_FRONT_OF),
    (("left", "of"), Predicate.LEFT_OF),
    (("right", "of"), Predicate.RIGHT_OF),
    (("next", "to"), Predicate.NEAR),
    (("bigger", "than"), Predicate.BIGGER_THAN),
    (("smaller", "than"), Predicate.SMALLER_THAN),
    (("above",), Predicate.ABOVE),
    (("over",), Predicate.ABOVE),
    (("below",), Predicate.BELOW),
    (("under",), Predicate.BELOW),
    (("on",), Predicate.ON),
    (("behind",), Predicate.BEHIND),
    (("inside",), Predicate.INSIDE),
    (("in",), Predicate.INSIDE),
    (("containing",), Predicate.CONTAINS),
    (("near",), Predicate.NEAR),
]

_BOILERPLATE = [
    ("find", "images", "with"),
    ("find", "images", "where"),
    ("images", "with"),
    ("images", "where"),
    ("show", "me"),
]

_COPULAS = [("which", "is"), ("that", "is"), ("is",)]

# canonical surface form per predicate, used by unparse
_SURFACE = {
    Predicate.ABOVE: "above",
    Predicate.BELOW: "below",
    Predicate.LEFT_OF: "left of",
    Predicate.RIGHT_OF: "right of",
    Predicate.IN_FRONT_OF: "in front of",
    Predicate.BEHIND: "behind",
    Predicate.CONTAINS: "containing",
    Predicate.INSIDE: "inside",
    Predicate.ON: "on",
    Predicate.NEAR: "near",
    Predicate.BIGGER_THAN: "bigger than",
    Predicate.SMALLER_THAN: "smaller than",
}

_TOKEN = re.compile(r"[A-Za-z][A-Za-z0-9_'-]*|,")


@dataclass(frozen=True)
class _Token:
    text: str  # lowercased
    start: int  # character offset in the raw query


class _Parser:
    def __init__(self, raw: str, vocab: Vocabulary):
        self.raw = raw
        self.vocab = vocab
        self.tokens = [_Token(m.group(0).lower(), m.start()) for m in _TOKEN.finditer(raw)]
        self.pos = 0
        self.nodes: list[QueryNode] = []
        self.edges: list[QueryEdge] = []
        self._node_by_key: dict[tuple, int] = {}

    # --- cursor helpers ---

    def _peek(self, offset: int = 0) -> _Token | None:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def _here(self) -> int:
        tok = self._peek()
        return tok.start if tok is not None else len(self.raw)

    def _match_phrase(self, phrase: tuple[str, ...]) -> bool:
        for i, word in enumerate(phrase):
            tok = self._peek(i)
            if tok is None or tok.text != word:
                return False
        return True

    def _relphrase_here(self) -> tuple[tuple[str, ...], Predicate] | None:
        for phrase, pred in _RELPHRASES:
            if self._match_phrase(phrase):
                return phrase, pred
        return None

    def _copula_here(self) -> tuple[str, ...] | None:
        for cop in _COPULAS:
            if self._match_phrase(cop):
                return cop
        return None

    def _at_np_boundary(self) -> bool:
        tok = self._peek()
        if tok is None or tok.text in (",", "and", "is", "that", "which"):
            return True
        return self._relphrase_here() is not None

    # --- grammar productions ---

    def parse(self) -> QueryGraph:
        for phrase in _BOILERPLATE:
            if self._match_phrase(phrase):
                self.pos += len(phrase)
                break
        self._clause()
        while True:
            tok = self._peek()
            if tok is None:
                break
            if tok.text in (",", "and"):
                self.pos += 1
                self._clause()
            else:
                raise QueryParseError(
                    f"expected ',' or 'and' before {tok.text!r}", position=tok.start
                )
        return QueryGraph(nodes=tuple(self.nodes), edges=tuple(self.edges), raw_text=self.raw)

    def _clause(self):
        subject = self._np()
        save = self.pos
        copula = self._copula_here()
        if copula is not None:
            self.pos += len(copula)
        rel = self._relphrase_here()
        if rel is None:
            self.pos = save  # no relation follows; any copula tokens were not fillers
            return
        phrase, predicate = rel
        self.pos += len(phrase)
        obj = self._np(after=" ".join(phrase))
        if subject == obj:
            raise QueryParseError(
                f"relation {' '.join(phrase)!r} needs two distinct objects", position=self._here()
            )
        edge = QueryEdge(from_node=subject, predicate=predicate, to_node=obj)
        if edge not in self.edges:
            self.edges.append(edge)

    def _np(self, after: str | None = None) -> int:
        if self._peek() is None or self._at_np_boundary():
            what = f"after {after!r}" if after else "here"
            raise QueryParseError(f"expected an object noun phrase {what}", position=self._here())
        first = self._peek()
        if first.text in _ARTICLES and not self._at_np_boundary_ahead(1):
            self.pos += 1
        run: list[_Token] = []
        while self._peek() is not None and not self._at_np_boundary():
            run.append(self._peek())
            self.pos += 1
        noun = run[-1]
        color = shape = size_word = None
        for tok in run[:-1]:
            canon_color = self.vocab.canon_color(tok.text)
            canon_shape = self.vocab.canon_shape(tok.text) if canon_color is None else None
            if canon_color is not None:
                if color is not None and color != canon_color:
                    raise QueryParseError(
                        f"conflicting color adjectives {color!r} and {tok.text!r}",
                        position=tok.start,
                    )
                color = canon_color
            elif canon_shape is not None:
                if shape is not None and shape != canon_shape:
                    raise QueryParseError(
                        f"conflicting shape adjectives {shape!r} and {tok.text!r}",
                        position=tok.start,
                    )
                shape = canon_shape
            elif tok.text in _SIZE_WORDS:
                word = _SIZE_WORDS[tok.text]
                if size_word is not None and size_word != word:
                    raise QueryParseError(
                        f"conflicting size adjectives {size_word!r} and {tok.text!r}",
                        position=tok.start,
                    )
                size_word = word
            else:
                raise QueryParseError(f"unknown adjective {tok.text!r}", position=tok.start)
        label = self.vocab.canon_label(noun.text)
        key = (label, color, shape, size_word)
        node_id = self._node_by_key.get(key)
        if node_id is None:
            node_id = len(self.nodes)
            self.nodes.append(
                QueryNode(node_id=node_id, label=label, color=color, shape=shape, size_word=size_word)
            )
            self._node_by_key[key] = node_id
        return node_id

    def _at_np_boundary_ahead(self, offset: int) -> bool:
        saved = self.pos
        self.pos += offset
        try:
            return self._at_np_boundary()
        finally:
            self.pos = saved


def parse(text: str, vocab: Vocabulary = DEFAULT_VOCABULARY) -> QueryGraph:
    """Parse a query; every input yields a graph or a positioned error."""
    if text is None or not text.strip():
        raise EmptyQuery()
    return _Parser(text, vocab).parse()


def _np_text(node: QueryNode) -> str:
    words = [node.size_word, node.color, node.shape, node.label]
    return " ".join(w for w in words if w)


def unparse(graph: QueryGraph) -> str:
    """Canonical text form; parsing it back reproduces the graph."""
    by_id = {n.node_id: n for n in graph.nodes}
    clauses = []
    mentioned: set[int] = set()
    for e in graph.edges:
        clauses.append(
            f"{_np_text(by_id[e.from_node])} {_SURFACE[e.predicate]} {_np_text(by_id[e.to_node])}"
        )
        mentioned.add(e.from_node)
        mentioned.add(e.to_node)
    for n in graph.nodes:
        if n.node_id not in mentioned:
            clauses.append(_np_text(n))
    return " and ".join(clauses)


def graphs_equivalent(a: QueryGraph, b: QueryGraph) -> bool:
    """Structural equality modulo node renumbering and raw text."""

    def canonical(g: QueryGraph):
        key = {n.node_id: n.attribute_key for n in g.nodes}
        return (
            tuple(sorted(key.values())),
            tuple(sorted((key[e.from_node], e.predicate.value, key[e.to_node]) for e in g.edges)),
        )

    return canonical(a) == canonical(b)
