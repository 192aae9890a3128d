"""Pre-computed linguistic layers: tokens, constituency trees, discourse, embeddings.

All layers are ingested from plain-text files produced offline by external
NLP tooling; this module only parses, validates, and aligns them.

File formats:
  tokens     TSV ``sentence_idx\\ttoken_idx\\tstart\\tend\\tsurface``
  trees      one bracketed tree per line, node syntax ``(LABEL|s=k child ...)``
             where the optional ``|s=k`` suffix carries a sentiment score 1..5
  discourse  pipe-delimited ``kind|sense|a..b|c..d|e..f`` (connective span optional)
  embeddings text lines ``word v1 ... v_dim``
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AlignmentError, IntegrityError, StandoffParseError
from .corpus import EauSpan


@dataclass(frozen=True)
class Token:
    doc_id: str
    sentence_idx: int
    token_idx: int
    start: int
    end: int
    surface: str


@dataclass(frozen=True)
class TreeNode:
    """A constituency tree node; leaves carry the token surface as label."""

    label: str
    children: tuple["TreeNode", ...]
    token_start: int
    token_end: int
    sentiment: Optional[int] = None
    is_leaf: bool = False

    @property
    def token_range(self) -> tuple[int, int]:
        return (self.token_start, self.token_end)

    def iter_nodes(self):
        yield self
        for child in self.children:
            yield from child.iter_nodes()

    def leaves(self) -> list["TreeNode"]:
        return [n for n in self.iter_nodes() if n.is_leaf]


@dataclass(frozen=True)
class ConstTree:
    doc_id: str
    sentence_idx: int
    root: TreeNode

    @property
    def has_sentiment(self) -> bool:
        return any(n.sentiment is not None for n in self.root.iter_nodes())


@dataclass(frozen=True)
class DiscourseRelation:
    doc_id: str
    kind: str  # Explicit | Implicit
    sense: str
    arg1: tuple[int, int]
    arg2: tuple[int, int]
    connective: Optional[tuple[int, int]] = None


@dataclass
class EmbeddingTable:
    dimension: int
    entries: dict[str, np.ndarray]

    def lookup(self, word: str) -> np.ndarray:
        """Absent words map to the zero vector."""
        vec = self.entries.get(word)
        if vec is None:
            return np.zeros(self.dimension)
        return vec


@dataclass(frozen=True)
class EauAlignment:
    eau_id: str
    covering_sentence_idxs: tuple[int, ...]
    eau_tokens: tuple[Token, ...]
    context_tokens: tuple[Token, ...]


def parse_token_offsets(tsv, document_text: str, doc_id: str = "doc") -> list[Token]:
    """Parse and validate the token-offset TSV against the document text."""
    if isinstance(tsv, bytes):
        tsv = tsv.decode("utf-8")
    tokens: list[Token] = []
    prev_key = None
    prev_end_in_sentence = -1
    for line_no, line in enumerate(tsv.split("\n"), start=1):
        if not line.strip():
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 5:
            raise StandoffParseError(f"expected 5 columns, got {len(parts)}", line_no)
        try:
            sent_idx, tok_idx, start, end = (int(p) for p in parts[:4])
        except ValueError:
            raise StandoffParseError(f"non-integer field in {line!r}", line_no)
        surface = parts[4]
        key = (sent_idx, tok_idx)
        if prev_key is not None and key <= prev_key:
            raise IntegrityError(
                f"{doc_id}: tokens out of order at sentence {sent_idx} token {tok_idx}"
            )
        if prev_key is not None and sent_idx == prev_key[0] and start < prev_end_in_sentence:
            raise IntegrityError(
                f"{doc_id}: overlapping tokens at sentence {sent_idx} token {tok_idx}"
            )
        if document_text[start:end] != surface:
            raise IntegrityError(
                f"{doc_id}: token surface mismatch at sentence {sent_idx} token "
                f"{tok_idx}: {surface!r} vs {document_text[start:end]!r}"
            )
        prev_key = key
        prev_end_in_sentence = end
        tokens.append(Token(doc_id, sent_idx, tok_idx, start, end, surface))
    return tokens


_LABEL_SENT_RE = re.compile(r"^(.*?)\|s=(\d)$")

# Bracket escapes used by common treebank tooling.
_LEAF_ESCAPES = {"-LRB-": "(", "-RRB-": ")", "-LSB-": "[", "-RSB-": "]"}


def _tokenize_sexpr(line: str) -> list[str]:
    return re.findall(r"\(|\)|[^\s()]+", line)


def parse_bracketed_tree(
    line: str, tokens_of_sentence: list[Token], doc_id: str = "doc", sentence_idx: int = 0
) -> ConstTree:
    """Parse one bracketed tree line and align its leaves to the sentence tokens."""
    items = _tokenize_sexpr(line)
    pos = 0
    leaf_counter = [0]

    def parse_node() -> TreeNode:
        nonlocal pos
        if pos >= len(items):
            raise StandoffParseError("unbalanced brackets: unexpected end of line")
        item = items[pos]
        if item == "(":
            pos += 1
            if pos >= len(items) or items[pos] in ("(", ")"):
                raise StandoffParseError("expected node label after '('")
            raw_label = items[pos]
            pos += 1
            m = _LABEL_SENT_RE.match(raw_label)
            if m:
                label, sentiment = m.group(1), int(m.group(2))
                if not 1 <= sentiment <= 5:
                    raise StandoffParseError(f"sentiment score out of range: {sentiment}")
            else:
                label, sentiment = raw_label, None
            children = []
            while pos < len(items) and items[pos] != ")":
                children.append(parse_node())
            if pos >= len(items):
                raise StandoffParseError("unbalanced brackets: missing ')'")
            pos += 1  # consume ')'
            if not children:
                raise StandoffParseError(f"node {label!r} has no children")
            return TreeNode(
                label=label,
                children=tuple(children),
                token_start=children[0].token_start,
                token_end=children[-1].token_end,
                sentiment=sentiment,
            )
        if item == ")":
            raise StandoffParseError("unbalanced brackets: unexpected ')'")
        # terminal
        pos += 1
        idx = leaf_counter[0]
        leaf_counter[0] += 1
        return TreeNode(
            label=item, children=(), token_start=idx, token_end=idx + 1, is_leaf=True
        )

    root = parse_node()
    if pos != len(items):
        raise StandoffParseError("unbalanced brackets: trailing material")

    leaves = root.leaves()
    if len(leaves) != len(tokens_of_sentence):
        raise AlignmentError(
            f"{doc_id} sentence {sentence_idx}: tree has {len(leaves)} leaves "
            f"but the sentence has {len(tokens_of_sentence)} tokens"
        )
    for leaf, token in zip(leaves, tokens_of_sentence):
        surface = _LEAF_ESCAPES.get(leaf.label, leaf.label)
        if surface != token.surface:
            raise AlignmentError(
                f"{doc_id} sentence {sentence_idx}: leaf {surface!r} does not "
                f"match token {token.surface!r}"
            )
    return ConstTree(doc_id=doc_id, sentence_idx=sentence_idx, root=root)


def parse_trees_file(
    content, tokens: list[Token], doc_id: str = "doc"
) -> dict[int, ConstTree]:
    """Parse a one-tree-per-line file; line order follows sentence order."""
    if isinstance(content, bytes):
        content = content.decode("utf-8")
    by_sentence: dict[int, list[Token]] = {}
    for token in tokens:
        by_sentence.setdefault(token.sentence_idx, []).append(token)
    lines = [ln for ln in content.split("\n") if ln.strip()]
    sentence_idxs = sorted(by_sentence)
    if len(lines) != len(sentence_idxs):
        raise AlignmentError(
            f"{doc_id}: {len(lines)} trees for {len(sentence_idxs)} sentences"
        )
    trees = {}
    for sent_idx, line in zip(sentence_idxs, lines):
        trees[sent_idx] = parse_bracketed_tree(
            line, by_sentence[sent_idx], doc_id=doc_id, sentence_idx=sent_idx
        )
    return trees


_SPAN_PART_RE = re.compile(r"^(\d+)\.\.(\d+)$")


def parse_discourse_file(
    content, doc_length: int, doc_id: str = "doc"
) -> list[DiscourseRelation]:
    """Parse the pipe-delimited discourse relation file."""
    if isinstance(content, bytes):
        content = content.decode("utf-8")

    def parse_span(part: str, line_no: int) -> tuple[int, int]:
        m = _SPAN_PART_RE.match(part)
        if not m:
            raise StandoffParseError(f"malformed span {part!r}", line_no)
        start, end = int(m.group(1)), int(m.group(2))
        if not (0 <= start <= end <= doc_length):
            raise StandoffParseError(
                f"span {part!r} outside document bounds [0,{doc_length})", line_no
            )
        return (start, end)

    relations = []
    for line_no, line in enumerate(content.split("\n"), start=1):
        if not line.strip():
            continue
        parts = line.rstrip("\n").split("|")
        if len(parts) != 5:
            raise StandoffParseError(f"expected 5 fields, got {len(parts)}", line_no)
        kind, sense = parts[0], parts[1]
        if kind not in ("Explicit", "Implicit"):
            raise StandoffParseError(f"unknown relation kind {kind!r}", line_no)
        arg1 = parse_span(parts[2], line_no)
        arg2 = parse_span(parts[3], line_no)
        connective = parse_span(parts[4], line_no) if parts[4] else None
        relations.append(DiscourseRelation(doc_id, kind, sense, arg1, arg2, connective))
    return relations


def load_embeddings(content, dim: int) -> EmbeddingTable:
    """Load a word-vector text file; duplicate words keep the last entry."""
    if isinstance(content, bytes):
        content = content.decode("utf-8")
    entries: dict[str, np.ndarray] = {}
    for line_no, line in enumerate(content.split("\n"), start=1):
        if not line.strip():
            continue
        parts = line.rstrip("\n").split(" ")
        if len(parts) != dim + 1:
            raise StandoffParseError(
                f"expected {dim} vector components, got {len(parts) - 1}", line_no
            )
        try:
            vec = np.array([float(v) for v in parts[1:]])
        except ValueError:
            raise StandoffParseError(f"non-numeric vector component in {line!r}", line_no)
        entries[parts[0]] = vec
    return EmbeddingTable(dimension=dim, entries=entries)


def align_eau(eau: EauSpan, tokens: list[Token]) -> EauAlignment:
    """Partition the covering sentence(s) into EAU tokens and context tokens.

    A token belongs to the EAU if its character span overlaps the EAU span
    by at least one character.
    """
    eau_tokens = [
        t for t in tokens if t.start < eau.end and t.end > eau.start and t.end > t.start
    ]
    if not eau_tokens:
        raise AlignmentError(f"EAU {eau.id} overlaps no tokens")
    covering = sorted({t.sentence_idx for t in eau_tokens})
    eau_ids = {(t.sentence_idx, t.token_idx) for t in eau_tokens}
    context_tokens = [
        t
        for t in tokens
        if t.sentence_idx in covering and (t.sentence_idx, t.token_idx) not in eau_ids
    ]
    return EauAlignment(
        eau_id=eau.id,
        covering_sentence_idxs=tuple(covering),
        eau_tokens=tuple(sorted(eau_tokens, key=lambda t: (t.sentence_idx, t.token_idx))),
        context_tokens=tuple(
            sorted(context_tokens, key=lambda t: (t.sentence_idx, t.token_idx))
        ),
    )
