"""Reading CoNLL-U parses into validated dependency trees."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .errors import HeadOutOfRangeError, MalformedLineError, NonTreeError

CONLLU_FIELDS = 10

_RANGE_ID = re.compile(r"\d+-\d+$")   # multiword-token rows, e.g. "3-4"
_EMPTY_ID = re.compile(r"\d+\.\d+$")  # empty nodes, e.g. "5.1"


@dataclass(frozen=True)
class Token:
    """One word of a parsed sentence. ``head`` is 1-based; 0 marks the root."""

    index: int
    form: str
    head: int
    deprel: str


@dataclass(frozen=True)
class DepTree:
    """A sentence whose head links form a single-rooted tree.

    Build instances through :func:`make_tree`, which checks the invariants.
    """

    tokens: tuple[Token, ...]

    @property
    def n(self) -> int:
        return len(self.tokens)

    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]

    def heads(self) -> list[int]:
        return [t.head for t in self.tokens]

    def deprels(self) -> list[str]:
        return [t.deprel for t in self.tokens]

    def adjacency(self) -> list[list[int]]:
        """Undirected neighbour lists over head links, 1-based; entry 0 is unused."""
        adj: list[list[int]] = [[] for _ in range(self.n + 1)]
        for t in self.tokens:
            if t.head != 0:
                adj[t.index].append(t.head)
                adj[t.head].append(t.index)
        return adj


def make_tree(tokens: Sequence[Token]) -> DepTree:
    """Build a :class:`DepTree`, verifying the head links actually form a tree."""
    n = len(tokens)
    if n == 0:
        raise NonTreeError("empty sentence")
    roots = []
    for pos, tok in enumerate(tokens, start=1):
        if tok.index != pos:
            raise MalformedLineError(
                f"token ids not consecutive: expected {pos}, found {tok.index}")
        if tok.head < 0 or tok.head > n:
            raise HeadOutOfRangeError(f"token {pos}: head {tok.head} outside [0, {n}]")
        if tok.head == tok.index:
            raise HeadOutOfRangeError(f"token {pos} is its own head")
        if tok.head == 0:
            roots.append(pos)
    if len(roots) != 1:
        raise NonTreeError(f"expected exactly one root, found {len(roots)}")
    tree = DepTree(tuple(tokens))
    # Every non-root token contributes exactly one edge, so there are n-1
    # edges; full reachability from the root is then equivalent to a tree.
    adj = tree.adjacency()
    seen = [False] * (n + 1)
    seen[roots[0]] = True
    stack = [roots[0]]
    reached = 0
    while stack:
        v = stack.pop()
        reached += 1
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                stack.append(w)
    if reached != n:
        raise NonTreeError(f"disconnected head links: reached {reached} of {n} tokens")
    return tree


def parse_conllu(text: str) -> list[DepTree]:
    """Parse CoNLL-U text into one validated tree per sentence block."""
    return [tree for tree, _ in parse_conllu_blocks(text)]


def parse_conllu_blocks(text: str) -> list[tuple[DepTree, dict[str, str]]]:
    """Like :func:`parse_conllu` but keeps ``# key = value`` comment metadata.

    Multiword-token ranges and empty nodes are skipped; both LF and CRLF
    line endings are accepted.
    """
    out: list[tuple[DepTree, dict[str, str]]] = []
    tokens: list[Token] = []
    meta: dict[str, str] = {}

    def flush() -> None:
        nonlocal tokens, meta
        if tokens:
            out.append((make_tree(tokens), meta))
            tokens, meta = [], {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep:
                meta[key.strip()] = value.strip()
            continue
        fields = line.split("\t")
        if len(fields) != CONLLU_FIELDS:
            raise MalformedLineError(
                f"line {lineno}: expected {CONLLU_FIELDS} tab-separated fields, "
                f"got {len(fields)}")
        tid = fields[0]
        if not tid.isdigit():
            if _RANGE_ID.match(tid) or _EMPTY_ID.match(tid):
                continue
            raise MalformedLineError(f"line {lineno}: bad token id {tid!r}")
        try:
            head = int(fields[6])
        except ValueError:
            raise MalformedLineError(
                f"line {lineno}: HEAD field {fields[6]!r} is not an integer") from None
        tokens.append(Token(index=int(tid), form=fields[1], head=head, deprel=fields[7]))
    flush()
    return out


def read_conllu(path: str) -> list[DepTree]:
    with open(path, encoding="utf-8") as fh:
        return parse_conllu(fh.read())
