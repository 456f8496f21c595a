"""Per-token distances to the aspect span: tree path length, plus the plain
word-offset baseline it is meant to improve on."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .conllu import DepTree
from .errors import IndexOutOfRangeError, PadTooSmallError

DEFAULT_CLAMP = 30


@dataclass(frozen=True)
class PositionVector:
    """Distance of every token to the aspect span, clamped to ``clamp``.

    Aspect tokens have distance 0 and nothing else does. When mapped to
    embedding rows, index ``clamp + 1`` is reserved for padding.
    """

    dists: tuple[int, ...]
    clamp: int = DEFAULT_CLAMP

    @property
    def n(self) -> int:
        return len(self.dists)

    @property
    def pad_index(self) -> int:
        return self.clamp + 1


def _check_token_index(tree: DepTree, i: int) -> None:
    if not 1 <= i <= tree.n:
        raise IndexOutOfRangeError(f"token index {i} outside 1..{tree.n}")


def _check_span(n: int, span: tuple[int, int]) -> None:
    s, e = span
    if not (1 <= s <= e <= n):
        raise IndexOutOfRangeError(f"span [{s}, {e}] outside tokens 1..{n}")


def _distances_from(adj: list[list[int]], n: int, source: int) -> list[int]:
    """BFS levels from ``source``; exact on trees, one pass per source."""
    dist = [-1] * (n + 1)
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def tree_distance(tree: DepTree, i: int, j: int) -> int:
    """Number of edges on the unique path between tokens ``i`` and ``j``,
    treating head links as undirected."""
    _check_token_index(tree, i)
    _check_token_index(tree, j)
    if i == j:
        return 0
    return _distances_from(tree.adjacency(), tree.n, i)[j]


def position_vector(tree: DepTree, aspect_span: tuple[int, int],
                    clamp: int = DEFAULT_CLAMP) -> PositionVector:
    """Minimum tree distance from every token to any aspect token, clamped.

    Aspect tokens get 0; their direct tree neighbours get 1.
    """
    _check_span(tree.n, aspect_span)
    if clamp < 1:
        raise IndexOutOfRangeError(f"clamp must be >= 1, got {clamp}")
    adj = tree.adjacency()
    s, e = aspect_span
    best: list[int] | None = None
    for a in range(s, e + 1):
        d = _distances_from(adj, tree.n, a)
        best = d if best is None else [min(x, y) for x, y in zip(best, d)]
    assert best is not None
    dists = tuple(min(best[k], clamp) for k in range(1, tree.n + 1))
    return PositionVector(dists=dists, clamp=clamp)


def word_offset_vector(n: int, aspect_span: tuple[int, int],
                       clamp: int = DEFAULT_CLAMP) -> PositionVector:
    """Baseline: linear token distance to the nearest span boundary."""
    _check_span(n, aspect_span)
    if clamp < 1:
        raise IndexOutOfRangeError(f"clamp must be >= 1, got {clamp}")
    s, e = aspect_span
    dists = []
    for k in range(1, n + 1):
        if s <= k <= e:
            d = 0
        elif k < s:
            d = s - k
        else:
            d = k - e
        dists.append(min(d, clamp))
    return PositionVector(dists=tuple(dists), clamp=clamp)


def to_embedding_indices(pv: PositionVector, pad_to: int | None = None) -> np.ndarray:
    """Distance values as embedding row indices, right-padded with the
    reserved PAD row ``clamp + 1``."""
    n = pv.n
    if pad_to is None:
        pad_to = n
    if pad_to < n:
        raise PadTooSmallError(f"pad_to {pad_to} shorter than sentence length {n}")
    out = np.full(pad_to, pv.pad_index, dtype=np.int64)
    out[:n] = pv.dists
    return out
