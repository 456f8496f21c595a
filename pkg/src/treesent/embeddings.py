"""Lookup tables feeding the encoder: word vectors and distance vectors."""

from __future__ import annotations

import logging
from typing import Iterable, Sequence

import numpy as np

from .nn.ops import Param

logger = logging.getLogger(__name__)

PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"
PAD_INDEX = 0
UNK_INDEX = 1


class EmbeddingTable:
    """Token-to-row lookup with reserved PAD and UNK rows; lookups lowercase.

    The PAD row is zero and never receives gradient (padded steps are skipped
    by the encoder), so it stays zero through training. Unknown forms map to
    the UNK row, which trains like any other row.
    """

    def __init__(self, vocab: Sequence[str], weights: Param):
        if len(vocab) < 2 or vocab[PAD_INDEX] != PAD_TOKEN or vocab[UNK_INDEX] != UNK_TOKEN:
            raise ValueError("vocab must start with the reserved PAD and UNK entries")
        if weights.value.shape[0] != len(vocab):
            raise ValueError(
                f"{len(vocab)} vocab entries but {weights.value.shape[0]} rows")
        self.vocab = list(vocab)
        self.weights = weights
        self._index = {form: i for i, form in enumerate(self.vocab)}

    @property
    def dim(self) -> int:
        return self.weights.value.shape[1]

    @property
    def size(self) -> int:
        return self.weights.value.shape[0]

    def index(self, form: str) -> int:
        return self._index.get(form.lower(), UNK_INDEX)

    def indices(self, forms: Iterable[str]) -> np.ndarray:
        return np.array([self.index(f) for f in forms], dtype=np.int64)

    def vector(self, form: str) -> np.ndarray:
        return self.weights.value[self.index(form)]

    @classmethod
    def build(cls, forms: Iterable[str], dim: int, rng: np.random.Generator,
              scale: float = 0.08) -> "EmbeddingTable":
        """Vocabulary from the given forms, lowercased and sorted for determinism."""
        vocab = [PAD_TOKEN, UNK_TOKEN] + sorted({f.lower() for f in forms})
        weights = Param.uniform(rng, (len(vocab), dim), scale)
        weights.value[PAD_INDEX] = 0.0
        return cls(vocab, weights)

    def apply_pretrained(self, vectors: dict[str, np.ndarray]) -> int:
        """Overwrite rows whose form appears in ``vectors``; returns the hit count."""
        hits = 0
        for i, form in enumerate(self.vocab):
            if i == PAD_INDEX:
                continue
            vec = vectors.get(form)
            if vec is None:
                continue
            if vec.shape != (self.dim,):
                raise ValueError(
                    f"vector for {form!r} has dim {vec.shape}, table expects ({self.dim},)")
            self.weights.value[i] = vec
            hits += 1
        return hits


def read_text_vectors(path: str) -> dict[str, np.ndarray]:
    """Read whitespace-separated word vectors (GloVe text or word2vec text).

    A leading "count dim" header line is skipped when present. Words are
    lowercased; the first occurrence wins.
    """
    vectors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            parts = line.rstrip("\n").split(" ")
            if lineno == 0 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue
            if len(parts) < 2:
                continue
            word = parts[0].lower()
            vec = np.asarray([float(x) for x in parts[1:]], dtype=np.float64)
            vectors.setdefault(word, vec)
    logger.info("read %d vectors from %s", len(vectors), path)
    return vectors


class PositionTable:
    """Trainable embedding per clamped distance value, plus one PAD row.

    Rows 0..max_distance hold the distances, row max_distance + 1 the PAD,
    so there are max_distance + 2 rows in total.
    """

    def __init__(self, max_distance: int, weights: Param):
        if weights.value.shape[0] != max_distance + 2:
            raise ValueError(
                f"need {max_distance + 2} rows for distances 0..{max_distance} "
                f"plus PAD, got {weights.value.shape[0]}")
        self.max_distance = max_distance
        self.weights = weights

    @property
    def dim(self) -> int:
        return self.weights.value.shape[1]

    @property
    def pad_index(self) -> int:
        return self.max_distance + 1

    @classmethod
    def create(cls, max_distance: int, dim: int, rng: np.random.Generator,
               scale: float = 0.08) -> "PositionTable":
        weights = Param.uniform(rng, (max_distance + 2, dim), scale)
        weights.value[max_distance + 1] = 0.0  # PAD row; masked out of attention
        return cls(max_distance, weights)
