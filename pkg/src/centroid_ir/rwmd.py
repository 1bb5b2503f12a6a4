"""Relaxed Word Mover's Distance between two embedded texts.

The exact Word Mover's Distance solves a transport problem; dropping one
side's constraints yields a relaxation that sends every word of one text
to its single nearest word in the other:

    rwmd_q(q, d) = sum over w in q of  min over w' in d of  ||w - w'||
    rwmd_d(q, d) = sum over w' in d of min over w in q of   ||w - w'||
    rwmd_max     = max(rwmd_q, rwmd_d)

Distances are Euclidean over the word embedding vectors.  Duplicated
tokens contribute once per occurrence.  An empty side is pushed to the
bottom of any reranking: the directed sum over an empty source is 0, and
against an empty target it is +inf.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingStore
from .errors import DimensionMismatch
from .text import TokenizedText


@dataclass(frozen=True)
class EmbeddedText:
    """In-vocabulary tokens of a text, in order, with their vectors.

    ``matrix`` has one row per token occurrence (duplicates preserved),
    shape (n, dim); out-of-vocabulary tokens are absent entirely.
    """

    tokens: tuple[str, ...]
    matrix: np.ndarray

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]


def embed_text(text: TokenizedText, store: EmbeddingStore) -> EmbeddedText:
    """Keep the in-vocabulary tokens of ``text`` and gather their vectors."""
    kept: list[str] = []
    rows: list[int] = []
    for token in text.tokens:
        row = store.vocab.get(token)
        if row is not None:
            kept.append(token)
            rows.append(row)
    if rows:
        matrix = store.matrix[rows].astype(np.float64)
    else:
        matrix = np.zeros((0, store.dim), dtype=np.float64)
    return EmbeddedText(tokens=tuple(kept), matrix=matrix)


def _check_dims(a: EmbeddedText, b: EmbeddedText) -> None:
    if a.dim != b.dim:
        raise DimensionMismatch(f"embedded texts of dimension {a.dim} and {b.dim}")


def _directed_sum(src: EmbeddedText, dst: EmbeddedText) -> float:
    """Sum over src tokens of the Euclidean distance to the nearest dst token."""
    if len(src) == 0:
        return 0.0
    if len(dst) == 0:
        return float("inf")
    # Squared distances via the Gram expansion; one sqrt per row minimum.
    s2 = np.einsum("ij,ij->i", src.matrix, src.matrix)
    d2 = np.einsum("ij,ij->i", dst.matrix, dst.matrix)
    sq = s2[:, None] + d2[None, :] - 2.0 * (src.matrix @ dst.matrix.T)
    # A token present on both sides has true distance exactly 0; pin it
    # so cancellation noise from the expansion cannot leak in.
    dst_pos = {token: i for i, token in enumerate(dst.tokens)}
    for i, token in enumerate(src.tokens):
        j = dst_pos.get(token)
        if j is not None:
            sq[i, j] = 0.0
    mins = np.maximum(sq.min(axis=1), 0.0)
    return float(np.sqrt(mins).sum())


def rwmd_q(q: EmbeddedText, d: EmbeddedText) -> float:
    """Query-relaxed WMD: each query word travels to its nearest document word."""
    _check_dims(q, d)
    return _directed_sum(q, d)


def rwmd_d(q: EmbeddedText, d: EmbeddedText) -> float:
    """Document-relaxed WMD: each document word travels to its nearest query word."""
    _check_dims(q, d)
    return _directed_sum(d, q)


def rwmd_max(q: EmbeddedText, d: EmbeddedText) -> float:
    """The tighter of the two relaxations."""
    return max(rwmd_q(q, d), rwmd_d(q, d))


SCORERS = {"rwmd_q": rwmd_q, "rwmd_d": rwmd_d, "rwmd_max": rwmd_max}
