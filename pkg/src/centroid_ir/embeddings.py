"""Word-embedding storage plus corpus IDF statistics.

The store maps tokens to rows of a dense float32 matrix, loaded from a
plain-text embedding file, and optionally carries per-token inverse
document frequencies computed over a tokenized corpus:

    idf(w) = ln(n_docs / df(w))

with df(w) the number of documents containing w at least once.  Since
df >= 1 for every token that was observed, idf is always finite and
non-negative; tokens never observed in the corpus default to
ln(n_docs), the value a df = 1 token would get.
"""

from __future__ import annotations

import math
from typing import Iterable, Iterator

import numpy as np

from .errors import DimensionMismatch, ParseError, StateError
from .text import TokenizedText


class EmbeddingStore:
    """Vocabulary -> dense vector lookups, with optional IDF scores."""

    def __init__(
        self,
        vocab: dict[str, int],
        matrix: np.ndarray,
        idf: dict[str, float] | None = None,
        n_docs: int | None = None,
    ):
        if matrix.ndim != 2:
            raise ValueError("embedding matrix must be 2-dimensional")
        if len(vocab) != matrix.shape[0]:
            raise ValueError("vocab size does not match matrix rows")
        self.vocab = vocab
        self.matrix = np.ascontiguousarray(matrix, dtype=np.float32)
        self.idf = idf
        self.n_docs = n_docs

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, token: str) -> bool:
        return token in self.vocab

    def vector(self, token: str) -> np.ndarray | None:
        """The embedding row for ``token``, or None if out of vocabulary."""
        row = self.vocab.get(token)
        return None if row is None else self.matrix[row]

    def set_idf(self, idf: dict[str, float], n_docs: int) -> None:
        self.idf = dict(idf)
        self.n_docs = int(n_docs)

    def compute_idf(self, docs: Iterable[TokenizedText]) -> dict[str, float]:
        """Compute and attach IDF scores by streaming ``docs`` once."""
        counted = _CountingIterator(docs)
        idf = compute_idf(counted)
        self.set_idf(idf, counted.count)
        return idf

    def idf_of(self, token: str) -> float:
        """Stored IDF, or the df = 1 ceiling ln(n_docs) for unseen tokens."""
        if self.idf is None:
            raise StateError("IDF scores have not been computed or loaded")
        value = self.idf.get(token)
        if value is not None:
            return value
        if not self.n_docs:
            return 0.0
        return math.log(self.n_docs)


class _CountingIterator:
    """Wraps an iterable and remembers how many items were consumed."""

    def __init__(self, items: Iterable):
        self._items = iter(items)
        self.count = 0

    def __iter__(self) -> Iterator:
        for item in self._items:
            self.count += 1
            yield item


def document_frequencies(docs: Iterable[TokenizedText]) -> tuple[dict[str, int], int]:
    """Count, per token, the number of documents containing it.

    Each document contributes its distinct tokens once.  Returns the df
    map and the number of documents consumed.
    """
    df: dict[str, int] = {}
    n_docs = 0
    for doc in docs:
        n_docs += 1
        tokens = doc.tf.keys() if isinstance(doc, TokenizedText) else set(doc)
        for token in tokens:
            df[token] = df.get(token, 0) + 1
    return df, n_docs


def compute_idf(docs: Iterable[TokenizedText], n_docs: int | None = None) -> dict[str, float]:
    """idf(w) = ln(n_docs / df(w)) over a stream of tokenized documents.

    ``n_docs``, when given, must equal the number of streamed documents.
    An empty stream yields an empty map.
    """
    df, counted = document_frequencies(docs)
    if n_docs is not None and n_docs != counted:
        raise ValueError(f"n_docs={n_docs} but {counted} documents were streamed")
    if counted == 0:
        return {}
    return {token: math.log(counted / n) for token, n in df.items()}


def load_embeddings(path) -> EmbeddingStore:
    """Parse a text embedding file into an :class:`EmbeddingStore`.

    Format: optional first header line ``V D`` (two integers), then one
    line per word: the token followed by D decimal floats, whitespace
    separated.  The dimension is taken from the header or inferred from
    the first vector line; later occurrences of a word win.
    """
    vectors: dict[str, np.ndarray] = {}
    dim: int | None = None
    first_data_line = True
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            fields = line.split()
            if not fields:
                continue
            if first_data_line and len(fields) == 2 and _both_ints(fields):
                dim = int(fields[1])
                first_data_line = False
                continue
            first_data_line = False
            if len(fields) < 2:
                raise ParseError("expected a token followed by vector components",
                                 line_no=line_no, path=path)
            token, components = fields[0], fields[1:]
            if dim is None:
                dim = len(components)
            elif len(components) != dim:
                raise DimensionMismatch(
                    f"{path}: line {line_no}: expected {dim} components, got {len(components)}"
                )
            try:
                vec = np.array([float(c) for c in components], dtype=np.float32)
            except ValueError:
                raise ParseError("vector component is not a number",
                                 line_no=line_no, path=path) from None
            if not np.all(np.isfinite(vec)):
                raise ParseError("vector component is not finite",
                                 line_no=line_no, path=path)
            vectors[token] = vec
    if dim is None:
        raise ParseError("embedding file contains no header and no vectors", path=path)
    vocab = {token: row for row, token in enumerate(vectors)}
    if vectors:
        matrix = np.vstack(list(vectors.values()))
    else:
        matrix = np.zeros((0, dim), dtype=np.float32)
    return EmbeddingStore(vocab, matrix)


def _both_ints(fields: list[str]) -> bool:
    try:
        int(fields[0]), int(fields[1])
    except ValueError:
        return False
    return True


def save_idf(path, idf: dict[str, float], n_docs: int) -> None:
    """Write an IDF file: ``#ndocs=N`` header, then ``token<TAB>idf`` lines.

    Values are written with repr so a reload is bit-exact; tokens are
    sorted so repeated saves are byte-identical.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#ndocs={int(n_docs)}\n")
        for token in sorted(idf):
            fh.write(f"{token}\t{idf[token]!r}\n")


def load_idf(path) -> tuple[dict[str, float], int]:
    """Read an IDF file written by :func:`save_idf`."""
    idf: dict[str, float] = {}
    n_docs: int | None = None
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("#ndocs="):
                    try:
                        n_docs = int(line[len("#ndocs="):])
                    except ValueError:
                        raise ParseError("bad #ndocs header", line_no=line_no, path=path) from None
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError("expected token<TAB>idf", line_no=line_no, path=path)
            try:
                idf[parts[0]] = float(parts[1])
            except ValueError:
                raise ParseError("idf value is not a number", line_no=line_no, path=path) from None
    if n_docs is None:
        raise ParseError("missing #ndocs header", path=path)
    return idf, n_docs
