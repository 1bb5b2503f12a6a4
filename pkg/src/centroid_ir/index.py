"""Exact and forest-approximated top-k cosine retrieval over document centroids.

Documents live in an N x D matrix of L2-normalized centroids, so cosine
similarity is a plain dot product.  Exact retrieval scans the matrix; the
approximate path searches a forest of random-hyperplane partition trees:

* Each tree splits its points recursively.  A split picks two distinct
  points uniformly at random and cuts along their perpendicular bisector
  (normal = normalized difference, offset = normal . midpoint); points with
  ``normal . x - offset >= 0`` go right.  Recursion stops at ``leaf_cap``
  points, or when random picks keep landing on duplicate points.
* A query walks all trees at once through one shared best-first queue
  keyed by hyperplane margin, collects distinct candidate rows until the
  ``search_k`` budget is met, then scores the candidates by exact cosine.
  Approximation therefore affects which documents are considered, never
  the score a returned document gets.

Everything is deterministic: the split sampler is seeded per
(seed, tree, node path), and ties in the final ranking break by ascending
document id.
"""

from __future__ import annotations

import heapq
import struct
import threading
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DuplicateId, IndexFormatError, StateError

MAGIC = b"CRVI"
VERSION = 1

DEFAULT_TREES = 100
DEFAULT_LEAF_CAP = 32
DEFAULT_SEED = 42

# One initial pick plus three retries before a duplicate-point node
# becomes a forced (possibly oversized) leaf.
_PICK_ATTEMPTS = 4


@dataclass
class Tree:
    """One partition tree, flattened into arrays.

    ``children[i]`` holds encoded refs: ``ref >= 0`` is an internal node
    id, ``ref < 0`` is leaf ``-ref - 1``.  Leaf ``j`` owns
    ``leaf_items[leaf_bounds[j]:leaf_bounds[j + 1]]``.  The leaves of a
    tree partition the row indices 0..N-1 exactly.
    """

    normals: np.ndarray      # (n_internal, dim) float32, unit length
    offsets: np.ndarray      # (n_internal,) float32
    children: np.ndarray     # (n_internal, 2) int32: [left, right]
    leaf_bounds: np.ndarray  # (n_leaves + 1,) int64
    leaf_items: np.ndarray   # (N,) int32
    root: int

    @property
    def n_internal(self) -> int:
        return self.normals.shape[0]

    @property
    def n_leaves(self) -> int:
        return self.leaf_bounds.shape[0] - 1

    def leaf(self, leaf_id: int) -> np.ndarray:
        return self.leaf_items[self.leaf_bounds[leaf_id]:self.leaf_bounds[leaf_id + 1]]

    def equals(self, other: "Tree") -> bool:
        return (
            self.root == other.root
            and np.array_equal(self.normals, other.normals)
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.children, other.children)
            and np.array_equal(self.leaf_bounds, other.leaf_bounds)
            and np.array_equal(self.leaf_items, other.leaf_items)
        )


class CentroidIndex:
    """Normalized document-centroid matrix plus an optional tree forest.

    ``mode`` records which centroid variant ("cent" or "centidf") the
    rows were built from; it lives only in memory, the on-disk format
    does not carry it.
    """

    def __init__(self, doc_ids, unit_matrix: np.ndarray, forest: list[Tree] | None = None,
                 leaf_cap: int = DEFAULT_LEAF_CAP, seed: int = DEFAULT_SEED,
                 mode: str | None = None):
        self.doc_ids = np.asarray(doc_ids, dtype=np.str_)
        self.unit_matrix = np.ascontiguousarray(unit_matrix, dtype=np.float32)
        if self.unit_matrix.ndim != 2 or self.unit_matrix.shape[0] != self.doc_ids.shape[0]:
            raise ValueError("unit_matrix rows must match doc_ids")
        self.forest: list[Tree] = list(forest) if forest else []
        self.leaf_cap = int(leaf_cap)
        self.seed = int(seed)
        self.mode = mode
        self._scratch = threading.local()

    # -- construction -----------------------------------------------------

    @classmethod
    def from_matrix(cls, doc_ids, matrix: np.ndarray, mode: str | None = None) -> "CentroidIndex":
        """Normalize centroid rows to unit length and index them.

        Zero centroids are kept as zero rows; they score 0 against every
        query.  Duplicate document ids are rejected.
        """
        ids = np.asarray(doc_ids, dtype=np.str_)
        matrix = np.ascontiguousarray(matrix, dtype=np.float32)
        if matrix.ndim != 2:
            raise ValueError("centroid matrix must be 2-dimensional")
        if ids.shape[0] != matrix.shape[0]:
            raise ValueError("doc_ids and matrix rows differ in length")
        if ids.shape[0] >= 2**31:
            raise ValueError("index larger than supported (2^31 documents)")
        if np.unique(ids).shape[0] != ids.shape[0]:
            raise DuplicateId("duplicate document ids in index input")
        norms = np.sqrt(np.einsum("ij,ij->i", matrix, matrix, dtype=np.float64))
        safe = np.where(norms == 0.0, 1.0, norms).astype(np.float32)
        unit = matrix / safe[:, None]
        return cls(ids, unit, mode=mode)

    def build_forest(self, n_trees: int = DEFAULT_TREES, leaf_cap: int = DEFAULT_LEAF_CAP,
                     seed: int = DEFAULT_SEED) -> "CentroidIndex":
        """Grow ``n_trees`` partition trees over the indexed rows."""
        if self.n_docs == 0:
            raise StateError("cannot build a forest over an empty index")
        if n_trees < 1:
            raise ValueError("n_trees must be positive")
        if leaf_cap < 1:
            raise ValueError("leaf_cap must be positive")
        if not 0 <= seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        self.forest = [_build_tree(self.unit_matrix, t, seed, leaf_cap)
                       for t in range(n_trees)]
        self.leaf_cap = int(leaf_cap)
        self.seed = int(seed)
        return self

    # -- queries ----------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.unit_matrix.shape[1]

    @property
    def n_docs(self) -> int:
        return self.doc_ids.shape[0]

    @property
    def n_trees(self) -> int:
        return len(self.forest)

    def _unit_query(self, q) -> np.ndarray | None:
        """Normalize a query (Centroid or vector); None for a zero query."""
        vec = np.asarray(getattr(q, "vec", q), dtype=np.float64)
        if vec.shape != (self.dim,):
            raise DimensionMismatch(f"query of shape {vec.shape} against dim {self.dim}")
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            return None
        return (vec / norm).astype(np.float32)

    def exact_topk(self, q, k: int) -> list[tuple[str, float]]:
        """The k documents with the highest cosine against ``q``.

        Ties break by ascending document id; a zero query or k <= 0
        yields an empty list; fewer than k documents yields all of them.
        """
        if k <= 0 or self.n_docs == 0:
            return []
        qv = self._unit_query(q)
        if qv is None:
            return []
        scores = self.unit_matrix @ qv
        return self._rank(scores, None, k)

    def ann_topk(self, q, k: int, search_k: int | None = None) -> list[tuple[str, float]]:
        """Approximate top-k: forest-selected candidates, exact cosine scores.

        ``search_k`` is the candidate budget and defaults to
        10 * n_trees * k.  A budget of at least N examines every
        document and therefore matches :meth:`exact_topk` exactly.
        """
        if not self.forest:
            raise StateError("index has no forest; call build_forest or use exact_topk")
        if k <= 0 or self.n_docs == 0:
            return []
        qv = self._unit_query(q)
        if qv is None:
            return []
        if search_k is None:
            search_k = 10 * self.n_trees * k
        if search_k >= self.n_docs:
            scores = self.unit_matrix @ qv
            return self._rank(scores, None, k)
        cands = self._candidates(qv, search_k)
        if cands.size == 0:
            return []
        cands.sort()  # ascending rows gather much faster from a large matrix
        scores = self.unit_matrix[cands] @ qv
        return self._rank(scores, cands, k)

    def _seen_buffer(self) -> np.ndarray:
        """Per-thread candidate-dedup mask, reset by the caller after use."""
        buf = getattr(self._scratch, "seen", None)
        if buf is None or buf.shape[0] != self.n_docs:
            buf = np.zeros(self.n_docs, dtype=bool)
            self._scratch.seen = buf
        return buf

    def _candidates(self, qv: np.ndarray, search_k: int) -> np.ndarray:
        """Best-first traversal of all trees through one shared queue.

        Queue priority is the smallest hyperplane margin crossed on the
        way down (roots start at +inf); leaves pop in order of how close
        the query sits to their region.  Collects distinct row indices
        until the budget is met or the queue empties.
        """
        normals = [tree.normals for tree in self.forest]
        offsets = [tree.offsets for tree in self.forest]
        children = [tree.children for tree in self.forest]
        bounds = [tree.leaf_bounds for tree in self.forest]
        items_of = [tree.leaf_items for tree in self.forest]
        heap: list[tuple[float, int, int, int]] = [
            (-np.inf, ti, ti, tree.root) for ti, tree in enumerate(self.forest)
        ]
        heapq.heapify(heap)
        counter = len(heap)
        pop, push = heapq.heappop, heapq.heappush
        seen = self._seen_buffer()
        chunks: list[np.ndarray] = []
        collected = 0
        try:
            while heap and collected < search_k:
                neg_pri, _, ti, ref = pop(heap)
                if ref < 0:
                    leaf = -ref - 1
                    b = bounds[ti]
                    items = items_of[ti][b[leaf]:b[leaf + 1]]
                    fresh = items[~seen[items]]
                    if fresh.size:
                        seen[fresh] = True
                        chunks.append(fresh)
                        collected += fresh.size
                else:
                    pri = -neg_pri
                    margin = float(normals[ti][ref] @ qv) - float(offsets[ti][ref])
                    left, right = children[ti][ref]
                    push(heap, (-min(pri, -margin), counter, ti, left))
                    push(heap, (-min(pri, margin), counter + 1, ti, right))
                    counter += 2
        finally:
            for chunk in chunks:
                seen[chunk] = False
        if not chunks:
            return np.empty(0, dtype=np.int32)
        return np.concatenate(chunks)

    def _rank(self, scores: np.ndarray, cand_rows: np.ndarray | None, k: int) -> list[tuple[str, float]]:
        """Top-k of ``scores`` as (doc_id, score), ties by ascending id."""
        m = scores.shape[0]
        kk = min(k, m)
        if kk < m:
            kth = np.partition(scores, m - kk)[m - kk]
            sel = np.flatnonzero(scores >= kth)
        else:
            sel = np.arange(m)
        sel_scores = scores[sel]
        rows = sel if cand_rows is None else cand_rows[sel]
        ids = self.doc_ids[rows]
        order = np.lexsort((ids, -sel_scores))[:kk]
        return [(str(ids[i]), float(sel_scores[i])) for i in order]

    # -- equality ----------------------------------------------------------

    def structural_eq(self, other: "CentroidIndex") -> bool:
        """Node-by-node equality of everything the index file persists."""
        return (
            self.dim == other.dim
            and self.leaf_cap == other.leaf_cap
            and self.seed == other.seed
            and np.array_equal(self.doc_ids, other.doc_ids)
            and np.array_equal(self.unit_matrix, other.unit_matrix)
            and len(self.forest) == len(other.forest)
            and all(a.equals(b) for a, b in zip(self.forest, other.forest))
        )


def build_exact(centroids) -> CentroidIndex:
    """Index a sequence of (doc_id, centroid) pairs, forest left empty.

    Centroid values may be :class:`~centroid_ir.centroids.Centroid`
    objects or plain vectors; all must share one dimension.
    """
    ids: list[str] = []
    vecs: list[np.ndarray] = []
    dim: int | None = None
    for doc_id, cent in centroids:
        vec = np.asarray(getattr(cent, "vec", cent), dtype=np.float64)
        if vec.ndim != 1:
            raise ValueError(f"centroid for {doc_id!r} is not a vector")
        if dim is None:
            dim = vec.shape[0]
        elif vec.shape[0] != dim:
            raise DimensionMismatch(
                f"centroid for {doc_id!r} has dim {vec.shape[0]}, expected {dim}")
        ids.append(str(doc_id))
        vecs.append(vec)
    if dim is None:
        dim = 0
    matrix = np.vstack(vecs) if vecs else np.zeros((0, dim), dtype=np.float32)
    return CentroidIndex.from_matrix(ids, matrix)


def _pick_pair(rng: np.random.Generator, X: np.ndarray, idx: np.ndarray):
    """Two distinct positions with non-identical vectors, or None."""
    n = idx.size
    for _ in range(_PICK_ATTEMPTS):
        i = int(rng.integers(n))
        j = int(rng.integers(n - 1))
        if j >= i:
            j += 1
        a = X[idx[i]]
        b = X[idx[j]]
        if not np.array_equal(a, b):
            return a, b
    return None


def _build_tree(X: np.ndarray, tree_id: int, seed: int, leaf_cap: int) -> Tree:
    """Grow one partition tree over all rows of ``X``.

    The sampler at each node is seeded from (seed, tree_id, node path),
    so the tree is a pure function of its inputs regardless of build
    order.  Node paths are encoded as ints with a marker bit: root 1,
    left child 2k, right child 2k + 1.
    """
    n_rows = X.shape[0]
    dim = X.shape[1]
    normals: list[np.ndarray] = []
    offsets: list[float] = []
    children: list[list[int]] = []
    leaf_chunks: list[np.ndarray] = []
    root_ref = 0
    stack: list[tuple[np.ndarray, int, int, int]] = [
        (np.arange(n_rows, dtype=np.int32), 1, -1, 0)
    ]
    while stack:
        idx, key, parent, side = stack.pop()
        ref = None
        if idx.size > leaf_cap:
            rng = np.random.default_rng(np.random.SeedSequence([seed, tree_id, key]))
            pair = _pick_pair(rng, X, idx)
            if pair is not None:
                a, b = pair
                diff = b.astype(np.float64) - a.astype(np.float64)
                normal = (diff / np.linalg.norm(diff)).astype(np.float32)
                mid = ((a.astype(np.float64) + b.astype(np.float64)) / 2.0).astype(np.float32)
                offset = np.float32(normal @ mid)
                sub = X if idx.size == n_rows else X[idx]
                go_right = (sub @ normal) >= offset
                right_idx = idx[go_right]
                left_idx = idx[~go_right]
                # Both picks land on opposite sides by construction, but
                # guard against a degenerate split all the same.
                if left_idx.size and right_idx.size:
                    nid = len(normals)
                    normals.append(normal)
                    offsets.append(float(offset))
                    children.append([0, 0])
                    stack.append((right_idx, key * 2 + 1, nid, 1))
                    stack.append((left_idx, key * 2, nid, 0))
                    ref = nid
        if ref is None:
            lid = len(leaf_chunks)
            leaf_chunks.append(np.ascontiguousarray(idx, dtype=np.int32))
            ref = -lid - 1
        if parent < 0:
            root_ref = ref
        else:
            children[parent][side] = ref
    sizes = np.array([c.size for c in leaf_chunks], dtype=np.int64)
    leaf_bounds = np.zeros(sizes.size + 1, dtype=np.int64)
    np.cumsum(sizes, out=leaf_bounds[1:])
    return Tree(
        normals=np.vstack(normals) if normals else np.zeros((0, dim), dtype=np.float32),
        offsets=np.asarray(offsets, dtype=np.float32),
        children=np.asarray(children, dtype=np.int32).reshape(-1, 2),
        leaf_bounds=leaf_bounds,
        leaf_items=np.concatenate(leaf_chunks) if leaf_chunks else np.empty(0, np.int32),
        root=root_ref,
    )


# -- persistence -----------------------------------------------------------

_HEADER = struct.Struct("<4sIIQIIQ")
_U32 = struct.Struct("<I")
_F32 = struct.Struct("<f")


def save_index(index: CentroidIndex, path) -> None:
    """Write the index in its binary file format (see module docs)."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, index.dim, index.n_docs,
                              index.n_trees, index.leaf_cap, index.seed))
        for doc_id in index.doc_ids:
            raw = str(doc_id).encode("utf-8")
            fh.write(_U32.pack(len(raw)))
            fh.write(raw)
        fh.write(np.ascontiguousarray(index.unit_matrix, dtype="<f4").tobytes())
        for tree in index.forest:
            fh.write(_serialize_tree(tree))


def _serialize_tree(tree: Tree) -> bytes:
    """Preorder node stream, left subtree before right."""
    parts: list[bytes] = []
    stack = [tree.root]
    while stack:
        ref = stack.pop()
        if ref >= 0:
            parts.append(b"\x00")
            parts.append(tree.normals[ref].astype("<f4").tobytes())
            parts.append(_F32.pack(float(tree.offsets[ref])))
            left, right = tree.children[ref]
            stack.append(int(right))
            stack.append(int(left))
        else:
            items = tree.leaf(-ref - 1)
            parts.append(b"\x01")
            parts.append(_U32.pack(items.size))
            parts.append(items.astype("<u4").tobytes())
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes, path):
        self.data = data
        self.off = 0
        self.path = path

    def take(self, n: int) -> bytes:
        end = self.off + n
        if end > len(self.data):
            raise EOFError(f"{self.path}: truncated index file")
        chunk = self.data[self.off:end]
        self.off = end
        return chunk


def load_index(path) -> CentroidIndex:
    """Read an index file; the byte-exact inverse of :func:`save_index`."""
    with open(path, "rb") as fh:
        reader = _Reader(fh.read(), path)
    magic, version, dim, n_docs, n_trees, leaf_cap, seed = _HEADER.unpack(
        reader.take(_HEADER.size))
    if magic != MAGIC:
        raise IndexFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise IndexFormatError(f"{path}: unsupported version {version}")
    doc_ids = []
    for _ in range(n_docs):
        (length,) = _U32.unpack(reader.take(_U32.size))
        doc_ids.append(reader.take(length).decode("utf-8"))
    matrix = np.frombuffer(reader.take(n_docs * dim * 4), dtype="<f4")
    matrix = matrix.reshape(n_docs, dim).copy()
    forest = [_parse_tree(reader, dim, n_docs, path) for _ in range(n_trees)]
    ids = np.asarray(doc_ids, dtype=np.str_) if doc_ids else np.empty(0, dtype=np.str_)
    return CentroidIndex(ids, matrix, forest=forest, leaf_cap=leaf_cap, seed=seed)


def _parse_tree(reader: _Reader, dim: int, n_docs: int, path) -> Tree:
    normals: list[np.ndarray] = []
    offsets: list[float] = []
    children: list[list[int]] = []
    leaf_chunks: list[np.ndarray] = []
    pending: list[tuple[int, int]] = []
    root = None
    while True:
        (tag,) = reader.take(1)
        if tag == 0:
            normal = np.frombuffer(reader.take(dim * 4), dtype="<f4").copy()
            (offset,) = _F32.unpack(reader.take(4))
            nid = len(normals)
            normals.append(normal)
            offsets.append(offset)
            children.append([0, 0])
            ref = nid
        elif tag == 1:
            (count,) = _U32.unpack(reader.take(_U32.size))
            items = np.frombuffer(reader.take(count * 4), dtype="<u4").astype(np.int32)
            lid = len(leaf_chunks)
            leaf_chunks.append(items)
            ref = -lid - 1
        else:
            raise IndexFormatError(f"{path}: bad node tag {tag}")
        if root is None:
            root = ref
        else:
            pid, side = pending.pop()
            children[pid][side] = ref
        if tag == 0:
            pending.append((nid, 1))
            pending.append((nid, 0))
        if not pending:
            break
    sizes = np.array([c.size for c in leaf_chunks], dtype=np.int64)
    if int(sizes.sum()) != n_docs:
        raise IndexFormatError(f"{path}: tree leaves hold {int(sizes.sum())} items, "
                               f"expected {n_docs}")
    leaf_bounds = np.zeros(sizes.size + 1, dtype=np.int64)
    np.cumsum(sizes, out=leaf_bounds[1:])
    return Tree(
        normals=np.vstack(normals) if normals else np.zeros((0, dim), dtype=np.float32),
        offsets=np.asarray(offsets, dtype=np.float32),
        children=np.asarray(children, dtype=np.int32).reshape(-1, 2),
        leaf_bounds=leaf_bounds,
        leaf_items=np.concatenate(leaf_chunks) if leaf_chunks else np.empty(0, np.int32),
        root=root if root is not None else -1,
    )
