"""End-to-end retrieval pipelines over questions and a centroid index.

The building blocks compose into the named systems:

* ``retrieve`` with mode "cent" or "centidf" and engine "exact" or "ann"
  covers plain centroid retrieval and its forest-approximated variant.
* ``rerank`` reorders any run by a relaxed word-mover distance
  (rwmd_q / rwmd_d / rwmd_max), e.g. centidf + rwmd_q reranking, or an
  imported external baseline run + rwmd_q.
* ``hybrid`` combines two runs: a question falls back to the second
  run's list exactly when the first run returned nothing for it.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .centroids import centroid_idf, centroid_simple
from .corpus import DocumentRecord
from .embeddings import EmbeddingStore
from .errors import ConfigMismatch, DuplicateId, ParseError, UnknownIds
from .index import CentroidIndex, build_exact
from .runs import RankedRun, read_run
from .rwmd import SCORERS, embed_text
from .text import TokenizedText, default_stopwords, tokenize

DEFAULT_K = 1000

MODES = ("cent", "centidf")
ENGINES = ("exact", "ann")


@dataclass(frozen=True)
class Question:
    qid: str
    text: str


def load_questions(path) -> list[Question]:
    """Read questions from a JSON-lines file with fields ``id`` and ``text``."""
    questions: list[Question] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", line_no=line_no, path=path) from None
            if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
                raise ParseError("question object needs 'id' and 'text' fields",
                                 line_no=line_no, path=path)
            qid = str(obj["id"])
            if qid in seen:
                raise DuplicateId(f"duplicate question id {qid!r} in {path}")
            seen.add(qid)
            questions.append(Question(qid=qid, text=str(obj["text"])))
    return questions


def _map_questions(fn: Callable, items: Sequence, threads: int) -> list:
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _centroid_fn(mode: str):
    if mode == "cent":
        return centroid_simple
    if mode == "centidf":
        return centroid_idf
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def retrieve(
    questions: Iterable[Question],
    index: CentroidIndex,
    store: EmbeddingStore,
    mode: str = "centidf",
    engine: str = "exact",
    k: int = DEFAULT_K,
    search_k: int | None = None,
    stopwords: frozenset[str] | None = None,
    threads: int = 1,
) -> RankedRun:
    """Tokenize each question, take its centroid, and fetch the top k.

    A question whose centroid is zero (all tokens out of vocabulary or
    stop words) gets an empty list rather than an arbitrary ranking.
    Raises :class:`ConfigMismatch` when the index records a centroid
    mode other than the one requested.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    make_centroid = _centroid_fn(mode)
    if index.mode is not None and index.mode != mode:
        raise ConfigMismatch(
            f"index was built with {index.mode!r} centroids, queried with {mode!r}")
    if stopwords is None:
        stopwords = default_stopwords()
    questions = list(questions)
    _check_unique_qids(questions)

    def one(question: Question) -> list[tuple[str, float]]:
        cent = make_centroid(tokenize(question.text, stopwords), store)
        if cent.is_zero:
            return []
        if engine == "ann":
            return index.ann_topk(cent, k, search_k=search_k)
        return index.exact_topk(cent, k)

    results = _map_questions(one, questions, threads)
    per_question = {q.qid: hits for q, hits in zip(questions, results)}
    return RankedRun(tag=f"{mode}-{engine}", per_question=per_question)


def _check_unique_qids(questions: Sequence[Question]) -> None:
    seen: set[str] = set()
    for q in questions:
        if q.qid in seen:
            raise DuplicateId(f"duplicate question id {q.qid!r} in batch")
        seen.add(q.qid)


def rerank(
    run: RankedRun,
    questions,
    documents: Mapping[str, DocumentRecord],
    store: EmbeddingStore,
    method: str = "rwmd_q",
    stopwords: frozenset[str] | None = None,
    depth: int | None = None,
    threads: int = 1,
) -> RankedRun:
    """Reorder each question's documents by ascending relaxed WMD.

    The document set per question is preserved exactly; only the order
    and the scores change (scores become distances).  ``depth`` limits
    reranking to the top so-many documents, leaving the tail in its
    original order behind them.  Ties break by ascending doc_id; texts
    with no in-vocabulary tokens score +inf and sink to the bottom.
    """
    scorer = SCORERS.get(method)
    if scorer is None:
        raise ValueError(f"unknown rerank method {method!r}; expected one of {sorted(SCORERS)}")
    if stopwords is None:
        stopwords = default_stopwords()
    question_texts = _as_question_map(questions)

    active_qids = [qid for qid, entries in run.per_question.items() if entries]
    missing_q = [qid for qid in active_qids if qid not in question_texts]
    if missing_q:
        raise UnknownIds("run references questions not provided to rerank", missing_q)
    missing_d = {
        doc_id
        for qid in active_qids
        for doc_id, _ in run.per_question[qid]
        if doc_id not in documents
    }
    if missing_d:
        raise UnknownIds("run references documents missing from the corpus", missing_d)

    doc_cache: dict[str, object] = {}

    def embedded_doc(doc_id: str):
        cached = doc_cache.get(doc_id)
        if cached is None:
            record = documents[doc_id]
            cached = embed_text(tokenize(record.text, stopwords), store)
            doc_cache[doc_id] = cached
        return cached

    def one(qid: str) -> tuple[str, list[tuple[str, float]]]:
        entries = run.per_question[qid]
        if not entries:
            return qid, []
        q_emb = embed_text(tokenize(question_texts[qid], stopwords), store)
        head = entries if depth is None else entries[:depth]
        tail = entries if depth is None else entries[depth:]
        scored = [(scorer(q_emb, embedded_doc(doc_id)), doc_id) for doc_id, _ in head]
        scored.sort()
        reranked = [(doc_id, score) for score, doc_id in scored]
        if depth is not None:
            reranked += tail
        return qid, reranked

    qids = list(run.per_question)
    results = _map_questions(one, qids, threads)
    per_question = dict(results)
    suffix = method.replace("_", "")
    tag = f"{run.tag}-{suffix}" if run.tag else suffix
    return RankedRun(tag=tag, per_question=per_question)


def _as_question_map(questions) -> dict[str, str]:
    if isinstance(questions, Mapping):
        return {str(qid): getattr(q, "text", q) for qid, q in questions.items()}
    return {q.qid: q.text for q in questions}


def hybrid(primary_run: RankedRun, fallback_run: RankedRun) -> RankedRun:
    """Primary's list per question, falling back when primary is empty.

    The qid set is the union of both runs; a question never mixes
    documents from the two inputs.
    """
    per_question: dict[str, list[tuple[str, float]]] = {}
    for qid, entries in primary_run.per_question.items():
        per_question[qid] = list(entries) if entries else list(
            fallback_run.per_question.get(qid, []))
    for qid, entries in fallback_run.per_question.items():
        if qid not in per_question:
            per_question[qid] = list(entries)
    return RankedRun(tag="hybrid", per_question=per_question)


def import_external_run(path, tag: str | None = None) -> RankedRun:
    """Ingest a baseline engine's results from a TREC run file."""
    return read_run(path, tag=tag)


def build_corpus_index(
    documents: Iterable[DocumentRecord],
    store: EmbeddingStore,
    mode: str = "centidf",
    stopwords: frozenset[str] | None = None,
    compute_idf: bool = False,
) -> CentroidIndex:
    """Tokenize a corpus, centroid every document, and index the result.

    With ``compute_idf`` the store's IDF table is (re)computed from this
    corpus before the centroids are taken; otherwise the store must
    already carry IDF scores when mode is "centidf".
    """
    make_centroid = _centroid_fn(mode)
    if stopwords is None:
        stopwords = default_stopwords()
    records = list(documents)
    ids = [record.id for record in records]
    tokenized: list[TokenizedText] = [tokenize(record.text, stopwords) for record in records]
    if compute_idf:
        store.compute_idf(iter(tokenized))
    centroids = [make_centroid(text, store) for text in tokenized]
    index = build_exact(list(zip(ids, centroids)))
    index.mode = mode
    return index
