"""Command-line entry point for batch retrieval experiments.

Subcommands: build-index, search, rerank, hybrid, evaluate, idf.
Options may also come from a ``key = value`` config file (``--config``),
with command-line flags taking precedence.  Logs go to stderr, data to
files or stdout.  Exit codes: 0 ok, 2 missing input, 3 data error,
4 run/qrels mismatch.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

from . import embeddings as emb
from . import evaluation as ev
from .corpus import iter_corpus, load_corpus
from .errors import ConfigMismatch, EngineError, EvaluationError, ParseError
from .index import (DEFAULT_LEAF_CAP, DEFAULT_SEED, DEFAULT_TREES,
                    load_index, save_index)
from .retrieval import (DEFAULT_K, build_corpus_index, hybrid, load_questions,
                        rerank, retrieve)
from .runs import read_run, write_run
from .rwmd import SCORERS
from .text import default_stopwords, load_stopwords, tokenize


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _read_config(path) -> dict[str, str]:
    """Parse a minimal key = value config file; '#' starts a comment."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ParseError("expected key = value", line_no=line_no, path=path)
            values[key.strip().replace("-", "_")] = value.strip().strip("\"'")
    return values


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


class _Command:
    """Argparse wrapper that layers defaults < config file < flags."""

    def __init__(self, subparsers, name: str, help_text: str):
        self.parser = subparsers.add_parser(name, help=help_text)
        self.defaults: dict[str, object] = {}
        self.types: dict[str, object] = {}
        self.parser.add_argument("--config", default=argparse.SUPPRESS,
                                 help="key = value config file; flags win")

    def opt(self, flag: str, *, type=str, default=None, required=False,
            choices=None, help=None, is_flag=False):
        dest = flag.lstrip("-").replace("-", "_")
        if is_flag:
            self.parser.add_argument(flag, action="store_true",
                                     default=argparse.SUPPRESS, help=help)
            self.types[dest] = _parse_bool
            self.defaults[dest] = bool(default)
        else:
            self.parser.add_argument(flag, type=type, default=argparse.SUPPRESS,
                                     choices=choices, help=help)
            self.types[dest] = type
            self.defaults[dest] = default
        if required:
            self.defaults[dest] = _REQUIRED
        return self

    def resolve(self, args: argparse.Namespace) -> argparse.Namespace:
        given = vars(args)
        config = _read_config(given["config"]) if "config" in given else {}
        merged = dict(self.defaults)
        for key, raw in config.items():
            if key not in self.defaults:
                raise ParseError(f"unknown config key {key!r}")
            merged[key] = self.types[key](raw)
        for key, value in given.items():
            merged[key] = value
        missing = [k for k, v in merged.items() if v is _REQUIRED]
        if missing:
            flags = ", ".join("--" + k.replace("_", "-") for k in sorted(missing))
            self.parser.error(f"missing required options: {flags}")
        return argparse.Namespace(**merged)


_REQUIRED = object()


def _load_stopword_set(ns):
    if getattr(ns, "stopwords", None):
        return load_stopwords(ns.stopwords)
    return default_stopwords()


def _default_threads() -> int:
    return os.cpu_count() or 1


def _meta_path(index_path) -> str:
    return f"{index_path}.meta.json"


# -- subcommand handlers -----------------------------------------------------


def cmd_build_index(ns) -> int:
    t0 = time.perf_counter()
    store = emb.load_embeddings(ns.embeddings)
    stopwords = _load_stopword_set(ns)
    idf_file = ns.idf_file
    if ns.mode == "centidf":
        if idf_file:
            store.set_idf(*emb.load_idf(idf_file))
        elif not ns.compute_idf:
            raise ConfigMismatch("mode centidf needs --compute-idf or --idf-file")
    documents = list(iter_corpus(ns.corpus))
    index = build_corpus_index(documents, store, mode=ns.mode, stopwords=stopwords,
                               compute_idf=(ns.mode == "centidf" and not idf_file
                                            and ns.compute_idf))
    if ns.engine == "ann":
        index.build_forest(n_trees=ns.trees, leaf_cap=ns.leaf_cap, seed=ns.seed)
    if ns.mode == "centidf" and not idf_file:
        idf_file = ns.idf_out or f"{ns.out}.idf"
        emb.save_idf(idf_file, store.idf, store.n_docs)
    save_index(index, ns.out)
    meta = {"mode": ns.mode, "idf_file": idf_file, "k_default": DEFAULT_K}
    with open(_meta_path(ns.out), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, sort_keys=True)
        fh.write("\n")
    elapsed = time.perf_counter() - t0
    _log(f"indexed {index.n_docs} documents (dim={index.dim}, trees={index.n_trees}) "
         f"in {elapsed:.2f} s")
    return 0


def _load_index_with_meta(ns):
    index = load_index(ns.index)
    meta = {}
    meta_path = _meta_path(ns.index)
    if os.path.exists(meta_path):
        with open(meta_path, encoding="utf-8") as fh:
            meta = json.load(fh)
    index.mode = meta.get("mode")
    return index, meta


def cmd_search(ns) -> int:
    index, meta = _load_index_with_meta(ns)
    mode = ns.mode or index.mode or "centidf"
    engine = ns.engine or ("ann" if index.n_trees else "exact")
    store = emb.load_embeddings(ns.embeddings)
    if mode == "centidf":
        idf_file = ns.idf_file or meta.get("idf_file")
        if not idf_file:
            raise ConfigMismatch("centidf search needs --idf-file (none recorded "
                                 "alongside the index)")
        store.set_idf(*emb.load_idf(idf_file))
    stopwords = _load_stopword_set(ns)
    questions = load_questions(ns.questions)

    t0 = time.perf_counter()
    run = retrieve(questions, index, store, mode=mode, engine=engine, k=ns.k,
                   search_k=ns.search_k, stopwords=stopwords, threads=ns.threads)
    t_search = time.perf_counter() - t0

    t_rerank = 0.0
    if ns.rerank != "none":
        documents = load_corpus(ns.corpus) if ns.corpus else None
        if documents is None:
            raise ConfigMismatch("--rerank needs --corpus for document texts")
        t0 = time.perf_counter()
        run = rerank(run, questions, documents, store, method=ns.rerank,
                     stopwords=stopwords, depth=ns.rerank_depth, threads=ns.threads)
        t_rerank = time.perf_counter() - t0

    write_run(run, ns.out)
    _log(f"search: {t_search:.3f} s")
    _log(f"rerank: {t_rerank:.3f} s")
    _log(f"wrote {sum(len(v) for v in run.per_question.values())} entries "
         f"({len(run.per_question)} questions) to {ns.out} [tag {run.tag}]")
    return 0


def cmd_rerank(ns) -> int:
    store = emb.load_embeddings(ns.embeddings)
    stopwords = _load_stopword_set(ns)
    run = read_run(ns.run)
    questions = load_questions(ns.questions)
    documents = load_corpus(ns.corpus)
    t0 = time.perf_counter()
    out = rerank(run, questions, documents, store, method=ns.method,
                 stopwords=stopwords, depth=ns.rerank_depth, threads=ns.threads)
    _log(f"rerank: {time.perf_counter() - t0:.3f} s")
    write_run(out, ns.out)
    return 0


def cmd_hybrid(ns) -> int:
    combined = hybrid(read_run(ns.primary), read_run(ns.fallback))
    write_run(combined, ns.out)
    return 0


def cmd_evaluate(ns) -> int:
    run = read_run(ns.run)
    qrels = ev.read_qrels(ns.qrels)
    k_list = [int(k) for k in str(ns.ndcg_k).split(",") if k.strip()]
    report = ev.evaluate(run, qrels, k_list=k_list, map_depth=ns.map_depth)
    if ns.json == "-":
        sys.stdout.write(ev.report_to_json(report))
    else:
        if ns.json:
            with open(ns.json, "w", encoding="utf-8") as fh:
                fh.write(ev.report_to_json(report))
        sys.stdout.write(ev.report_table(report))
    return 0


def cmd_idf(ns) -> int:
    stopwords = _load_stopword_set(ns)
    docs = (tokenize(record.text, stopwords) for record in iter_corpus(ns.corpus))
    df, n_docs = emb.document_frequencies(docs)
    idf = {token: math.log(n_docs / n) for token, n in df.items()} if n_docs else {}
    emb.save_idf(ns.out, idf, n_docs)
    _log(f"idf over {n_docs} documents, {len(idf)} tokens -> {ns.out}")
    return 0


# -- parser wiring ------------------------------------------------------------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="centroid-ir",
        description="Centroid-based document retrieval, reranking, and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands: dict[str, tuple[_Command, object]] = {}

    c = _Command(sub, "build-index", "tokenize a corpus, centroid it, build the index")
    c.opt("--embeddings", required=True, help="text embedding file")
    c.opt("--corpus", required=True, help="JSON-lines corpus (id/title/abstract)")
    c.opt("--out", required=True, help="output index file")
    c.opt("--mode", default="centidf", choices=["cent", "centidf"])
    c.opt("--engine", default="ann", choices=["exact", "ann"])
    c.opt("--trees", type=int, default=DEFAULT_TREES)
    c.opt("--leaf-cap", type=int, default=DEFAULT_LEAF_CAP)
    c.opt("--seed", type=int, default=DEFAULT_SEED)
    c.opt("--compute-idf", is_flag=True, help="compute IDF from this corpus")
    c.opt("--idf-file", help="reuse IDF scores from this file")
    c.opt("--idf-out", help="where to write computed IDF (default: OUT.idf)")
    c.opt("--stopwords", help="stop-word file (default: bundled list)")
    commands["build-index"] = (c, cmd_build_index)

    c = _Command(sub, "search", "retrieve top-k per question, optionally rerank")
    c.opt("--index", required=True)
    c.opt("--embeddings", required=True)
    c.opt("--questions", required=True, help="JSON-lines questions (id/text)")
    c.opt("--out", required=True, help="output TREC run file")
    c.opt("--mode", choices=["cent", "centidf"], help="default: recorded with index")
    c.opt("--engine", choices=["exact", "ann"], help="default: ann when a forest exists")
    c.opt("--k", type=int, default=DEFAULT_K)
    c.opt("--search-k", type=int, help="candidate budget (default 10*trees*k)")
    c.opt("--rerank", default="none", choices=["none", *sorted(SCORERS)])
    c.opt("--rerank-depth", type=int, help="rerank only the top so-many documents")
    c.opt("--corpus", help="corpus file, needed when reranking")
    c.opt("--idf-file", help="IDF file for centidf (default: recorded with index)")
    c.opt("--stopwords")
    c.opt("--threads", type=int, default=_default_threads())
    commands["search"] = (c, cmd_search)

    c = _Command(sub, "rerank", "rerank an existing run file by relaxed WMD")
    c.opt("--run", required=True)
    c.opt("--questions", required=True)
    c.opt("--corpus", required=True)
    c.opt("--embeddings", required=True)
    c.opt("--out", required=True)
    c.opt("--method", default="rwmd_q", choices=sorted(SCORERS))
    c.opt("--rerank-depth", type=int)
    c.opt("--stopwords")
    c.opt("--threads", type=int, default=_default_threads())
    commands["rerank"] = (c, cmd_rerank)

    c = _Command(sub, "hybrid", "fall back to a second run where the first is empty")
    c.opt("--primary", required=True)
    c.opt("--fallback", required=True)
    c.opt("--out", required=True)
    commands["hybrid"] = (c, cmd_hybrid)

    c = _Command(sub, "evaluate", "score a run against qrels")
    c.opt("--run", required=True)
    c.opt("--qrels", required=True)
    c.opt("--ndcg-k", default="20,100", help="comma-separated nDCG depths")
    c.opt("--map-depth", type=int, help="truncate rankings for AP only")
    c.opt("--json", help="write the JSON report here ('-' for stdout)")
    commands["evaluate"] = (c, cmd_evaluate)

    c = _Command(sub, "idf", "compute corpus IDF scores into a file")
    c.opt("--corpus", required=True)
    c.opt("--out", required=True)
    c.opt("--stopwords")
    commands["idf"] = (c, cmd_idf)

    return parser, commands


def main(argv=None) -> int:
    parser, commands = _build_parser()
    args = parser.parse_args(argv)
    command, handler = commands[args.command]
    try:
        ns = command.resolve(args)
        return handler(ns)
    except FileNotFoundError as exc:
        _log(f"error: missing input file: {exc.filename or exc}")
        return 2
    except EvaluationError as exc:
        _log(f"error: {exc}")
        return 4
    except (EngineError, EOFError, ValueError) as exc:
        _log(f"error: {exc}")
        return 3


if __name__ == "__main__":
    sys.exit(main())
