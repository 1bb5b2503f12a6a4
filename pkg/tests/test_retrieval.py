import numpy as np
import pytest

from centroid_ir import (ConfigMismatch, DocumentRecord, DuplicateId,
                         Question, RankedRun, StateError, UnknownIds,
                         build_corpus_index, hybrid, rerank, retrieve)
from conftest import make_store, random_store

STOP = frozenset({"the", "of", "and"})


@pytest.fixture
def toy():
    store = make_store({
        "alpha": [1.0, 0.0],
        "beta": [0.0, 1.0],
        "gamma": [0.7, 0.7],
    })
    store.set_idf({"alpha": 1.0, "beta": 1.0, "gamma": 0.5}, n_docs=2)
    docs = {
        "da": DocumentRecord(id="da", title="alpha notes", abstract="alpha alpha"),
        "db": DocumentRecord(id="db", title="beta overview", abstract="beta beta"),
    }
    index = build_corpus_index(docs.values(), store, mode="cent", stopwords=STOP)
    return store, docs, index


class TestRetrieve:
    def test_shared_token_ranks_first(self, toy):
        store, docs, index = toy
        run = retrieve([Question("q1", "alpha research")], index, store,
                       mode="cent", engine="exact", k=10, stopwords=STOP)
        hits = run["q1"]
        assert [doc for doc, _ in hits] == ["da", "db"]
        assert hits[0][1] > hits[1][1]

    def test_stopword_question_empty(self, toy):
        store, docs, index = toy
        run = retrieve([Question("q1", "the of and")], index, store,
                       mode="cent", engine="exact", stopwords=STOP)
        assert run["q1"] == []

    def test_ann_with_full_budget_matches_exact(self, toy):
        store, docs, index = toy
        index.build_forest(n_trees=3, leaf_cap=4, seed=1)
        questions = [Question("q1", "alpha beta"), Question("q2", "gamma")]
        exact = retrieve(questions, index, store, mode="cent", engine="exact",
                         stopwords=STOP)
        approx = retrieve(questions, index, store, mode="cent", engine="ann",
                          search_k=10, stopwords=STOP)
        assert approx.per_question == exact.per_question

    def test_mode_mismatch_rejected(self, toy):
        store, docs, index = toy
        with pytest.raises(ConfigMismatch):
            retrieve([Question("q1", "alpha")], index, store, mode="centidf",
                     stopwords=STOP)

    def test_centidf_needs_idf(self, toy):
        store, docs, _ = toy
        bare = make_store({"alpha": [1.0, 0.0]})
        index = build_corpus_index(
            docs.values(), store, mode="centidf", stopwords=STOP)
        with pytest.raises(StateError):
            retrieve([Question("q1", "alpha")], index, bare, mode="centidf",
                     stopwords=STOP)

    def test_duplicate_qids_rejected(self, toy):
        store, docs, index = toy
        with pytest.raises(DuplicateId):
            retrieve([Question("q1", "alpha"), Question("q1", "beta")],
                     index, store, mode="cent", stopwords=STOP)

    def test_tag_encodes_mode_engine(self, toy):
        store, docs, index = toy
        run = retrieve([Question("q1", "alpha")], index, store, mode="cent",
                       engine="exact", stopwords=STOP)
        assert run.tag == "cent-exact"

    def test_k_limits_results(self, toy):
        store, docs, index = toy
        run = retrieve([Question("q1", "alpha beta")], index, store,
                       mode="cent", engine="exact", k=1, stopwords=STOP)
        assert len(run["q1"]) == 1

    def test_threads_match_serial(self, toy):
        store, docs, index = toy
        questions = [Question(f"q{i}", text) for i, text in
                     enumerate(["alpha", "beta", "gamma", "alpha beta"])]
        serial = retrieve(questions, index, store, mode="cent", stopwords=STOP)
        threaded = retrieve(questions, index, store, mode="cent",
                            stopwords=STOP, threads=4)
        assert serial.per_question == threaded.per_question


class TestRerank:
    def test_moves_matching_doc_first(self, toy):
        store, docs, _ = toy
        run = RankedRun(tag="x", per_question={"q1": [("db", 0.9), ("da", 0.8)]})
        out = rerank(run, {"q1": "alpha"}, docs, store, method="rwmd_q",
                     stopwords=STOP)
        assert [doc for doc, _ in out["q1"]] == ["da", "db"]
        assert out["q1"][0][1] == 0.0  # rwmd_q distance, not similarity

    def test_single_doc_unchanged(self, toy):
        store, docs, _ = toy
        run = RankedRun(tag="x", per_question={"q1": [("db", 0.9)]})
        out = rerank(run, {"q1": "alpha"}, docs, store, stopwords=STOP)
        assert [doc for doc, _ in out["q1"]] == ["db"]

    def test_empty_list_passes_through(self, toy):
        store, docs, _ = toy
        run = RankedRun(tag="x", per_question={"q1": []})
        out = rerank(run, {}, docs, store, stopwords=STOP)
        assert out["q1"] == []

    def test_multiset_preserved(self, toy):
        store, docs, _ = toy
        rng = np.random.default_rng(61)
        rstore = random_store(rng, 50, 6)
        rdocs = {}
        words = list(rstore.vocab)
        for i in range(30):
            body = " ".join(rng.choice(words, size=rng.integers(1, 12)))
            rdocs[f"d{i:02d}"] = DocumentRecord(id=f"d{i:02d}", title="", abstract=body)
        questions = {}
        per_question = {}
        for qi in range(10):
            qid = f"q{qi}"
            questions[qid] = " ".join(rng.choice(words, size=3))
            picks = rng.choice(30, size=rng.integers(1, 10), replace=False)
            per_question[qid] = [(f"d{p:02d}", float(rng.normal())) for p in picks]
        run = RankedRun(tag="rand", per_question=per_question)
        for method in ("rwmd_q", "rwmd_d", "rwmd_max"):
            out = rerank(run, questions, rdocs, rstore, method=method, stopwords=STOP)
            for qid in per_question:
                assert sorted(d for d, _ in out[qid]) == sorted(d for d, _ in per_question[qid])

    def test_oov_document_sinks_to_bottom(self, toy):
        store, docs, _ = toy
        all_docs = dict(docs)
        all_docs["dx"] = DocumentRecord(id="dx", title="zzz", abstract="qqq www")
        run = RankedRun(tag="x", per_question={"q1": [("dx", 0.99), ("da", 0.1)]})
        out = rerank(run, {"q1": "alpha"}, all_docs, store, stopwords=STOP)
        assert [doc for doc, _ in out["q1"]] == ["da", "dx"]
        assert out["q1"][1][1] == float("inf")

    def test_unresolvable_doc_listed(self, toy):
        store, docs, _ = toy
        run = RankedRun(tag="x", per_question={"q1": [("ghost", 1.0), ("da", 0.5)]})
        with pytest.raises(UnknownIds) as info:
            rerank(run, {"q1": "alpha"}, docs, store, stopwords=STOP)
        assert "ghost" in str(info.value)

    def test_missing_question_listed(self, toy):
        store, docs, _ = toy
        run = RankedRun(tag="x", per_question={"q9": [("da", 0.5)]})
        with pytest.raises(UnknownIds):
            rerank(run, {"q1": "alpha"}, docs, store, stopwords=STOP)

    def test_depth_limits_reranking(self, toy):
        store, docs, _ = toy
        all_docs = dict(docs)
        all_docs["dc"] = DocumentRecord(id="dc", title="alpha", abstract="alpha")
        run = RankedRun(tag="x", per_question={
            "q1": [("db", 0.9), ("da", 0.8), ("dc", 0.7)]})
        out = rerank(run, {"q1": "alpha"}, all_docs, store, method="rwmd_q",
                     stopwords=STOP, depth=2)
        # Only the top-2 get reordered; dc stays last despite matching.
        assert [doc for doc, _ in out["q1"]] == ["da", "db", "dc"]

    def test_tag_suffix(self, toy):
        store, docs, _ = toy
        run = RankedRun(tag="centidf-ann", per_question={"q1": [("da", 1.0)]})
        out = rerank(run, {"q1": "alpha"}, docs, store, method="rwmd_q",
                     stopwords=STOP)
        assert out.tag == "centidf-ann-rwmdq"

    def test_question_objects_accepted(self, toy):
        store, docs, _ = toy
        run = RankedRun(tag="x", per_question={"q1": [("da", 1.0)]})
        out = rerank(run, [Question("q1", "alpha")], docs, store, stopwords=STOP)
        assert out["q1"] == [("da", 0.0)]


class TestHybrid:
    def test_fallback_on_empty_primary(self):
        primary = RankedRun(tag="p", per_question={"q1": []})
        fallback = RankedRun(tag="f", per_question={"q1": [("d5", 1.0), ("d2", 0.5)]})
        out = hybrid(primary, fallback)
        assert out["q1"] == [("d5", 1.0), ("d2", 0.5)]
        assert out.tag == "hybrid"

    def test_primary_wins_when_non_empty(self):
        primary = RankedRun(tag="p", per_question={"q2": [("d1", 1.0)]})
        fallback = RankedRun(tag="f", per_question={"q2": [("d9", 9.0)]})
        assert hybrid(primary, fallback)["q2"] == [("d1", 1.0)]

    def test_both_empty(self):
        out = hybrid(RankedRun(per_question={"q1": []}),
                     RankedRun(per_question={"q1": []}))
        assert out["q1"] == []

    def test_idempotent_and_identity(self):
        x = RankedRun(tag="x", per_question={"q1": [("d1", 1.0)], "q2": []})
        y = RankedRun(tag="y", per_question={"q1": [("d2", 2.0)], "q2": [("d3", 1.0)]})
        assert hybrid(x, x).per_question == x.per_question
        empty = RankedRun(per_question={qid: [] for qid in y.per_question})
        assert hybrid(empty, y).per_question == y.per_question

    def test_union_of_qids(self):
        primary = RankedRun(tag="p", per_question={"q1": [("d1", 1.0)]})
        fallback = RankedRun(tag="f", per_question={"q2": [("d2", 1.0)]})
        out = hybrid(primary, fallback)
        assert set(out.per_question) == {"q1", "q2"}

    def test_never_mixes_within_question(self):
        rng = np.random.default_rng(62)
        docs = [f"d{i}" for i in range(20)]
        for _ in range(30):
            def random_run():
                per_question = {}
                for qid in ("q1", "q2", "q3"):
                    n = int(rng.integers(0, 6))
                    picks = rng.choice(docs, size=n, replace=False)
                    per_question[qid] = [(d, float(rng.normal())) for d in picks]
                return RankedRun(tag="r", per_question=per_question)
            a, b = random_run(), random_run()
            out = hybrid(a, b)
            for qid, entries in out.per_question.items():
                assert entries == a.per_question.get(qid) or \
                       entries == b.per_question.get(qid, [])


class TestBuildCorpusIndex:
    def test_mode_recorded(self, toy):
        store, docs, index = toy
        assert index.mode == "cent"

    def test_compute_idf_attaches_scores(self):
        store = make_store({"alpha": [1.0, 0.0], "beta": [0.0, 1.0]})
        docs = [
            DocumentRecord(id="d1", title="alpha", abstract="alpha beta"),
            DocumentRecord(id="d2", title="beta", abstract="beta"),
        ]
        index = build_corpus_index(docs, store, mode="centidf", stopwords=STOP,
                                   compute_idf=True)
        assert store.n_docs == 2
        assert store.idf_of("alpha") > store.idf_of("beta")
        assert index.mode == "centidf"

    def test_all_stopword_doc_gets_zero_row(self):
        store = make_store({"alpha": [1.0, 0.0]})
        docs = [
            DocumentRecord(id="d1", title="the of", abstract="and the"),
            DocumentRecord(id="d2", title="alpha", abstract=""),
        ]
        index = build_corpus_index(docs, store, mode="cent", stopwords=STOP)
        assert np.all(index.unit_matrix[0] == 0.0)
        assert np.allclose(index.unit_matrix[1], [1.0, 0.0])
