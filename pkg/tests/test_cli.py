import json

import pytest

from centroid_ir.cli import main
from centroid_ir.index import load_index


@pytest.fixture
def workspace(tmp_path):
    """Embeddings, corpus, questions, and qrels for a tiny three-doc setup."""
    emb = tmp_path / "vectors.txt"
    emb.write_text(
        "4 2\n"
        "apoptosis 1.0 0.0\n"
        "kinase 0.0 1.0\n"
        "p53 0.9 0.1\n"
        "pathway 0.5 0.5\n"
    )
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text("\n".join([
        json.dumps({"id": "d1", "title": "p53 apoptosis", "abstract": "apoptosis pathway"}),
        json.dumps({"id": "d2", "title": "kinase pathway", "abstract": "kinase kinase"}),
        json.dumps({"id": "d3", "title": "pathway notes", "abstract": "pathway pathway"}),
    ]) + "\n")
    questions = tmp_path / "questions.jsonl"
    questions.write_text("\n".join([
        json.dumps({"id": "q1", "text": "What is the role of apoptosis?"}),
        json.dumps({"id": "q2", "text": "the of and"}),
    ]) + "\n")
    qrels = tmp_path / "qrels.txt"
    qrels.write_text("q1 0 d1 1\nq2 0 d2 1\n")
    return tmp_path


def build(ws, out="index.crvi", *extra):
    return main(["build-index",
                 "--embeddings", str(ws / "vectors.txt"),
                 "--corpus", str(ws / "corpus.jsonl"),
                 "--out", str(ws / out),
                 "--trees", "4", "--leaf-cap", "2", "--seed", "7",
                 "--compute-idf", *extra])


class TestBuildIndex:
    def test_builds_and_reports(self, workspace, capsys):
        assert build(workspace) == 0
        err = capsys.readouterr().err
        assert "3 documents" in err and "dim=2" in err
        index = load_index(workspace / "index.crvi")
        assert index.n_docs == 3
        assert index.n_trees == 4
        assert (workspace / "index.crvi.idf").exists()
        meta = json.loads((workspace / "index.crvi.meta.json").read_text())
        assert meta["mode"] == "centidf"

    def test_exact_engine_has_no_trees(self, workspace):
        assert build(workspace, "flat.crvi", "--engine", "exact") == 0
        assert load_index(workspace / "flat.crvi").n_trees == 0

    def test_missing_embeddings_exit_2(self, workspace):
        code = main(["build-index",
                     "--embeddings", str(workspace / "nope.txt"),
                     "--corpus", str(workspace / "corpus.jsonl"),
                     "--out", str(workspace / "x.crvi"), "--compute-idf"])
        assert code == 2

    def test_duplicate_doc_exit_3(self, workspace):
        corpus = workspace / "corpus.jsonl"
        corpus.write_text(corpus.read_text() +
                          json.dumps({"id": "d1", "title": "x", "abstract": "y"}) + "\n")
        assert build(workspace) == 3

    def test_centidf_without_idf_source_exit_3(self, workspace):
        code = main(["build-index",
                     "--embeddings", str(workspace / "vectors.txt"),
                     "--corpus", str(workspace / "corpus.jsonl"),
                     "--out", str(workspace / "x.crvi")])
        assert code == 3


class TestSearch:
    def search(self, ws, out="run.txt", *extra):
        return main(["search",
                     "--index", str(ws / "index.crvi"),
                     "--embeddings", str(ws / "vectors.txt"),
                     "--questions", str(ws / "questions.jsonl"),
                     "--out", str(ws / out), "--k", "10", *extra])

    def test_ranks_matching_doc_first(self, workspace, capsys):
        build(workspace)
        assert self.search(workspace) == 0
        lines = (workspace / "run.txt").read_text().splitlines()
        first = lines[0].split()
        assert first[0] == "q1" and first[2] == "d1" and first[3] == "1"
        err = capsys.readouterr().err
        assert "search:" in err and "rerank:" in err

    def test_stopword_question_absent_from_body(self, workspace):
        build(workspace)
        self.search(workspace)
        body = (workspace / "run.txt").read_text()
        assert "q2" not in body

    def test_rerank_stage(self, workspace):
        build(workspace)
        code = self.search(workspace, "run-rr.txt",
                           "--rerank", "rwmd_q",
                           "--corpus", str(workspace / "corpus.jsonl"))
        assert code == 0
        lines = (workspace / "run-rr.txt").read_text().splitlines()
        assert lines[0].split()[5] == "centidf-ann-rwmdq"
        assert lines[0].split()[2] == "d1"  # contains the query token, distance 0

    def test_rerank_needs_corpus(self, workspace):
        build(workspace)
        assert self.search(workspace, "x.txt", "--rerank", "rwmd_q") == 3

    def test_mode_mismatch_exit_3(self, workspace):
        build(workspace)
        assert self.search(workspace, "x.txt", "--mode", "cent") == 3

    def test_byte_identical_reruns(self, workspace):
        build(workspace)
        self.search(workspace, "one.txt")
        self.search(workspace, "two.txt")
        assert (workspace / "one.txt").read_bytes() == (workspace / "two.txt").read_bytes()

    def test_unreadable_index_exit_2(self, workspace):
        code = main(["search", "--index", str(workspace / "absent.crvi"),
                     "--embeddings", str(workspace / "vectors.txt"),
                     "--questions", str(workspace / "questions.jsonl"),
                     "--out", str(workspace / "x.txt")])
        assert code == 2


class TestRerankCommand:
    def test_reranks_external_run(self, workspace):
        run = workspace / "external.txt"
        run.write_text("q1 Q0 d2 1 5.0 pubmedse\nq1 Q0 d1 2 4.0 pubmedse\n")
        code = main(["rerank", "--run", str(run),
                     "--questions", str(workspace / "questions.jsonl"),
                     "--corpus", str(workspace / "corpus.jsonl"),
                     "--embeddings", str(workspace / "vectors.txt"),
                     "--out", str(workspace / "reranked.txt"),
                     "--method", "rwmd_q"])
        assert code == 0
        lines = (workspace / "reranked.txt").read_text().splitlines()
        assert lines[0].split()[2] == "d1"
        assert lines[0].split()[5] == "pubmedse-rwmdq"


class TestHybridCommand:
    def test_falls_back_on_empty_primary(self, workspace):
        primary = workspace / "primary.txt"
        primary.write_text("q1 Q0 d1 1 1.0 pm\n")  # nothing for q2
        fallback = workspace / "fallback.txt"
        fallback.write_text("q1 Q0 d9 1 1.0 cent\nq2 Q0 d5 1 1.0 cent\nq2 Q0 d2 2 0.5 cent\n")
        out = workspace / "hybrid.txt"
        assert main(["hybrid", "--primary", str(primary),
                     "--fallback", str(fallback), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].split()[:3] == ["q1", "Q0", "d1"]
        assert [ln.split()[2] for ln in lines if ln.startswith("q2")] == ["d5", "d2"]
        assert lines[0].split()[5] == "hybrid"


class TestEvaluateCommand:
    def test_json_and_table(self, workspace, capsys):
        run = workspace / "run.txt"
        run.write_text("q1 Q0 d1 1 1.0 t\nq1 Q0 d2 2 0.9 t\nq1 Q0 d3 3 0.8 t\n")
        qrels = workspace / "q.txt"
        qrels.write_text("q1 0 d1 1\nq1 0 d3 1\n")
        report_path = workspace / "report.json"
        code = main(["evaluate", "--run", str(run), "--qrels", str(qrels),
                     "--ndcg-k", "3", "--json", str(report_path)])
        assert code == 0
        payload = json.loads(report_path.read_text())
        assert payload["map"] == pytest.approx(0.83333, abs=1e-5)
        assert payload["maip"] == pytest.approx(0.84848, abs=1e-5)
        assert payload["mean_ndcg"]["3"] == pytest.approx(0.9197207891, abs=1e-9)
        out = capsys.readouterr().out
        assert "MAP" in out

    def test_all_zero_still_exit_0(self, workspace):
        run = workspace / "run.txt"
        run.write_text("q1 Q0 d9 1 1.0 t\n")
        qrels = workspace / "q.txt"
        qrels.write_text("q1 0 d1 1\n")
        assert main(["evaluate", "--run", str(run), "--qrels", str(qrels)]) == 0

    def test_disjoint_qids_exit_4(self, workspace):
        run = workspace / "run.txt"
        run.write_text("q9 Q0 d1 1 1.0 t\n")
        qrels = workspace / "q.txt"
        qrels.write_text("q1 0 d1 1\n")
        assert main(["evaluate", "--run", str(run), "--qrels", str(qrels)]) == 4


class TestIdfCommand:
    def test_writes_idf_file(self, workspace):
        out = workspace / "scores.idf"
        assert main(["idf", "--corpus", str(workspace / "corpus.jsonl"),
                     "--out", str(out)]) == 0
        text = out.read_text().splitlines()
        assert text[0] == "#ndocs=3"
        assert any(line.startswith("apoptosis\t") for line in text)


class TestConfigFile:
    def test_config_supplies_defaults_flags_win(self, workspace):
        config = workspace / "run.conf"
        config.write_text(
            "trees = 2\n"
            "leaf-cap = 2   # comment\n"
            "seed = 9\n"
        )
        code = main(["build-index", "--config", str(config),
                     "--embeddings", str(workspace / "vectors.txt"),
                     "--corpus", str(workspace / "corpus.jsonl"),
                     "--out", str(workspace / "cfg.crvi"),
                     "--compute-idf", "--trees", "3"])
        assert code == 0
        index = load_index(workspace / "cfg.crvi")
        assert index.n_trees == 3  # flag beats config
        assert index.seed == 9    # config beats default

    def test_unknown_config_key_exit_3(self, workspace):
        config = workspace / "run.conf"
        config.write_text("no_such_option = 1\n")
        code = main(["build-index", "--config", str(config),
                     "--embeddings", str(workspace / "vectors.txt"),
                     "--corpus", str(workspace / "corpus.jsonl"),
                     "--out", str(workspace / "x.crvi"), "--compute-idf"])
        assert code == 3
