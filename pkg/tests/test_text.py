import numpy as np

from centroid_ir import TokenizedText, default_stopwords, load_stopwords, tokenize


def test_empty_input():
    result = tokenize("", set())
    assert result.tokens == []
    assert result.tf == {}
    assert len(result) == 0


def test_lowercasing_and_stopwords():
    result = tokenize("The cell, the CELL.", {"the"})
    assert result.tokens == ["cell", "cell"]
    assert result.tf == {"cell": 2}


def test_hyphen_splits():
    result = tokenize("p53-mediated apoptosis", set())
    assert result.tokens == ["p53", "mediated", "apoptosis"]


def test_single_digit_dropped_longer_numbers_kept():
    result = tokenize("stage 3 of 12 trials", set())
    assert result.tokens == ["stage", "of", "12", "trials"]


def test_underscore_is_a_delimiter():
    assert tokenize("gene_name", set()).tokens == ["gene", "name"]


def test_tf_sums_to_token_count():
    rng = np.random.default_rng(7)
    words = ["alpha", "beta", "gamma", "p53", "x"]
    for _ in range(50):
        text = " ".join(rng.choice(words, size=rng.integers(0, 30)))
        result = tokenize(text, {"beta"})
        assert sum(result.tf.values()) == len(result.tokens)
        assert all(t and not t.isspace() for t in result.tokens)


def test_idempotence():
    samples = [
        "Which genes are implicated in Charcot-Marie-Tooth disease?",
        "TNF-alpha (tumour necrosis factor) signalling, 2015 review",
        "p53-mediated apoptosis: a 2-step model",
    ]
    stop = default_stopwords()
    for text in samples:
        first = tokenize(text, stop)
        again = tokenize(" ".join(first.tokens), stop)
        assert again.tokens == first.tokens
        assert again.tf == first.tf


def test_case_insensitive_ascii():
    text = "Protein Kinase C and the MAPK cascade!"
    assert tokenize(text.upper(), set()).tokens == tokenize(text, set()).tokens


def test_stopword_soundness():
    stop = default_stopwords()
    result = tokenize("what is the role of brca1 in dna repair", stop)
    assert not set(result.tokens) & stop
    assert "brca1" in result.tokens


def test_from_tokens_roundtrip():
    t = TokenizedText.from_tokens(["x", "y", "x"])
    assert t.tf == {"x": 2, "y": 1}


def test_stopword_file(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("# comment line\nthe\nOf\n\nand\n", encoding="utf-8")
    words = load_stopwords(path)
    assert words == {"the", "of", "and"}


def test_default_stopwords_lowercase():
    stop = default_stopwords()
    assert "the" in stop and "of" in stop
    assert all(w == w.lower() for w in stop)
