"""Text normalization: lowercasing, splitting, stop-word removal.

Every document and question passes through :func:`tokenize` before any
vector arithmetic, so the rules here pin down the vocabulary seen by the
rest of the pipeline.  The rules are deliberately simple and reproducible:
lowercase, split on anything that is not a letter or digit, drop stop
words and single-digit tokens.  No stemming, no lemmatization.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

# Letters and digits only: \w minus the underscore, Unicode-aware.
_TOKEN_RE = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class TokenizedText:
    """Tokens of one text in original order, plus their frequencies.

    ``sum(tf.values()) == len(tokens)`` always holds; ``tf`` counts every
    occurrence, so duplicated tokens are preserved with multiplicity.
    """

    tokens: list[str] = field(default_factory=list)
    tf: dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.tokens)

    @classmethod
    def from_tokens(cls, tokens: list[str]) -> "TokenizedText":
        tf: dict[str, int] = {}
        for t in tokens:
            tf[t] = tf.get(t, 0) + 1
        return cls(tokens=tokens, tf=tf)


def tokenize(text: str, stopwords: frozenset[str] | set[str] = frozenset()) -> TokenizedText:
    """Lowercase ``text``, split on non-alphanumerics, filter, and count.

    Filtering drops stop-word tokens and pure-digit tokens of length 1.
    Token order follows the input; empty input yields an empty result.
    Stop-word entries are expected lowercase.
    """
    tokens = [
        t
        for t in _TOKEN_RE.findall(text.lower())
        if t not in stopwords and not (len(t) == 1 and t.isdigit())
    ]
    return TokenizedText.from_tokens(tokens)


def load_stopwords(path) -> frozenset[str]:
    """Read a stop-word file: UTF-8, one token per line, ``#`` comments."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip()
            if not word or word.startswith("#"):
                continue
            words.add(word.lower())
    return frozenset(words)


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    """The bundled English stop-word list."""
    text = resources.files("centroid_ir.data").joinpath("stopwords.txt").read_text("utf-8")
    words = set()
    for line in text.splitlines():
        word = line.strip()
        if word and not word.startswith("#"):
            words.add(word.lower())
    return frozenset(words)
