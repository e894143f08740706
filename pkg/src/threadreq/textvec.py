"""Sparse TF-IDF term vectors over candidate statements.

Tokenization: Unicode lowercase, split on non-alphanumeric runs, drop
stopwords and single-character tokens. TF is raw count over the document's
token count; IDF is ln(N / (1 + df)) + 1 over the corpus, so weights stay
non-negative and cosine similarity of any two statements lands in [0, 1].
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import EmptyTopicError, EmptyVocabularyError

TermVector = dict[str, float]

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

DEFAULT_STOPWORDS: tuple[str, ...] = (
    "a", "an", "the", "and", "or", "but", "if", "then", "than",
    "that", "this", "these", "those", "it", "its",
    "is", "are", "was", "were", "be", "been", "being", "am",
    "do", "does", "did", "have", "has", "had",
    "to", "of", "in", "on", "at", "by", "for", "with", "from", "as", "so",
    "not", "no", "nor",
    "i", "we", "you", "he", "she", "they", "them",
    "his", "her", "our", "your", "their", "my", "me", "us",
    "will", "would", "can", "could", "may", "might",
    "shall", "should", "must", "need", "needs", "want", "wants", "able",
    "when", "where", "which", "who", "whom", "what", "why", "how",
    "all", "any", "some", "such", "own", "same",
    "more", "most", "other", "into", "over", "under", "again", "once",
    "here", "there",
)


def tokenize(text: str, stopwords: Iterable[str] = DEFAULT_STOPWORDS) -> list[str]:
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else frozenset(stopwords)
    return [
        tok
        for tok in _TOKEN_RE.findall(text.lower())
        if len(tok) > 1 and tok not in stop
    ]


@dataclass(frozen=True)
class CorpusModel:
    """IDF table fitted on one corpus; vectorizes any further text with it.

    The IDF pass over the full corpus happens once (in fit); vectorizing
    individual statements afterwards is independent per statement.
    """

    doc_count: int
    idf: Mapping[str, float]
    stopwords: frozenset[str]

    def idf_of(self, term: str) -> float:
        cached = self.idf.get(term)
        if cached is not None:
            return cached
        # term unseen in the corpus: df = 0
        return math.log(self.doc_count / 1.0) + 1.0

    def vectorize(self, text: str) -> TermVector:
        tokens = tokenize(text, self.stopwords)
        if not tokens:
            return {}
        tf = 1.0 / len(tokens)
        vec: TermVector = {}
        for tok in tokens:
            vec[tok] = vec.get(tok, 0.0) + tf
        return {t: max(f * self.idf_of(t), 0.0) for t, f in vec.items()}

    def vectorize_topic(self, topic_statement: str) -> TermVector:
        vec = self.vectorize(topic_statement)
        if not vec:
            raise EmptyTopicError("topic statement tokenizes to nothing")
        return vec


def fit_corpus(
    statements: Sequence[str], stopwords: Iterable[str] = DEFAULT_STOPWORDS
) -> CorpusModel:
    if not statements:
        raise ValueError("need at least one statement")
    stop = frozenset(stopwords)
    docs = [tokenize(s, stop) for s in statements]
    if all(not d for d in docs):
        raise EmptyVocabularyError("every statement tokenizes to nothing")
    df: dict[str, int] = {}
    for tokens in docs:
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
    n = len(docs)
    idf = {term: math.log(n / (1 + count)) + 1.0 for term, count in df.items()}
    return CorpusModel(doc_count=n, idf=idf, stopwords=stop)


def vectorize(
    statements: Sequence[str], stopwords: Iterable[str] = DEFAULT_STOPWORDS
) -> list[TermVector]:
    """TF-IDF vectors for a corpus of statements, one vector per statement."""
    model = fit_corpus(statements, stopwords)
    return [model.vectorize(s) for s in statements]


def cosine(u: TermVector, v: TermVector) -> float:
    """Cosine similarity; 0.0 when either vector is zero."""
    if not u or not v:
        return 0.0
    if len(v) < len(u):
        u, v = v, u
    dot = sum(w * v[t] for t, w in u.items() if t in v)
    if dot == 0.0:
        return 0.0
    nu = math.sqrt(sum(w * w for w in u.values()))
    nv = math.sqrt(sum(w * w for w in v.values()))
    return min(dot / (nu * nv), 1.0)


def centroid(vectors: Sequence[TermVector]) -> TermVector:
    """Arithmetic mean of the given vectors."""
    if not vectors:
        return {}
    acc: TermVector = {}
    for vec in vectors:
        for term, w in vec.items():
            acc[term] = acc.get(term, 0.0) + w
    n = len(vectors)
    return {t: w / n for t, w in acc.items()}
