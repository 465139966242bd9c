"""Similarity scoring, query construction, top-K retrieval, and recall@K.

Two scoring backends share one interface: Okapi BM25 over an inverted
index, and embedding cosine similarity (remote provider or the offline
deterministic stub). Queries are built either from the full claim text or
from the evoked frame's designated retrieval elements.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Protocol, Sequence

import numpy as np

from .catalog import FrameCatalog
from .gateway import Gateway, cosine, stub_embedding
from .model import EvaluationError, GoldRecord, ParsedClaim


class RetrievalError(ValueError):
    pass


@dataclass(frozen=True)
class Document:
    """A retrievable unit: bills use title + summary, tables use name + description."""

    id: str
    text: str


class QueryRepresentation(Enum):
    FULL_CLAIM = "claim"
    FRAME_ELEMENTS = "fe"


@dataclass(frozen=True)
class Query:
    text: str
    representation: QueryRepresentation
    source_frame: str | None = None
    used_elements: tuple[str, ...] = ()
    fell_back: bool = False  # FE query fell back to the full claim


@dataclass(frozen=True)
class RetrievalResult:
    """Ranking truncated at K; scores non-increasing, ties broken by ascending id."""

    ranked: tuple[tuple[str, float], ...]
    k: int

    def ids(self) -> tuple[str, ...]:
        return tuple(doc_id for doc_id, _ in self.ranked)


def tokenize(text: str, stem: bool = False) -> list[str]:
    """Lowercased alphanumeric tokens; optional light suffix stemming."""
    tokens = []
    word: list[str] = []
    for ch in text.lower():
        if ch.isalnum():
            word.append(ch)
        elif word:
            tokens.append("".join(word))
            word = []
    if word:
        tokens.append("".join(word))
    if stem:
        tokens = [_light_stem(t) for t in tokens]
    return tokens


def _light_stem(token: str) -> str:
    for suffix in ("ing", "ed", "es", "s"):
        if token.endswith(suffix) and len(token) - len(suffix) >= 3:
            return token[: -len(suffix)]
    return token


class SimilarityBackend(Protocol):
    name: str

    def score(self, query_text: str, doc: Document) -> float: ...


class Bm25Backend:
    """Okapi BM25 bound to a corpus.

    Uses the nonnegative idf variant ln(1 + (N - df + 0.5) / (df + 0.5)) and
    tf saturation tf*(k1+1) / (tf + k1*(1 - b + b*dl/avgdl)). Query terms
    absent from the corpus contribute 0.
    """

    name = "bm25"

    def __init__(
        self,
        corpus: Sequence[Document],
        k1: float = 1.5,
        b: float = 0.75,
        stem: bool = False,
    ):
        if not corpus:
            raise RetrievalError("BM25 requires a non-empty corpus")
        self.k1 = k1
        self.b = b
        self.stem = stem
        self._tf: dict[str, Counter] = {}
        self._dl: dict[str, int] = {}
        df: Counter = Counter()
        for doc in corpus:
            tokens = tokenize(doc.text, stem=stem)
            tf = Counter(tokens)
            self._tf[doc.id] = tf
            self._dl[doc.id] = len(tokens)
            for term in tf:
                df[term] += 1
        self.n_docs = len(corpus)
        self.avgdl = sum(self._dl.values()) / self.n_docs
        self._idf = {
            term: math.log(1.0 + (self.n_docs - n + 0.5) / (n + 0.5))
            for term, n in df.items()
        }

    def score(self, query_text: str, doc: Document) -> float:
        tf = self._tf.get(doc.id)
        if tf is None:
            raise RetrievalError(f"document {doc.id!r} is not in the BM25 corpus")
        dl = self._dl[doc.id]
        norm = self.k1 * (1.0 - self.b + self.b * dl / self.avgdl)
        score = 0.0
        for term in tokenize(query_text, stem=self.stem):
            f = tf.get(term, 0)
            if f == 0:
                continue
            idf = self._idf.get(term, 0.0)
            score += idf * f * (self.k1 + 1.0) / (f + norm)
        return score


class StubEmbeddingBackend:
    """Deterministic hashed bag-of-tokens cosine; runs fully offline."""

    name = "stub"

    def __init__(self):
        self._cache: dict[str, np.ndarray] = {}

    def _vector(self, text: str) -> np.ndarray:
        vec = self._cache.get(text)
        if vec is None:
            vec = stub_embedding(text)
            self._cache[text] = vec
        return vec

    def score(self, query_text: str, doc: Document) -> float:
        return cosine(self._vector(query_text), self._vector(doc.text))


class EmbeddingBackend:
    """Provider-backed embedding cosine; vectors cached by the gateway."""

    name = "embed"

    def __init__(self, gateway: Gateway):
        self.gateway = gateway

    def score(self, query_text: str, doc: Document) -> float:
        q_vec, d_vec = self.gateway.embed([query_text, doc.text])
        if q_vec.shape != d_vec.shape:
            raise RetrievalError(
                f"embedding dimension mismatch: {q_vec.shape} vs {d_vec.shape}"
            )
        return cosine(q_vec, d_vec)


def build_query(
    parsed: ParsedClaim,
    catalog: FrameCatalog,
    representation: QueryRepresentation,
) -> Query:
    """Build a retrieval query from a parsed claim.

    FrameElements queries concatenate (in claim order) the surfaces of the
    first frame's designated retrieval elements; when none were extracted
    the query falls back to the full claim text and records the fallback.
    """
    claim_text = parsed.claim.text
    if representation is QueryRepresentation.FULL_CLAIM:
        return Query(text=claim_text, representation=representation)

    for frame in parsed.frames:
        frame_def = catalog.frames.get(frame.frame_name)
        if frame_def is None:
            continue
        picked = [
            (fe.span.start, name, fe.text)
            for name, fe in frame.elements.items()
            if name in frame_def.retrieval_elements and fe.text.strip()
        ]
        if not picked:
            continue
        picked.sort()
        return Query(
            text=" ".join(text for _, _, text in picked),
            representation=representation,
            source_frame=frame.frame_name,
            used_elements=tuple(name for _, name, _ in picked),
        )

    return Query(
        text=claim_text,
        representation=QueryRepresentation.FULL_CLAIM,
        fell_back=True,
    )


def retrieve_top_k(
    backend: SimilarityBackend,
    corpus: Sequence[Document],
    query: Query,
    k: int,
) -> RetrievalResult:
    """Top-K documents by score; deterministic tie-break by ascending document id."""
    if not corpus:
        raise RetrievalError("cannot retrieve from an empty corpus")
    if k < 1:
        raise RetrievalError(f"K must be >= 1, got {k}")
    scored = [(doc.id, backend.score(query.text, doc)) for doc in corpus]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return RetrievalResult(ranked=tuple(scored[:k]), k=k)


def recall_at_k(result: RetrievalResult, gold_ids: set[str]) -> float:
    """|retrieved ∩ gold| / |gold| over the result's top-K."""
    if not gold_ids:
        raise EvaluationError("recall@K needs a non-empty gold set")
    retrieved = set(result.ids())
    return len(retrieved & gold_ids) / len(gold_ids)


@dataclass(frozen=True)
class MaxPossible:
    """Evidence-availability upper bound; value is 0 when n is 0."""

    value: float
    n: int


def max_possible(gold: Sequence[GoldRecord], corpus_ids: set[str]) -> MaxPossible:
    """Upper bound on recall given corpus coverage.

    Bill-evidence records contribute per referenced bill; table-evidence
    records contribute per claim (is the gold table present at all).
    """
    hits = 0
    total = 0
    for record in gold:
        if record.gold_bill_ids:
            total += len(record.gold_bill_ids)
            hits += sum(1 for bill_id in record.gold_bill_ids if bill_id in corpus_ids)
        else:
            total += 1
            hits += int(any(t in corpus_ids for t in record.gold_table_ids))
    if total == 0:
        return MaxPossible(value=0.0, n=0)
    return MaxPossible(value=hits / total, n=total)
