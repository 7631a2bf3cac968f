"""Free-text profiles: tokenization, TF-IDF corpus state, cosine similarity.

A corpus exists per (entity type, selected free-text attributes) pair. Only
term frequencies and document frequencies are stored; TF-IDF weights are
materialized at query time from the live document frequencies, which keeps
an upsert O(|document|) while staying equivalent to a batch reindex.

Weighting: tf(t, d) is the raw count and idf(t) = ln((1 + N) / (1 + df(t))) + 1,
which is strictly positive and defined for an unseen corpus.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from importlib import resources
from typing import Iterable, Mapping, Optional

from . import errors
from .model import AttributeKind, AttributeSpec, EntitySchema
from .pmap import PMap, pmap_from

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Ranking scores are quantized so that independently computed rankings
# (incremental engine vs. brute-force oracle, or two runs with different
# summation order) agree on ties before the id tie-break is applied.
SCORE_DECIMALS = 10


def quantize(score: float) -> float:
    return round(score, SCORE_DECIMALS)


def _load_stopwords(language: str) -> frozenset[str]:
    text = resources.files(__package__).joinpath(f"stopwords/{language}.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip() and not w.startswith("#"))


STOPWORDS = {
    "english": _load_stopwords("english"),
    "german": _load_stopwords("german"),
}

_LANGUAGE_BY_KIND = {
    AttributeKind.FREE_TEXT_ENGLISH: "english",
    AttributeKind.FREE_TEXT_GERMAN: "german",
}


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple[str, ...]
    language: str


def tokenize(text: str, language: str) -> TokenStream:
    """Lowercase, split on non-alphanumeric runs, drop stopwords and 1-char tokens."""
    stop = STOPWORDS[language]
    tokens = tuple(
        t for t in _TOKEN_RE.findall(text.lower()) if len(t) > 1 and t not in stop
    )
    return TokenStream(tokens=tokens, language=language)


def profile_tokens(
    schema: EntitySchema, values: Mapping[str, object], cbf_attributes: Iterable[str]
) -> list[str]:
    """Concatenated token streams of the selected free-text attributes."""
    tokens: list[str] = []
    for name in sorted(cbf_attributes):
        spec: Optional[AttributeSpec] = schema.attribute(name)
        if spec is None or not spec.kind.is_free_text:
            raise errors.NonTextAttribute(name)
        text = values.get(name)
        if text:
            tokens.extend(tokenize(str(text), _LANGUAGE_BY_KIND[spec.kind]).tokens)
    return tokens


@dataclass(frozen=True)
class CorpusState:
    """Immutable TF/DF state of one corpus; evolved copy-on-write per upsert."""

    doc_count: int = 0
    doc_freq: PMap = PMap(shards=128)
    tf: PMap = PMap(shards=64)          # doc id -> {term: count}
    postings: PMap = PMap(shards=128)   # term -> {doc id: count}

    def has_document(self, doc_id: str) -> bool:
        return doc_id in self.tf

    def idf(self, term: str) -> float:
        df = self.doc_freq.get(term, 0)
        return math.log((1 + self.doc_count) / (1 + df)) + 1.0

    def term_vector(self, doc_id: str) -> dict[str, float]:
        """TF-IDF weights under the live document frequencies; no zero entries."""
        counts = self.tf.get(doc_id)
        if counts is None:
            raise errors.UnknownEntity(doc_id)
        return {term: count * self.idf(term) for term, count in counts.items()}


def index_document(corpus: CorpusState, doc_id: str, tokens: Iterable[str]) -> CorpusState:
    """Insert or fully replace one document. Empty documents still count."""
    if corpus.has_document(doc_id):
        corpus = remove_document(corpus, doc_id)
    counts: dict[str, int] = {}
    for token in tokens:
        counts[token] = counts.get(token, 0) + 1
    doc_freq = corpus.doc_freq
    postings = corpus.postings
    for term, count in counts.items():
        doc_freq = doc_freq.set(term, doc_freq.get(term, 0) + 1)
        entry = dict(postings.get(term) or {})
        entry[doc_id] = count
        postings = postings.set(term, entry)
    return CorpusState(
        doc_count=corpus.doc_count + 1,
        doc_freq=doc_freq,
        tf=corpus.tf.set(doc_id, counts),
        postings=postings,
    )


def remove_document(corpus: CorpusState, doc_id: str) -> CorpusState:
    counts = corpus.tf.get(doc_id)
    if counts is None:
        return corpus
    doc_freq = corpus.doc_freq
    postings = corpus.postings
    for term in counts:
        df = doc_freq.get(term, 0) - 1
        doc_freq = doc_freq.set(term, df) if df > 0 else doc_freq.delete(term)
        entry = dict(postings.get(term) or {})
        entry.pop(doc_id, None)
        postings = postings.set(term, entry) if entry else postings.delete(term)
    return CorpusState(
        doc_count=corpus.doc_count - 1,
        doc_freq=doc_freq,
        tf=corpus.tf.delete(doc_id),
        postings=postings,
    )


def build_corpus(documents: Mapping[str, Iterable[str]]) -> CorpusState:
    """Batch construction; the incremental path must match this exactly."""
    corpus = CorpusState()
    for doc_id in sorted(documents):
        corpus = index_document(corpus, doc_id, documents[doc_id])
    return corpus


def _norm(weights: Mapping[str, float]) -> float:
    return math.sqrt(sum(w * w for w in weights.values()))


def similar_entities(corpus: CorpusState, context_id: str, k: Optional[int]) -> list[tuple[str, float]]:
    """Cosine-ranked neighbors of one document within its corpus.

    The context document is excluded, zero-score candidates are dropped, ties
    break by ascending entity id, and at most k results are returned.
    """
    context = corpus.term_vector(context_id)
    if not context:
        raise errors.EmptyProfile(context_id)
    context_norm = _norm(context)
    dots: dict[str, float] = {}
    for term, weight in context.items():
        entry = corpus.postings.get(term)
        if not entry:
            continue
        idf = corpus.idf(term)
        for doc_id, count in entry.items():
            if doc_id == context_id:
                continue
            dots[doc_id] = dots.get(doc_id, 0.0) + weight * count * idf
    scored = []
    for doc_id, dot in dots.items():
        norm = _norm(corpus.term_vector(doc_id))
        score = quantize(dot / (context_norm * norm)) if norm > 0 else 0.0
        if score != 0.0:
            scored.append((doc_id, score))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored if k is None else scored[:k]
