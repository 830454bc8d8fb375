"""
Reference-aware BM25 over column items and candidate rows.
"""
import math
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Hashable, Iterable, Sequence

K1 = 1.2
B = 0.75

_TOKEN = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    """Case-folded alphanumeric runs; single characters dropped, digit runs kept."""
    return [t for t in _TOKEN.findall(text.casefold()) if len(t) > 1]


def value_text(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def value_tokens(values: Iterable[Any]) -> tuple[str, ...]:
    tokens: list[str] = []
    for value in values:
        tokens.extend(tokenize(value_text(value)))
    return tuple(tokens)


@dataclass(frozen=True)
class ReferenceQuery:
    """Token bag the candidates are scored against."""

    source: str = ""
    tokens: Counter = field(default_factory=Counter)

    @property
    def terms(self) -> set[str]:
        return set(self.tokens)


class ScoringScope(str, Enum):
    WITHIN_GROUP = "WithinGroup"
    CROSS_TABLE = "CrossTable"


@dataclass(frozen=True)
class ScoredCandidate:
    id: int
    value_tokens: tuple[str, ...]
    schema_tokens: tuple[str, ...] = ()
    group: Hashable = None
    score: float = 0.0

    @property
    def document(self) -> tuple[str, ...]:
        return self.schema_tokens + self.value_tokens


def idf(n_docs: int, doc_freq: int) -> float:
    return max(0.0, math.log(1.0 + (n_docs - doc_freq + 0.5) / (doc_freq + 0.5)))


def _score_corpus(candidates: Sequence[ScoredCandidate], terms: set[str]) -> list[float]:
    docs = [c.document for c in candidates]
    n_docs = len(docs)
    if n_docs == 0:
        return []
    avgdl = sum(len(d) for d in docs) / n_docs
    if avgdl == 0 or not terms:
        return [0.0] * n_docs

    bags = [Counter(d) for d in docs]
    doc_freq = {t: sum(1 for bag in bags if t in bag) for t in terms}
    weights = {t: idf(n_docs, doc_freq[t]) for t in terms}

    scores = []
    for doc, bag in zip(docs, bags):
        norm = K1 * (1 - B + B * len(doc) / avgdl)
        total = 0.0
        for term in terms:
            tf = bag.get(term, 0)
            if tf:
                total += weights[term] * tf * (K1 + 1) / (tf + norm)
        scores.append(total)
    return scores


def score_bm25(
    candidates: Sequence[ScoredCandidate],
    query_tokens: Iterable[str],
    scope: ScoringScope = ScoringScope.CROSS_TABLE,
) -> list[ScoredCandidate]:
    """
    Score every candidate against the distinct query terms. WithinGroup computes
    IDF and average length per `group`; CrossTable uses the whole candidate set.
    Output order matches input order.
    """
    terms = set(query_tokens)
    if scope is ScoringScope.CROSS_TABLE:
        scores = _score_corpus(candidates, terms)
        return [replace(c, score=s) for c, s in zip(candidates, scores)]

    groups: dict[Hashable, list[int]] = {}
    for index, candidate in enumerate(candidates):
        groups.setdefault(candidate.group, []).append(index)
    scores = [0.0] * len(candidates)
    for members in groups.values():
        for index, score in zip(members, _score_corpus([candidates[i] for i in members], terms)):
            scores[index] = score
    return [replace(c, score=s) for c, s in zip(candidates, scores)]


def rank(candidates: Sequence[ScoredCandidate]) -> list[ScoredCandidate]:
    """Descending score, earlier id first on ties."""
    return sorted(candidates, key=lambda c: (-c.score, c.id))
