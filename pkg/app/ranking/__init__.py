from app.ranking.bm25 import ReferenceQuery, ScoredCandidate, ScoringScope, rank, score_bm25, tokenize, value_tokens
from app.ranking.reference import SlimRepresentation, build_reference_query, slim_representation

__all__ = [
    "ReferenceQuery",
    "ScoredCandidate",
    "ScoringScope",
    "SlimRepresentation",
    "build_reference_query",
    "rank",
    "score_bm25",
    "slim_representation",
    "tokenize",
    "value_tokens",
]
