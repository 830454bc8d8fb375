"""
Row view: the highest-scoring complete records across every datastore table.
"""
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from app.config import TruncationConfig
from app.engines.duckdb.client import Datastore
from app.engines.duckdb.models import ROW_ID, SERIES_IDX, Table
from app.ranking.bm25 import ReferenceQuery, ScoredCandidate, ScoringScope, rank, score_bm25, tokenize, value_tokens


@dataclass(frozen=True)
class RowCandidate:
    table: str
    position: int
    columns: tuple[str, ...]
    values: tuple[Any, ...]
    source_object: int = 0

    @property
    def record(self) -> dict[str, Any]:
        return dict(zip(self.columns, self.values))


@dataclass(frozen=True)
class RankedRow:
    candidate: RowCandidate
    score: float


@dataclass
class RowView:
    rows: list[RankedRow] = field(default_factory=list)
    available: dict[str, int] = field(default_factory=dict)  # candidate rows per table

    @property
    def empty(self) -> bool:
        return not self.rows

    def by_table(self) -> dict[str, list[RankedRow]]:
        grouped: dict[str, list[RankedRow]] = {}
        for row in self.rows:
            grouped.setdefault(row.candidate.table, []).append(row)
        return grouped

    def hidden(self, table: str) -> int:
        return self.available.get(table, 0) - len(self.by_table().get(table, []))


def _data_columns(table: Table) -> list[str]:
    return [c for c in table.schema.column_names if c != ROW_ID]


def _pivot(table: Table) -> Optional[list[RowCandidate]]:
    """
    One candidate per position for multi-series tables with equal-length
    series: columns equal across all series stay shared, the rest become
    `<column>_<series>`.
    """
    sizes = table.series_sizes()
    per_series = table.rows_per_series
    if per_series is None or len(sizes) < 2:
        return None
    series = sorted(sizes)
    by_series: dict[int, list[dict]] = {s: [] for s in series}
    for row in sorted(table.rows, key=lambda r: r[ROW_ID]):
        by_series[row[SERIES_IDX]].append(row)
    fields = [c for c in _data_columns(table) if c != SERIES_IDX]
    shared = [
        f for f in fields
        if all(len({by_series[s][j][f] for s in series}) == 1 for j in range(per_series))
    ]
    columns: list[str] = list(shared)
    for f in fields:
        if f not in shared:
            columns.extend(f"{f}_{s}" for s in series)
    candidates = []
    for j in range(per_series):
        values: list[Any] = [by_series[series[0]][j][f] for f in shared]
        for f in fields:
            if f not in shared:
                values.extend(by_series[s][j][f] for s in series)
        candidates.append(RowCandidate(
            table=table.name,
            position=j,
            columns=tuple(columns),
            values=tuple(values),
            source_object=table.schema.source_object,
        ))
    return candidates


def table_candidates(table: Table) -> list[RowCandidate]:
    if table.schema.is_series:
        pivoted = _pivot(table)
        if pivoted is not None:
            return pivoted
    columns = tuple(_data_columns(table))
    return [
        RowCandidate(
            table=table.name,
            position=row[ROW_ID],
            columns=columns,
            values=tuple(row[c] for c in columns),
            source_object=table.schema.source_object,
        )
        for row in table.rows
    ]


def row_candidates(store: Datastore) -> list[RowCandidate]:
    candidates: list[RowCandidate] = []
    for table in store.tables.values():
        candidates.extend(table_candidates(table))
    return candidates


def build_row_view(
    candidates: Sequence[RowCandidate], query: ReferenceQuery, cfg: TruncationConfig
) -> RowView:
    """Top row_top_k candidates by cross-table BM25; ties keep datastore order."""
    available: dict[str, int] = {}
    for candidate in candidates:
        available[candidate.table] = available.get(candidate.table, 0) + 1
    scored = score_bm25(
        [
            ScoredCandidate(
                id=i,
                value_tokens=value_tokens(c.values),
                schema_tokens=tuple(tokenize(" ".join((c.table,) + c.columns))),
            )
            for i, c in enumerate(candidates)
        ],
        query.terms,
        ScoringScope.CROSS_TABLE,
    )
    top = rank(scored)[: cfg.row_top_k]
    return RowView(
        rows=[RankedRow(candidate=candidates[s.id], score=s.score) for s in top],
        available=available,
    )
