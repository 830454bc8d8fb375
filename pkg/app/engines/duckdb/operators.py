"""
Analytical operators evaluated in Python over datastore tables.

DETECT_ANOMALY flags values more than k population standard deviations
from the column mean. Outliers that recur at a fixed stride are treated
as periodic behaviour and suppressed instead of reported.
"""
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from app.engines.duckdb.client import Datastore
from app.engines.duckdb.models import ROW_ID, SERIES_IDX, Table
from app.errors import AnomalyInputError

DEFAULT_K = 2.0
PERIODIC_SHARE = 0.8
MIN_PERIODIC_OUTLIERS = 3
FLAT_TREND = 0.05


def format_number(value: Any) -> str:
    if isinstance(value, float) and value.is_integer() and abs(value) < 1e15:
        return f"{value:.1f}"
    return str(value)


def _row_context(row: dict[str, Any]) -> str:
    return ", ".join(f"{k}: {format_number(v)}" for k, v in row.items())


@dataclass(frozen=True)
class NormalStats:
    mean: float
    max: float
    count: int
    stddev: float

    def render(self) -> str:
        return f"mean: {self.mean:.2f}, max: {self.max:.2f}, stddev: {self.stddev:.2f}, count: {self.count}"


@dataclass(frozen=True)
class Anomaly:
    value: float
    row: dict[str, Any]


@dataclass
class AnomalyReport:
    table: str
    column: str
    k: float
    anomalies: list[Anomaly] = field(default_factory=list)
    normal_stats: Optional[NormalStats] = None
    suppressed_periodic: int = 0
    period: Optional[int] = None

    def render(self) -> str:
        lines = []
        if self.anomalies:
            lines.append(f"Anomaly detected in {self.table}.{self.column}:")
            lines.extend(f"  {self.column}: {format_number(a.value)}" for a in self.anomalies)
        else:
            lines.append(f"No anomaly detected in {self.table}.{self.column} (k={format_number(self.k)}).")
        if self.normal_stats is not None:
            lines.append("Normal observation:")
            lines.append(f"  {self.normal_stats.render()}")
        if self.suppressed_periodic:
            lines.append(f"Suppressed periodic spikes: {self.suppressed_periodic} (period {self.period})")
        if self.anomalies:
            lines.append("Context:")
            lines.extend(f"  {_row_context(a.row)}" for a in self.anomalies)
        return "\n".join(lines)


def _numeric_column(store: Datastore, table_name: str, column: str) -> tuple[Table, list[dict], np.ndarray]:
    table = store.table(table_name)
    if table is None:
        raise AnomalyInputError(f"unknown table '{table_name}'")
    schema = table.schema.column(column)
    if schema is None:
        raise AnomalyInputError(f"unknown column '{column}' in table '{table.name}'")
    if not schema.type.numeric:
        raise AnomalyInputError(f"column {table.name}.{column} is not numeric ({schema.type.value})")
    rows = [r for r in table.rows if r[column] is not None]
    if len(rows) < 2:
        raise AnomalyInputError(f"column {table.name}.{column} needs at least 2 values")
    return table, rows, np.asarray([r[column] for r in rows], dtype=float)


def _stride_run(positions: np.ndarray, stride: int) -> np.ndarray:
    """Longest chain i, i + stride, i + 2 * stride, ... made only of outlier positions."""
    present = set(positions.tolist())
    best = positions[:0]
    for start in sorted(present):
        if start - stride in present:
            continue
        length = 1
        while start + length * stride in present:
            length += 1
        if length > len(best):
            best = start + stride * np.arange(length)
    return best


def periodic_outliers(mask: np.ndarray) -> tuple[np.ndarray, Optional[int]]:
    """
    Outliers are periodic when one fixed stride p >= 2 chains at least 80% of
    them. Bursts of adjacent outliers are never periodic.
    """
    suppressed = np.zeros_like(mask)
    positions = np.flatnonzero(mask)
    total = len(positions)
    if total < MIN_PERIODIC_OUTLIERS:
        return suppressed, None
    adjacent = int((np.diff(positions) == 1).sum())
    if adjacent * 2 >= total:
        return suppressed, None
    best_stride, best = None, positions[:0]
    for stride in range(2, len(mask) // 2 + 1):
        run = _stride_run(positions, stride)
        if len(run) > len(best):
            best_stride, best = stride, run
    if best_stride is None or len(best) < max(PERIODIC_SHARE * total, MIN_PERIODIC_OUTLIERS):
        return suppressed, None
    suppressed[best] = True
    return suppressed, best_stride


def detect_anomaly(store: Datastore, table: str, column: str, k: float = DEFAULT_K) -> AnomalyReport:
    resolved, rows, values = _numeric_column(store, table, column)
    mean = float(values.mean())
    std = float(values.std())
    report = AnomalyReport(table=resolved.name, column=column, k=k)
    outliers = np.abs(values - mean) > k * std if std > 0 else np.zeros(len(values), dtype=bool)
    suppressed, period = periodic_outliers(outliers)
    reported = outliers & ~suppressed
    report.suppressed_periodic = int(suppressed.sum())
    report.period = period
    report.anomalies = [Anomaly(value=float(values[i]), row=dict(rows[i])) for i in np.flatnonzero(reported)]
    normal = values[~reported]
    if normal.size == 0:
        return report
    report.normal_stats = NormalStats(
        mean=float(normal.mean()),
        max=float(normal.max()),
        count=int(normal.size),
        stddev=float(normal.std()),
    )
    return report


@dataclass(frozen=True)
class SeriesTrend:
    label: Optional[str]
    count: int
    first: float
    last: float
    minimum: float
    maximum: float
    mean: float
    slope: float

    @property
    def verdict(self) -> str:
        span = self.slope * max(self.count - 1, 1)
        scale = abs(self.mean) or 1.0
        if span / scale > FLAT_TREND:
            return "rising"
        if span / scale < -FLAT_TREND:
            return "falling"
        return "flat"


@dataclass
class TrendReport:
    table: str
    column: str
    series: list[SeriesTrend] = field(default_factory=list)

    def render(self) -> str:
        lines = [f"Trend of {self.table}.{self.column}:"]
        for s in self.series:
            indent = "  "
            if s.label is not None:
                lines.append(f"  series {s.label}:")
                indent = "    "
            lines.append(
                f"{indent}rows: {s.count}, first: {s.first:.2f}, last: {s.last:.2f}, "
                f"min: {s.minimum:.2f}, max: {s.maximum:.2f}, mean: {s.mean:.2f}"
            )
            lines.append(f"{indent}slope per row: {s.slope:.4f} ({s.verdict})")
        return "\n".join(lines)


def _trend(values: np.ndarray, label: Optional[str]) -> SeriesTrend:
    slope = float(np.polyfit(np.arange(values.size, dtype=float), values, 1)[0]) if values.size > 1 else 0.0
    return SeriesTrend(
        label=label,
        count=int(values.size),
        first=float(values[0]),
        last=float(values[-1]),
        minimum=float(values.min()),
        maximum=float(values.max()),
        mean=float(values.mean()),
        slope=slope,
    )


def describe_trend(store: Datastore, table: str, column: str) -> TrendReport:
    """Least-squares slope in _row_id order, one block per series when the table has series_idx."""
    resolved, rows, values = _numeric_column(store, table, column)
    report = TrendReport(table=resolved.name, column=column)
    order = np.argsort(np.asarray([r[ROW_ID] for r in rows]), kind="stable")
    if not resolved.schema.is_series:
        report.series.append(_trend(values[order], None))
        return report
    labels = resolved.schema.series_labels or {}
    series = np.asarray([r[SERIES_IDX] for r in rows])[order]
    ordered = values[order]
    for s in sorted(set(series.tolist())):
        label = f"{s}='{labels[s]}'" if s in labels else str(s)
        report.series.append(_trend(ordered[series == s], label))
    return report
