from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

ROW_ID = "_row_id"
SERIES_IDX = "series_idx"
PARENT_ID = "parent_id"


class ColumnType(str, Enum):
    INT = "int"
    FLOAT = "float"
    TEXT = "text"
    BOOL = "bool"

    @property
    def sql(self) -> str:
        return {"int": "BIGINT", "float": "DOUBLE", "text": "VARCHAR", "bool": "BOOLEAN"}[self.value]

    @property
    def numeric(self) -> bool:
        return self in (ColumnType.INT, ColumnType.FLOAT)


@dataclass(frozen=True)
class ColumnSchema:
    name: str
    type: ColumnType


@dataclass
class TableSchema:
    name: str
    source_path: str
    columns: list[ColumnSchema]
    source_object: int = 0
    parent_key: Optional[tuple[str, str]] = None  # (parent table, key column)
    series_labels: Optional[dict[int, str]] = None
    row_count: int = 0

    def column(self, name: str) -> Optional[ColumnSchema]:
        for column in self.columns:
            if column.name == name:
                return column
        return None

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    @property
    def is_series(self) -> bool:
        return self.series_labels is not None


@dataclass
class Table:
    schema: TableSchema
    rows: list[dict[str, Any]] = field(default_factory=list)

    @property
    def name(self) -> str:
        return self.schema.name

    def series_sizes(self) -> dict[int, int]:
        sizes: dict[int, int] = {}
        for row in self.rows:
            sizes[row[SERIES_IDX]] = sizes.get(row[SERIES_IDX], 0) + 1
        return sizes

    @property
    def rows_per_series(self) -> Optional[int]:
        if not self.schema.is_series:
            return None
        sizes = set(self.series_sizes().values())
        return sizes.pop() if len(sizes) == 1 else None


@dataclass(frozen=True)
class SqlResult:
    columns: tuple[str, ...]
    rows: list[tuple]

    def column(self, name: str) -> list[Any]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def records(self) -> list[dict[str, Any]]:
        return [dict(zip(self.columns, row)) for row in self.rows]

    def __len__(self) -> int:
        return len(self.rows)
