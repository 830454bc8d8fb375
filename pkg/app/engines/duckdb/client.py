"""
Request-scoped in-memory DuckDB database.

Each Datastore owns a private `:memory:` connection, so two requests can
never see each other's tables. External access is disabled, so queries
cannot read host files or URLs, and nothing is written to disk.
"""
import datetime
import decimal
import re
import uuid
from typing import Any, Optional

import duckdb

from app.engines.duckdb.models import SqlResult, Table
from app.engines.logging import LoggerMixin
from app.errors import SqlExecutionError

_RESERVED = frozenset({
    "all", "and", "as", "by", "case", "desc", "asc", "end", "from", "group", "having", "in",
    "join", "limit", "not", "null", "on", "or", "order", "select", "table", "union", "user",
    "values", "when", "where", "with",
})
_UNKNOWN_TABLE = re.compile(r"Table with name (\S+) does not exist")
_NEAR_TOKEN = re.compile(r'at or near "([^"]+)"')
# No file, URL or extension access; SQL may only see the tables built here
_SANDBOX = {"enable_external_access": False, "lock_configuration": True}


def sanitize_identifier(name: str, fallback: str = "t") -> str:
    cleaned = re.sub(r"[^A-Za-z0-9_]+", "_", name).strip("_")
    if not cleaned:
        cleaned = fallback
    if cleaned[0].isdigit():
        cleaned = f"{fallback}_{cleaned}"
    if cleaned.lower() in _RESERVED:
        cleaned = f"{cleaned}_t"
    return cleaned


def quote_identifier(name: str) -> str:
    return '"' + name.replace('"', '""') + '"'


def _plain(value: Any) -> Any:
    if isinstance(value, decimal.Decimal):
        return float(value)
    if isinstance(value, (datetime.date, datetime.time)):
        return value.isoformat()
    if isinstance(value, uuid.UUID):
        return str(value)
    return value


def error_position(query: str, message: str) -> Optional[int]:
    match = _NEAR_TOKEN.search(message)
    if match:
        index = query.find(match.group(1))
        return index if index >= 0 else None
    return None


class Datastore(LoggerMixin):
    def __init__(self, scope: Optional[str] = None):
        self.scope = scope or uuid.uuid4().hex[:12]
        self.connection = duckdb.connect(":memory:", config=_SANDBOX)
        self.tables: dict[str, Table] = {}
        self._names: set[str] = set()

    def __enter__(self) -> "Datastore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def close(self) -> None:
        try:
            self.connection.close()
        except duckdb.Error:
            self.logger.warning("Error closing datastore connection", exc_info=True)
        self.logger.debug(f"Datastore {self.scope} closed")

    def reserve_name(self, hint: str) -> str:
        """Unique (case-insensitive) table name; collisions get _2, _3, ..."""
        base = sanitize_identifier(hint)
        name, n = base, 1
        while name.lower() in self._names:
            n += 1
            name = f"{base}_{n}"
        self._names.add(name.lower())
        return name

    def add_table(self, table: Table) -> None:
        schema = table.schema
        columns_sql = ", ".join(f"{quote_identifier(c.name)} {c.type.sql}" for c in schema.columns)
        self.connection.execute(f"CREATE TABLE {quote_identifier(schema.name)} ({columns_sql})")
        if table.rows:
            placeholders = ", ".join("?" for _ in schema.columns)
            names = schema.column_names
            self.connection.executemany(
                f"INSERT INTO {quote_identifier(schema.name)} VALUES ({placeholders})",
                [[row.get(name) for name in names] for row in table.rows],
            )
        schema.row_count = len(table.rows)
        self.tables[schema.name] = table
        self.logger.debug(
            "Table created",
            extra={"extra_data": {"scope": self.scope, "table": schema.name, "rows": schema.row_count}},
        )

    def table(self, name: str) -> Optional[Table]:
        if name in self.tables:
            return self.tables[name]
        for key, table in self.tables.items():
            if key.lower() == name.lower():
                return table
        return None

    def execute(self, query: str) -> SqlResult:
        try:
            cursor = self.connection.cursor()
        except duckdb.Error as e:
            raise SqlExecutionError(f"datastore {self.scope} is closed", query=query) from e
        try:
            cursor.execute(query)
            columns = tuple(d[0] for d in cursor.description or ())
            rows = [tuple(_plain(v) for v in row) for row in cursor.fetchall()] if columns else []
        except duckdb.Error as e:
            raw = str(e)
            missing = _UNKNOWN_TABLE.search(raw)
            message = f"unknown table '{missing.group(1).strip(chr(34))}'" if missing else raw
            self.logger.info("Query failed", extra={"extra_data": {"scope": self.scope, "error": raw}})
            raise SqlExecutionError(message, error_position(query, raw), query) from e
        finally:
            cursor.close()
        return SqlResult(columns=columns, rows=rows)
