"""
Materializes parsed objects into datastore tables before any truncation.

Promotion rules, applied while walking each object:
- a list of >= min_table_rows dictionaries sharing one key set becomes a table;
  list-valued fields become child tables keyed by parent_id, one-to-one
  dictionaries flatten into `outer_inner` columns, anything else is JSON text;
- a dictionary of parallel list-of-lists (a column store) becomes one table
  with series_idx, labelled by the first sibling scalar list of matching size;
- a dictionary of equal-length scalar lists becomes one table;
- chart-like sibling dictionaries, each holding one equal-length list of
  numeric points and at most a string label, combine into one table with
  series_idx; other sibling records stay record tables;
- a long scalar list becomes a one-column `value` table.
"""
import json
from typing import Any, Iterable, Optional, Sequence

from app.config import TruncationConfig
from app.engines.duckdb.client import Datastore, sanitize_identifier
from app.engines.duckdb.models import (
    PARENT_ID,
    ROW_ID,
    SERIES_IDX,
    ColumnSchema,
    ColumnType,
    Table,
    TableSchema,
)
from app.engines.logging import LoggerMixin

_RESERVED_COLUMNS = (ROW_ID, SERIES_IDX, PARENT_ID)
# Series index slot in staged rows; never equal to a source field name
_SERIES_KEY = ("series",)


def _is_scalar(value: Any) -> bool:
    return value is None or isinstance(value, (bool, int, float, str))


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def infer_type(values: Iterable[Any]) -> ColumnType:
    present = [v for v in values if v is not None]
    if not present:
        return ColumnType.TEXT
    if all(isinstance(v, bool) for v in present):
        return ColumnType.BOOL
    if all(isinstance(v, int) and not isinstance(v, bool) for v in present):
        return ColumnType.INT
    if all(_is_number(v) for v in present):
        return ColumnType.FLOAT
    return ColumnType.TEXT


def to_cell(value: Any, column_type: ColumnType) -> Any:
    if value is None:
        return None
    if column_type is ColumnType.FLOAT:
        return float(value)
    if column_type is ColumnType.TEXT and not isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    return value


def _uniform_dicts(items: Sequence[Any]) -> bool:
    if not items or not all(isinstance(i, dict) and i for i in items):
        return False
    keys = set(items[0])
    return all(set(i) == keys for i in items)


def _flattenable(values: Sequence[Any]) -> bool:
    """All one-to-one dictionaries with one key set and scalar or flattenable values."""
    if not _uniform_dicts(values):
        return False
    for key in values[0]:
        column = [v[key] for v in values]
        if all(_is_scalar(c) for c in column):
            continue
        if not _flattenable(column):
            return False
    return True


def _flatten(prefix: str, values: Sequence[dict]) -> list[tuple[str, list[Any]]]:
    out: list[tuple[str, list[Any]]] = []
    for key in values[0]:
        column = [v[key] for v in values]
        name = f"{prefix}_{key}"
        if all(_is_scalar(c) for c in column):
            out.append((name, column))
        else:
            out.extend(_flatten(name, column))
    return out


def _child_elements(lists: Sequence[list]) -> Optional[str]:
    """'records' or 'scalars' when every element across the lists is uniform."""
    elements = [e for sub in lists for e in sub]
    if not elements:
        return None
    if all(_is_scalar(e) for e in elements):
        return "scalars"
    if _uniform_dicts(elements):
        return "records"
    return None


def _numeric_points(elements: Sequence[Any], kind: str) -> bool:
    """
    Plot points: numbers, or flat records of numeric measures with at most one
    non-numeric axis field (a timestamp or category string).
    """
    if kind == "scalars":
        return all(_is_number(e) for e in elements)
    numeric, other = 0, 0
    for key in elements[0]:
        column = [e[key] for e in elements]
        if not all(_is_scalar(v) for v in column):
            return False
        if all(_is_number(v) or v is None for v in column):
            numeric += 1
        else:
            other += 1
    return numeric >= 1 and other <= 1


def _column_store_series(value: dict, min_rows: int) -> Optional[int]:
    """Number of series S when `value` maps every key to S parallel scalar lists."""
    if not value:
        return None
    columns = list(value.values())
    if not all(isinstance(c, list) and c and all(isinstance(s, list) for s in c) for c in columns):
        return None
    series = len(columns[0])
    if any(len(c) != series for c in columns):
        return None
    for s in range(series):
        if len({len(c[s]) for c in columns}) != 1:
            return None
    if not all(_is_scalar(x) for c in columns for sub in c for x in sub):
        return None
    if sum(len(columns[0][s]) for s in range(series)) < min_rows:
        return None
    return series


def _parallel_scalar_store(value: dict, min_rows: int) -> bool:
    if len(value) < 2:
        return False
    columns = list(value.values())
    if not all(isinstance(c, list) and all(_is_scalar(x) for x in c) for c in columns):
        return False
    length = len(columns[0])
    return length >= max(min_rows, 1) and all(len(c) == length for c in columns)


def _sibling_labels(parent: dict, skip: str, series: int) -> tuple[Optional[str], Optional[dict[int, str]]]:
    for key, value in parent.items():
        if key == skip or not isinstance(value, list) or len(value) != series:
            continue
        if all(_is_scalar(v) and v is not None for v in value):
            return key, {i: str(v) for i, v in enumerate(value)}
    return None, None


def _default_labels(series: int) -> dict[int, str]:
    return {i: f"series {i}" for i in range(series)}


def _dotted(path: Sequence[str]) -> str:
    return ".".join(path)


def _name_hint(path: Sequence[str]) -> str:
    for part in reversed(path):
        bare = part.replace("[]", "")
        if bare and not bare.isdigit():
            return bare
    return "root"


class Relationalizer(LoggerMixin):
    def __init__(self, store: Datastore, cfg: TruncationConfig):
        self.store = store
        self.cfg = cfg
        self._object = 0

    def load(self, value: Any, object_index: int = 0) -> None:
        self._object = object_index
        if isinstance(value, dict) and self._try_dict_store(value, [], None) is not None:
            return
        self._visit(value, [])

    # -- walk ---------------------------------------------------------------

    def _visit(self, value: Any, path: list[str]) -> None:
        if isinstance(value, dict):
            consumed: set[str] = set()
            for key, child in value.items():
                if not isinstance(child, dict):
                    continue
                used = self._try_dict_store(child, path + [key], value, key)
                if used is not None:
                    consumed.update(used)
            for key, child in value.items():
                if key not in consumed:
                    self._visit(child, path + [key])
        elif isinstance(value, list):
            if self._try_sibling_series(value, path):
                return
            if self._try_records(value, path):
                return
            if self._try_scalars(value, path):
                return
            for i, item in enumerate(value):
                self._visit(item, path + [str(i)])

    def _try_dict_store(
        self, value: dict, path: list[str], parent: Optional[dict], key: Optional[str] = None
    ) -> Optional[set[str]]:
        """Keys of `parent` consumed by a promoted column store, or None."""
        min_rows = self.cfg.min_table_rows
        series = _column_store_series(value, min_rows)
        if series is not None:
            label_key, labels = _sibling_labels(parent, key, series) if parent is not None else (None, None)
            rows = []
            for s in range(series):
                length = len(next(iter(value.values()))[s])
                for j in range(length):
                    row = {_SERIES_KEY: s}
                    row.update({k: v[s][j] for k, v in value.items()})
                    rows.append(row)
            self._emit(
                hint=_name_hint(path or ["data"]),
                source=_dotted(path),
                fields=list(value),
                rows=rows,
                labels=labels or _default_labels(series),
            )
            return {key, label_key} - {None}
        if _parallel_scalar_store(value, min_rows):
            length = len(next(iter(value.values())))
            rows = [{k: v[j] for k, v in value.items()} for j in range(length)]
            self._emit(hint=_name_hint(path or ["data"]), source=_dotted(path), fields=list(value), rows=rows)
            return {key} - {None}
        return None

    def _try_sibling_series(self, items: list, path: list[str]) -> bool:
        """Chart-like siblings: one list of numeric points each, plus at most a label."""
        if len(items) < 2 or not _uniform_dicts(items):
            return False
        keys = list(items[0])
        list_keys = [k for k in keys if all(isinstance(i[k], list) for i in items)]
        if len(list_keys) != 1:
            return False
        list_key = list_keys[0]
        label_keys = [k for k in keys if k != list_key]
        if len(label_keys) > 1:
            return False
        length = len(items[0][list_key])
        if length < max(self.cfg.min_table_rows, 1) or any(len(i[list_key]) != length for i in items):
            return False
        kind = _child_elements([i[list_key] for i in items])
        if kind is None or not _numeric_points([e for i in items for e in i[list_key]], kind):
            return False

        labels = _default_labels(len(items))
        if label_keys:
            names = [i[label_keys[0]] for i in items]
            if not all(isinstance(n, str) for n in names) or len(set(names)) != len(names):
                return False
            labels = dict(enumerate(names))
        rows = []
        for s, item in enumerate(items):
            for element in item[list_key]:
                row = {_SERIES_KEY: s}
                row.update(element if kind == "records" else {"value": element})
                rows.append(row)
        fields = list(items[0][list_key][0]) if kind == "records" else ["value"]
        self._emit(
            hint=list_key,
            source=f"{_dotted(path)}[].{list_key}" if path else f"[].{list_key}",
            fields=fields,
            rows=rows,
            labels=labels,
        )
        return True

    def _try_records(self, items: list, path: list[str]) -> bool:
        if len(items) < max(self.cfg.min_table_rows, 1) or not _uniform_dicts(items):
            return False
        self._record_table(_name_hint(path), _dotted(path), [(None, i) for i in items], parent=None)
        return True

    def _try_scalars(self, items: list, path: list[str]) -> bool:
        if len(items) <= self.cfg.window or len(items) < self.cfg.min_table_rows:
            return False
        if not all(_is_scalar(i) for i in items):
            return False
        self._emit(hint=_name_hint(path), source=_dotted(path), fields=["value"], rows=[{"value": i} for i in items])
        return True

    # -- table construction ---------------------------------------------------

    def _record_table(
        self,
        hint: str,
        source: str,
        records: list[tuple[Optional[int], dict]],
        parent: Optional[str],
    ) -> None:
        name = self.store.reserve_name(hint)
        dicts = [r for _, r in records]
        columns: list[tuple[str, list[Any], bool]] = []  # (name, values, force_text)
        children: list[tuple[str, list[list]]] = []
        for key in dicts[0]:
            values = [d[key] for d in dicts]
            if all(_is_scalar(v) for v in values):
                columns.append((key, values, False))
            elif _flattenable(values):
                columns.extend((n, v, False) for n, v in _flatten(key, values))
            elif all(isinstance(v, list) for v in values) and _child_elements(values) is not None:
                children.append((key, values))
            else:
                columns.append((key, values, True))

        rows = [dict() for _ in dicts]
        schema_columns: list[ColumnSchema] = []
        taken = {c.lower() for c in _RESERVED_COLUMNS}
        if parent is not None:
            schema_columns.append(ColumnSchema(PARENT_ID, ColumnType.INT))
            for row, (parent_id, _) in zip(rows, records):
                row[PARENT_ID] = parent_id
        for raw_name, values, force_text in columns:
            column_name = self._column_name(raw_name, taken)
            column_type = ColumnType.TEXT if force_text else infer_type(values)
            schema_columns.append(ColumnSchema(column_name, column_type))
            for row, value in zip(rows, values):
                row[column_name] = to_cell(value, column_type)
        schema_columns.append(ColumnSchema(ROW_ID, ColumnType.INT))
        for i, row in enumerate(rows):
            row[ROW_ID] = i

        schema = TableSchema(
            name=name,
            source_path=source,
            columns=schema_columns,
            source_object=self._object,
            parent_key=(parent, PARENT_ID) if parent is not None else None,
        )
        self.store.add_table(Table(schema=schema, rows=rows))

        for key, lists in children:
            child_source = f"{source}[].{key}"
            if _child_elements(lists) == "records":
                child_records = [(rid, e) for rid, sub in enumerate(lists) for e in sub]
            else:
                child_records = [(rid, {"value": e}) for rid, sub in enumerate(lists) for e in sub]
            self._record_table(key, child_source, child_records, parent=name)

    def _emit(
        self,
        hint: str,
        source: str,
        fields: list[str],
        rows: list[dict],
        labels: Optional[dict[int, str]] = None,
    ) -> None:
        name = self.store.reserve_name(hint)
        taken = {c.lower() for c in _RESERVED_COLUMNS}
        schema_columns: list[ColumnSchema] = []
        if labels is not None:
            schema_columns.append(ColumnSchema(SERIES_IDX, ColumnType.INT))
        renamed: list[tuple[str, str, ColumnType]] = []
        for field_name in fields:
            column_name = self._column_name(field_name, taken)
            column_type = infer_type(r.get(field_name) for r in rows)
            renamed.append((field_name, column_name, column_type))
            schema_columns.append(ColumnSchema(column_name, column_type))
        schema_columns.append(ColumnSchema(ROW_ID, ColumnType.INT))

        table_rows = []
        for i, source_row in enumerate(rows):
            row: dict[str, Any] = {}
            if labels is not None:
                row[SERIES_IDX] = source_row[_SERIES_KEY]
            for field_name, column_name, column_type in renamed:
                row[column_name] = to_cell(source_row.get(field_name), column_type)
            row[ROW_ID] = i
            table_rows.append(row)

        schema = TableSchema(
            name=name,
            source_path=source,
            columns=schema_columns,
            source_object=self._object,
            series_labels=labels,
        )
        self.store.add_table(Table(schema=schema, rows=table_rows))

    @staticmethod
    def _column_name(raw: str, taken: set[str]) -> str:
        base = sanitize_identifier(raw, fallback="c")
        if base.lower() in {c.lower() for c in _RESERVED_COLUMNS}:
            base = f"{base}_field"
        name, n = base, 1
        while name.lower() in taken:
            n += 1
            name = f"{base}_{n}"
        taken.add(name.lower())
        return name


def build_datastore(
    objects: Sequence[Any], cfg: TruncationConfig, store: Optional[Datastore] = None
) -> Datastore:
    store = store if store is not None else Datastore()
    relationalizer = Relationalizer(store, cfg)
    for index, value in enumerate(objects):
        relationalizer.load(value, object_index=index)
    relationalizer.logger.info(
        "Datastore built",
        extra={"extra_data": {
            "scope": store.scope,
            "tables": {name: t.schema.row_count for name, t in store.tables.items()},
        }},
    )
    return store
