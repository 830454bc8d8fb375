from app.engines.duckdb.client import Datastore
from app.engines.duckdb.models import Table

EMPTY_STORE = "No tables available."


def _table_block(table: Table) -> list[str]:
    schema = table.schema
    lines = [f"Table: {schema.name}", f"  Source: {schema.source_path or '$'}", f"  Total rows: {schema.row_count}"]
    if schema.is_series:
        rows_per_series = table.rows_per_series
        if rows_per_series is not None:
            lines.append(f"  Rows per series: {rows_per_series}")
        labels = ", ".join(f"{i}='{label}'" for i, label in sorted(schema.series_labels.items()))
        lines.append(f"  series_idx values: {labels}")
    if schema.parent_key is not None:
        parent, key = schema.parent_key
        lines.append(f"  Parent: {parent} ({key} -> {parent}._row_id)")
    lines.append("  Columns:")
    lines.extend(f"    - {c.name} ({c.type.value})" for c in schema.columns)
    return lines


def schema_description(store: Datastore) -> str:
    """Plain-text listing of every table, in creation order."""
    if not store.tables:
        return EMPTY_STORE
    lines = ["Available tables in datastore:"]
    for table in store.tables.values():
        lines.extend(_table_block(table))
    return "\n".join(lines)
