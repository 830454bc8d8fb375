"""
Stage-specific tool prompts generated from the live datastore schema.

The primary call shows QueryDatastore in full and GenTemplateAndBackfill as
an entry point only. The BackfillData contract is disclosed in the Mode 2
follow-up and nowhere else.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

from app.engines.duckdb.client import Datastore
from app.engines.duckdb.describe import schema_description
from app.engines.duckdb.models import PARENT_ID, ROW_ID, SERIES_IDX, ColumnType, Table
from app.rendering.layout import PromptStage

TOOL_SELECTION_HEADER = "###Tool Selection (data is truncated, with the complete data in datastore):"
FEW_SHOT_HEADER = "### Few-Shot Query Examples:"
BACKFILL_HEADER = "###Tool: BackfillData"
MAX_EXAMPLES = 3


class ToolName(str, Enum):
    GEN_TEMPLATE_AND_BACKFILL = "GenTemplateAndBackfill"
    QUERY_DATASTORE = "QueryDatastore"
    BACKFILL_DATA = "BackfillData"


class DisclosureLevel(str, Enum):
    ENTRY_POINT_ONLY = "EntryPointOnly"
    FULL_SPECIFICATION = "FullSpecification"


@dataclass(frozen=True)
class ToolContract:
    tool: ToolName
    disclosure_level: DisclosureLevel


def contracts_for(stage: PromptStage) -> tuple[ToolContract, ...]:
    if stage is PromptStage.PRIMARY_CALL:
        return (
            ToolContract(ToolName.GEN_TEMPLATE_AND_BACKFILL, DisclosureLevel.ENTRY_POINT_ONLY),
            ToolContract(ToolName.QUERY_DATASTORE, DisclosureLevel.FULL_SPECIFICATION),
        )
    if stage is PromptStage.MODE2_FOLLOW_UP:
        return (ToolContract(ToolName.BACKFILL_DATA, DisclosureLevel.FULL_SPECIFICATION),)
    return ()


_QUERY_DATASTORE_CONTRACT = """\
- QueryDatastore: run read-only SQL over the complete data, then answer from the results.
  Call format: {"tool_name": "QueryDatastore", "queries": ["SELECT ..."]}
  Rules:
  - DuckDB SQL; each query string holds one SELECT or WITH statement.
  - Every table has a _row_id column in original order; ORDER BY _row_id to keep that order.
  - Multi-series tables hold one row per point, tagged by series_idx (labels listed below).
  - Child tables join their parent on child.parent_id = parent._row_id.
  - DETECT_ANOMALY(table, column[, k]) returns a report of values more than k standard deviations from the mean (k defaults to 2).
  - DESCRIBE_TREND(table, column) returns a slope and range summary per series."""

_GEN_TEMPLATE_ENTRY = """\
- GenTemplateAndBackfill: choose this when the answer must reproduce the complete data in a structured output (a chart, table or full list).
  Call format: {"tool_name": "GenTemplateAndBackfill"}. Its full contract is provided after you select it."""

_BACKFILL_CONTRACT = """\
Write the final JSON output as a template that contains one example element per list, then call BackfillData to fill every list from SQL results.
Call format:
{"tool_name": "BackfillData", "queries": ["SELECT ..."], "template": <your JSON template>, "mappings": [{"sql_column": "<result column>", "template_path": "<path>"}]}
Path grammar:
- Dot-separated keys from the template root, for example props.series.
- (name) marks a list index filled from query rows; the last (name) in a path is the row position inside its list.
- A (name) that is also a result column, such as (series_idx), groups rows: one list element per distinct value, in row order.
- A path without (name) receives a single value and needs a one-row result.
Rules:
- Order the query rows the way the lists must be filled, e.g. ORDER BY series_idx, _row_id.
- Every sql_column must be a column of the query result; every list in a path must exist in the template."""


def _primary_table(store: Datastore) -> Optional[Table]:
    best = None
    for table in store.tables.values():
        if best is None or table.schema.row_count > best.schema.row_count:
            best = table
    return best


def _value_columns(table: Table) -> list[str]:
    return [c.name for c in table.schema.columns if c.name not in (ROW_ID, SERIES_IDX, PARENT_ID)]


def _numeric_columns(table: Table) -> list[str]:
    return [c.name for c in table.schema.columns if c.type.numeric and c.name not in (ROW_ID, SERIES_IDX, PARENT_ID)]


def _text_columns(table: Table) -> list[str]:
    return [c.name for c in table.schema.columns if c.type is ColumnType.TEXT]


def _sql_string(value: Any) -> str:
    return "'" + str(value).replace("'", "''") + "'"


def few_shot_examples(store: Datastore) -> list[tuple[str, str]]:
    """(description, SQL) pairs using the real names of the largest table."""
    table = _primary_table(store)
    if table is None:
        return []
    name = table.name
    series = table.schema.is_series
    values = _value_columns(table)
    numeric = _numeric_columns(table)
    text = _text_columns(table)
    order = f"{SERIES_IDX}, {ROW_ID}" if series else ROW_ID
    select = ", ".join(([SERIES_IDX] if series else []) + values)

    examples = [("All rows in original order", f"SELECT {select} FROM {name} ORDER BY {order}")]

    if series:
        examples.append((
            f"Points of series 0 ('{table.schema.series_labels.get(0, 0)}')",
            f"SELECT {', '.join(values)} FROM {name} WHERE {SERIES_IDX} = 0 ORDER BY {ROW_ID}",
        ))
    elif text and table.rows:
        column = text[0]
        sample = next((r[column] for r in table.rows if r[column] is not None), "")
        examples.append((
            f"Rows where {column} matches a value",
            f"SELECT * FROM {name} WHERE {column} = {_sql_string(sample)} ORDER BY {ROW_ID}",
        ))
    elif numeric:
        column = numeric[0]
        examples.append((
            f"Rows with {column} above its average",
            f"SELECT * FROM {name} WHERE {column} > (SELECT AVG({column}) FROM {name}) ORDER BY {ROW_ID}",
        ))

    child = next((t for t in store.tables.values() if t.schema.parent_key and t.schema.parent_key[0] == name), None)
    if child is not None:
        examples.append((
            f"{child.name} joined to their {name} row",
            f"SELECT p.{ROW_ID} AS parent_row, c.* FROM {name} p JOIN {child.name} c "
            f"ON c.{PARENT_ID} = p.{ROW_ID} ORDER BY p.{ROW_ID}, c.{ROW_ID}",
        ))
    elif numeric:
        column = numeric[-1]
        aggregates = f"COUNT(*) AS n, AVG({column}) AS avg_{column}, MAX({column}) AS max_{column}"
        if series:
            examples.append((
                f"Per-series summary of {column}",
                f"SELECT {SERIES_IDX}, {aggregates} FROM {name} GROUP BY {SERIES_IDX} ORDER BY {SERIES_IDX}",
            ))
        elif text:
            examples.append((
                f"{column} grouped by {text[0]}",
                f"SELECT {text[0]}, {aggregates} FROM {name} GROUP BY {text[0]} ORDER BY n DESC",
            ))
        else:
            examples.append((f"Summary of {column}", f"SELECT {aggregates} FROM {name}"))
    elif text:
        examples.append((
            f"Row count per {text[0]}",
            f"SELECT {text[0]}, COUNT(*) AS n FROM {name} GROUP BY {text[0]} ORDER BY n DESC",
        ))
    return examples[:MAX_EXAMPLES]


def _render_examples(examples: list[tuple[str, str]]) -> str:
    lines = [FEW_SHOT_HEADER]
    for i, (description, sql) in enumerate(examples, 1):
        lines.append(f"{i}. {description}:")
        lines.append(f"   {sql}")
    return "\n".join(lines)


def _backfill_example(store: Datastore) -> str:
    series = next((t for t in store.tables.values() if t.schema.is_series), None)
    table = series or _primary_table(store)
    if table is None:
        return ""
    values = _value_columns(table) or [ROW_ID]
    column = values[0]
    if series is not None:
        query = f"SELECT {', '.join(values)}, {SERIES_IDX} FROM {table.name} ORDER BY {SERIES_IDX}, {ROW_ID}"
        path = f"path.to.list.({SERIES_IDX}).data.(N).{column}"
    else:
        query = f"SELECT {', '.join(values)} FROM {table.name} ORDER BY {ROW_ID}"
        path = f"path.to.list.(N).{column}"
    return "\n".join([
        "Example:",
        f"  query: {query}",
        f'  mapping: {{"sql_column": "{column}", "template_path": "{path}"}}',
    ])


def generate_sql_prompt(store: Datastore, stage: PromptStage) -> str:
    if stage is PromptStage.MODE3_FOLLOW_UP:
        return ""
    if stage is PromptStage.MODE2_FOLLOW_UP:
        sections = [BACKFILL_HEADER, _BACKFILL_CONTRACT, _backfill_example(store), schema_description(store)]
        return "\n\n".join(s for s in sections if s)
    examples = few_shot_examples(store)
    sections = [
        "\n".join([
            TOOL_SELECTION_HEADER,
            "Only part of the data is shown above. If the answer needs the complete data, call one tool:",
            _GEN_TEMPLATE_ENTRY,
            _QUERY_DATASTORE_CONTRACT,
            "If the visible data is enough, answer directly without a tool call.",
        ]),
        schema_description(store),
        _render_examples(examples) if examples else "",
    ]
    return "\n\n".join(s for s in sections if s)


_QUERIES_SCHEMA = {
    "type": "array",
    "items": {"type": "string"},
    "description": "Read-only DuckDB SELECT statements over the datastore tables",
}


def tool_specs(stage: PromptStage) -> list[dict[str, Any]]:
    """Chat-completions `tools` array for the stage."""
    specs = []
    for contract in contracts_for(stage):
        if contract.tool is ToolName.GEN_TEMPLATE_AND_BACKFILL:
            parameters: dict[str, Any] = {"type": "object", "properties": {}}
            description = "Select when the answer must reproduce the complete data in a structured output"
        elif contract.tool is ToolName.QUERY_DATASTORE:
            parameters = {"type": "object", "properties": {"queries": _QUERIES_SCHEMA}, "required": ["queries"]}
            description = "Run SQL over the complete data and answer from the results"
        else:
            parameters = {
                "type": "object",
                "properties": {
                    "queries": _QUERIES_SCHEMA,
                    "template": {"type": "object", "description": "JSON output with one example element per list"},
                    "mappings": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "properties": {
                                "sql_column": {"type": "string"},
                                "template_path": {"type": "string"},
                            },
                            "required": ["sql_column", "template_path"],
                        },
                    },
                },
                "required": ["queries", "template", "mappings"],
            }
            description = "Fill the template's lists from SQL results"
        specs.append({
            "type": "function",
            "function": {"name": contract.tool.value, "description": description, "parameters": parameters},
        })
    return specs
