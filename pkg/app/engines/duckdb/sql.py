import re

from app.engines.duckdb.client import Datastore
from app.engines.duckdb.models import SqlResult
from app.engines.duckdb.operators import DEFAULT_K, describe_trend, detect_anomaly
from app.engines.logging import log_function_call
from app.errors import AnomalyInputError, SqlExecutionError

_PSEUDO_CALL = re.compile(
    r"\b(DETECT_ANOMALY|DESCRIBE_TREND)\s*\(\s*"
    r"\"?([A-Za-z_][\w]*)\"?\s*,\s*\"?([A-Za-z_][\w]*)\"?"
    r"(?:\s*,\s*([0-9]*\.?[0-9]+))?\s*\)"
    r"(\s+AS\s+\"?\w+\"?)?",
    re.IGNORECASE,
)
_COMMENTS = re.compile(r"--[^\n]*|/\*.*?\*/", re.DOTALL)
_READ_ONLY = re.compile(
    r"^(?:\(\s*)*(select|with|from|describe|show|summarize|values|detect_anomaly|describe_trend)\b",
    re.IGNORECASE,
)
_STATEMENT_START = re.compile(r"^\s*(?:\(\s*)*(select|with)\b", re.IGNORECASE)


def sql_literal(text: str) -> str:
    return "'" + text.replace("'", "''") + "'"


def rewrite_pseudo_functions(query: str, store: Datastore) -> str:
    """Replace DETECT_ANOMALY/DESCRIBE_TREND calls with their rendered report as a string literal."""

    def replace(match: re.Match) -> str:
        function, table, column, k, alias = match.groups()
        try:
            if function.upper() == "DETECT_ANOMALY":
                report = detect_anomaly(store, table, column, float(k) if k else DEFAULT_K)
                default_alias = " AS anomaly_report"
            else:
                report = describe_trend(store, table, column)
                default_alias = " AS trend_report"
        except AnomalyInputError as e:
            raise SqlExecutionError(str(e), position=match.start(), query=query) from e
        return sql_literal(report.render()) + (alias or default_alias)

    rewritten = _PSEUDO_CALL.sub(replace, query)
    if rewritten != query and not _STATEMENT_START.match(rewritten):
        rewritten = "SELECT " + rewritten.lstrip()
    return rewritten


def ensure_read_only(query: str) -> str:
    body = _COMMENTS.sub(" ", query).strip().rstrip(";").strip()
    if not body:
        raise SqlExecutionError("empty query", position=0, query=query)
    if ";" in _strip_literals(body):
        raise SqlExecutionError("only a single statement is allowed", query=query)
    if not _READ_ONLY.match(body):
        raise SqlExecutionError("only read-only SELECT queries are allowed", position=0, query=query)
    return body


def _strip_literals(sql: str) -> str:
    return re.sub(r"'(?:[^']|'')*'", "''", sql)


@log_function_call
def execute_sql(store: Datastore, query: str) -> SqlResult:
    ensure_read_only(query)
    return store.execute(rewrite_pseudo_functions(query.strip().rstrip(";").strip(), store))
