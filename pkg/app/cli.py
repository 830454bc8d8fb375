"""
Command-line entry point.

    hyview transform [FILE] [--stats] [--format toon]
    hyview query [FILE] --sql "SELECT COUNT(*) FROM data"
    hyview run [FILE] --scenario scenario.json --report
    hyview report-schema

Input is read from stdin when FILE is omitted. Logs go to stderr.
Exit codes: 0 ok, 2 input, 3 query, 4 configuration, 5 LLM/budget.
"""
import argparse
import asyncio
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from dotenv import load_dotenv

from app.config import RenderFormat, Settings, load_settings
from app.engines.duckdb.models import SqlResult
from app.engines.duckdb.relationalize import build_datastore
from app.engines.duckdb.sql import execute_sql
from app.engines.llm.base import LlmClient
from app.engines.llm.http import HttpLlmClient
from app.engines.llm.scripted import ScriptedLlmClient
from app.engines.logging import get_logger, setup_logging
from app.errors import (
    BackfillError,
    BudgetExhaustedError,
    ConfigError,
    DatastoreError,
    HybridViewError,
    InputError,
    LlmTransportError,
    ToolCallValidationError,
)
from app.parsing.document import parse_document
from app.parsing.robust import RobustParser
from app.rendering.formats import format_cell
from app.schemas.v1.reports import RunReport
from app.services.hybrid_view import build_hybrid_view
from app.services.orchestrator import process_request

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_QUERY = 3
EXIT_CONFIG = 4
EXIT_LLM = 5

_EXIT_CODES = (
    (InputError, EXIT_INPUT),
    (DatastoreError, EXIT_QUERY),
    (ConfigError, EXIT_CONFIG),
    (BudgetExhaustedError, EXIT_LLM),
    (LlmTransportError, EXIT_LLM),
    (ToolCallValidationError, EXIT_LLM),
    (BackfillError, EXIT_LLM),
)

logger = get_logger("cli")


def exit_code_for(exc: HybridViewError) -> int:
    for error_type, code in _EXIT_CODES:
        if isinstance(exc, error_type):
            return code
    return EXIT_INPUT


def read_input(path: Optional[str]) -> str:
    try:
        if path is None or path == "-":
            return sys.stdin.read()
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read input {path or '<stdin>'}: {e}") from e


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", help="Input file (stdin when omitted)")
    common.add_argument("--config", type=Path, help="Flat JSON config file")
    common.add_argument("--format", choices=[f.value for f in RenderFormat], help="Column view rendering")
    common.add_argument("--prefix", type=int, dest="prefix_len", help="Items kept from the head of a list")
    common.add_argument("--suffix", type=int, dest="suffix_len", help="Items kept from the tail of a list")
    common.add_argument("--ranked-extra", type=int, dest="ranked_extra", help="Relevance-picked middle items")
    common.add_argument("--row-top-k", type=int, dest="row_top_k", help="Rows shown in the row view")
    common.add_argument("--output", choices=["text", "json"], default="text", help="Output style")
    common.add_argument("--log-level", dest="log_level", help="Logging level (stderr)")

    parser = argparse.ArgumentParser(prog="hyview", description="Hybrid-view prompts for mixed text/JSON inputs")
    commands = parser.add_subparsers(dest="command", required=True)

    transform = commands.add_parser("transform", parents=[common], help="Print the transformed prompt")
    transform.add_argument("--stats", action="store_true", help="Report token estimates and tables")

    query = commands.add_parser("query", parents=[common], help="Run SQL over the input's datastore")
    query.add_argument("--sql", required=True, help="Read-only SQL; DETECT_ANOMALY/DESCRIBE_TREND allowed")

    run = commands.add_parser("run", parents=[common], help="End-to-end request against an LLM")
    run.add_argument("--scenario", type=Path, help="Scripted responses instead of an endpoint")
    run.add_argument("--endpoint", dest="llm_base_url", help="Chat-completions base URL")
    run.add_argument("--model", dest="llm_model", help="Model name")
    run.add_argument("--budget-repair", type=int, dest="repair_budget", help="SQL repair calls allowed")
    run.add_argument("--report", action="store_true", help="Report mode, calls and token estimates")

    commands.add_parser("report-schema", help="Print the JSON schema of run reports")
    return parser


def settings_from_args(args: argparse.Namespace) -> Settings:
    knobs = (
        "prefix_len", "suffix_len", "ranked_extra", "row_top_k", "log_level",
        "llm_base_url", "llm_model", "repair_budget",
    )
    overrides = {k: getattr(args, k, None) for k in knobs}
    overrides["render_format"] = args.format
    return load_settings(args.config, **overrides)


def _emit_json(data: Any, stream=None) -> None:
    print(json.dumps(data, ensure_ascii=False, indent=2, default=str), file=stream or sys.stdout)


def format_table(result: SqlResult) -> str:
    if len(result.columns) == 1 and len(result) == 1 and isinstance(result.rows[0][0], str):
        return result.rows[0][0]
    cells = [list(result.columns)] + [[format_cell(v) for v in row] for row in result.rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(result.columns))]
    lines = [" | ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "-+-".join("-" * w for w in widths))
    return "\n".join(lines)


def cmd_transform(args: argparse.Namespace, settings: Settings) -> int:
    raw = read_input(args.input)
    with build_hybrid_view(raw, settings) as view:
        if args.output == "json":
            _emit_json({"prompt": view.prompt, "stats": view.stats.model_dump()})
            return EXIT_OK
        sys.stdout.write(view.prompt)
        if not view.prompt.endswith("\n"):
            sys.stdout.write("\n")
        if args.stats:
            _emit_json(view.stats.model_dump(), sys.stderr)
    return EXIT_OK


def cmd_query(args: argparse.Namespace, settings: Settings) -> int:
    raw = read_input(args.input)
    objects = parse_document(raw, RobustParser(settings.coverage_threshold)).values
    with build_datastore(objects, settings.truncation()) as store:
        result = execute_sql(store, args.sql)
    if args.output == "json":
        _emit_json({"columns": list(result.columns), "rows": [list(r) for r in result.rows]})
    else:
        print(format_table(result))
    return EXIT_OK


def make_client(args: argparse.Namespace, settings: Settings) -> LlmClient:
    if args.scenario is not None:
        return ScriptedLlmClient.from_file(args.scenario)
    return HttpLlmClient.from_settings(settings)


async def _run(raw: str, client: LlmClient, settings: Settings):
    try:
        return await process_request(raw, client, settings)
    finally:
        await client.close()


def cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    raw = read_input(args.input)
    client = make_client(args, settings)
    try:
        result = asyncio.run(_run(raw, client, settings))
    except LlmTransportError as e:
        if args.report and e.partial is not None:
            _emit_json(e.partial.report.model_dump(), sys.stderr)
        raise
    report = result.report.model_dump()
    if args.output == "json":
        _emit_json({"answer": result.answer, "report": report})
    else:
        answer = result.answer
        print(answer if isinstance(answer, str) else json.dumps(answer, ensure_ascii=False, indent=2))
        if args.report:
            _emit_json(report, sys.stderr)
    return EXIT_LLM if result.report.incomplete else EXIT_OK


def cmd_report_schema(args: argparse.Namespace, settings: Optional[Settings]) -> int:
    _emit_json(RunReport.model_json_schema())
    return EXIT_OK


_COMMANDS = {
    "transform": cmd_transform,
    "query": cmd_query,
    "run": cmd_run,
    "report-schema": cmd_report_schema,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    if args.command == "report-schema":
        return cmd_report_schema(args, None)
    try:
        settings = settings_from_args(args)
        setup_logging(level=settings.log_level, log_file=settings.log_file, stream=sys.stderr)
        return _COMMANDS[args.command](args, settings)
    except HybridViewError as e:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
