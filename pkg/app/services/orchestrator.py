"""
End-to-end request handling with a bounded number of LLM calls.

Mode 1 answers from the primary call. Mode 2 discloses the BackfillData
contract in one follow-up call and fills the returned template from the
datastore. Mode 3 runs the requested SQL, appends the results and makes one
follow-up call. SQL failures may spend the optional repair budget.
"""
import json
from dataclasses import dataclass
from typing import Any, Optional

from app.config import RenderFormat, Settings
from app.engines.duckdb.client import Datastore
from app.engines.duckdb.models import SqlResult
from app.engines.duckdb.sql import execute_sql
from app.engines.llm.base import LlmClient
from app.engines.logging import LoggerMixin
from app.errors import BudgetExhaustedError, LlmTransportError, SqlExecutionError
from app.rendering.formats import format_cell
from app.rendering.layout import PromptStage
from app.rendering.sql_prompt import generate_sql_prompt, tool_specs
from app.rendering.tokens import TokenCounter
from app.schemas.v1.llm import ChatMessage, ChatResponse, Usage
from app.schemas.v1.reports import RequestResult, RunReport
from app.schemas.v1.tools import ToolCallPayload
from app.services.backfill import execute_backfill
from app.services.hybrid_view import HybridView, build_hybrid_view
from app.services.tool_calls import ModeDecision, inline_objects, parse_tool_call, route_mode

MODE2_INSTRUCTION = "Respond with one BackfillData call whose template is your final JSON output."
MODE3_INSTRUCTION = "Answer the original request using these results. Do not call a tool."
REPAIR_INSTRUCTION = "The query failed. Reply with the same tool call, corrected."


@dataclass
class InvocationBudget:
    followup_remaining: int = 1
    repair_remaining: int = 0
    primary_used: bool = False
    calls: int = 0

    @classmethod
    def from_settings(cls, settings: Settings) -> "InvocationBudget":
        return cls(followup_remaining=settings.followup_budget, repair_remaining=settings.repair_budget)

    def take_primary(self) -> None:
        if self.primary_used:
            raise BudgetExhaustedError()
        self.primary_used = True
        self.calls += 1

    def take_followup(self) -> None:
        if self.followup_remaining < 1:
            raise BudgetExhaustedError()
        self.followup_remaining -= 1
        self.calls += 1

    def take_repair(self) -> None:
        if self.repair_remaining < 1:
            raise BudgetExhaustedError()
        self.repair_remaining -= 1
        self.calls += 1


def format_result(result: SqlResult, cap: int) -> str:
    """`col: value` lines for one row, otherwise a pipe table capped at `cap` rows."""
    if len(result) == 1:
        # operator reports are multi-line text and stay readable as-is
        return "\n".join(
            f"{c}: {v if isinstance(v, str) else format_cell(v)}" for c, v in zip(result.columns, result.rows[0])
        )
    lines = [" | ".join(result.columns)]
    lines.extend(" | ".join(format_cell(v) for v in row) for row in result.rows[:cap])
    if len(result) > cap:
        lines.append(f"... ({len(result) - cap} more rows not shown)")
    if not result.rows:
        lines.append("(no rows)")
    return "\n".join(lines)


def format_evidence(queries: list[str], results: list[SqlResult], cap: int) -> str:
    blocks = ["SQL results:"]
    for i, (query, result) in enumerate(zip(queries, results), 1):
        blocks.append(f"[{i}] {query}\n{format_result(result, cap)}")
    return "\n\n".join(blocks)


def _call_text(response: ChatResponse, payload: Optional[ToolCallPayload]) -> str:
    if payload is not None:
        return json.dumps(payload.model_dump(exclude_none=True), ensure_ascii=False)
    return response.text


class Orchestrator(LoggerMixin):
    def __init__(self, client: LlmClient, settings: Settings):
        self.client = client
        self.settings = settings
        self.usage = Usage()

    async def _send(self, messages: list[ChatMessage], tools: Optional[list[dict]] = None) -> ChatResponse:
        response = await self.client.send(messages, tools if self.settings.native_tools else None)
        self.usage = self.usage + response.usage
        return response

    async def _run_queries(
        self, queries: list[str], store: Datastore, context: list[ChatMessage], budget: InvocationBudget
    ) -> tuple[list[str], list[SqlResult]]:
        queries = list(queries)
        results: list[SqlResult] = []
        index = 0
        while index < len(queries):
            try:
                results.append(execute_sql(store, queries[index]))
                index += 1
            except SqlExecutionError as e:
                if budget.repair_remaining < 1:
                    raise
                revised = await self._repair(context, queries[index], e, budget)
                if revised is None or not revised.queries:
                    raise
                queries[index] = revised.queries[0]
        return queries, results

    async def _repair(
        self, context: list[ChatMessage], query: str, error: SqlExecutionError, budget: InvocationBudget
    ) -> Optional[ToolCallPayload]:
        budget.take_repair()
        self.logger.info(f"Requesting SQL repair: {error.message}")
        position = f" at position {error.position}" if error.position is not None else ""
        message = ChatMessage(
            role="user",
            content=f"{REPAIR_INSTRUCTION}\nQuery: {query}\nError{position}: {error.message}",
        )
        response = await self._send(context + [message])
        return parse_tool_call(response)

    async def synthesize_with_evidence(
        self,
        queries: list[str],
        store: Datastore,
        context: list[ChatMessage],
        budget: InvocationBudget,
    ) -> str:
        if budget.followup_remaining < 1:
            raise BudgetExhaustedError()
        queries, results = await self._run_queries(queries, store, context, budget)
        evidence = format_evidence(queries, results, self.settings.evidence_row_cap)
        budget.take_followup()
        response = await self._send(context + [ChatMessage(role="user", content=f"{evidence}\n\n{MODE3_INSTRUCTION}")])
        return response.text

    async def template_backfill(
        self,
        view: HybridView,
        payload: ToolCallPayload,
        context: list[ChatMessage],
        budget: InvocationBudget,
    ) -> Any:
        if payload.tool_name != "BackfillData":
            budget.take_followup()
            disclosure = generate_sql_prompt(view.store, PromptStage.MODE2_FOLLOW_UP)
            context = context + [ChatMessage(role="user", content=f"{disclosure}\n\n{MODE2_INSTRUCTION}")]
            response = await self._send(context, tool_specs(PromptStage.MODE2_FOLLOW_UP))
            payload = parse_tool_call(response)
            if payload is None or payload.tool_name != "BackfillData":
                self.logger.warning("Follow-up did not return a BackfillData call; using its text")
                return response.text
            context = context + [ChatMessage(role="assistant", content=_call_text(response, payload))]
            template = payload.template
            if template is None:
                # template sent as a separate JSON block next to the call
                template = next(
                    (v for v in inline_objects(response.text) if not (isinstance(v, dict) and "tool_name" in v)),
                    None,
                )
        else:
            template = payload.template

        while True:
            try:
                return execute_backfill(template, payload, view.store)
            except SqlExecutionError as e:
                if budget.repair_remaining < 1:
                    raise
                revised = await self._repair(context, payload.queries[0], e, budget)
                if revised is None or revised.tool_name != "BackfillData":
                    raise
                payload = revised if revised.template is not None else revised.model_copy(update={"template": template})

    async def process_request(
        self,
        raw: str,
        fmt: Optional[RenderFormat] = None,
        counter: Optional[TokenCounter] = None,
    ) -> RequestResult:
        budget = InvocationBudget.from_settings(self.settings)
        self.usage = Usage()
        with build_hybrid_view(raw, self.settings, fmt, counter=counter) as view:
            context = [ChatMessage(role="user", content=view.prompt)]
            mode = ModeDecision.DIRECT
            answer: Any = None
            incomplete = False
            error: Optional[str] = None

            def report() -> RunReport:
                return RunReport(
                    **view.stats.model_dump(),
                    mode=mode.value,
                    llm_calls=budget.calls,
                    provider_prompt_tokens=self.usage.prompt_tokens,
                    provider_completion_tokens=self.usage.completion_tokens,
                    incomplete=incomplete,
                    error=error,
                )

            try:
                budget.take_primary()
                primary = await self._send(context, tool_specs(PromptStage.PRIMARY_CALL) if view.truncated else None)
                answer = primary.text
                payload = parse_tool_call(primary) if view.truncated else None
                mode = route_mode(payload, view.truncated)
                self.logger.info(f"Mode selected: {mode.value}")
                if mode is not ModeDecision.DIRECT:
                    context = context + [ChatMessage(role="assistant", content=_call_text(primary, payload))]
                if mode is ModeDecision.TEMPLATE_BACKFILL:
                    answer = await self.template_backfill(view, payload, context, budget)
                elif mode is ModeDecision.SQL_SYNTHESIS:
                    answer = await self.synthesize_with_evidence(payload.queries, view.store, context, budget)
            except BudgetExhaustedError as e:
                self.logger.warning("Invocation budget exhausted; returning best available answer")
                incomplete = True
                error = str(e)
            except LlmTransportError as e:
                error = str(e)
                incomplete = True
                e.partial = RequestResult(answer=answer, report=report())
                self.logger.error("LLM transport failed", exc_info=True)
                raise

            result = RequestResult(answer=answer, report=report())
        self.logger.info(
            "Request finished",
            extra={"extra_data": {"mode": mode.value, "llm_calls": budget.calls, "incomplete": incomplete}},
        )
        return result


async def process_request(
    raw: str,
    client: LlmClient,
    settings: Settings,
    fmt: Optional[RenderFormat] = None,
    counter: Optional[TokenCounter] = None,
) -> RequestResult:
    return await Orchestrator(client, settings).process_request(raw, fmt, counter)


async def synthesize_with_evidence(
    queries: list[str],
    store: Datastore,
    context: list[ChatMessage],
    client: LlmClient,
    budget: InvocationBudget,
    settings: Optional[Settings] = None,
) -> str:
    return await Orchestrator(client, settings or Settings()).synthesize_with_evidence(queries, store, context, budget)
