import pytest

from app.engines.duckdb.models import SqlResult
from app.engines.llm.scripted import ScriptedLlmClient
from app.errors import BudgetExhaustedError, LlmTransportError, SqlExecutionError
from app.rendering.layout import PromptStage
from app.rendering.sql_prompt import BACKFILL_HEADER, TOOL_SELECTION_HEADER, tool_specs
from app.services.orchestrator import (
    MODE2_INSTRUCTION,
    MODE3_INSTRUCTION,
    REPAIR_INSTRUCTION,
    InvocationBudget,
    Orchestrator,
    format_result,
    process_request,
)
from tests.factories import FIXTURES_DIR, card_input, forex_input, forex_payload, latency_records, wrap

SCENARIOS = FIXTURES_DIR / "scenarios"
LATENCY_INPUT = wrap("Latency samples (ms):\n", latency_records(), "\nIs there any anomaly in the latency?")
SMALL_INPUT = wrap("Hosts:\n", {"hosts": [{"name": "a1", "up": True}, {"name": "b2", "up": False}]}, "\nWhich is down?")


def _scenario(name: str) -> ScriptedLlmClient:
    return ScriptedLlmClient.from_file(SCENARIOS / f"{name}.json")


def _query_call(*queries: str) -> dict:
    return {"tool_calls": [{"name": "QueryDatastore", "arguments": {"queries": list(queries)}}]}


@pytest.mark.asyncio
async def test_mode1_direct_answer(settings):
    """A plain answer ends the request after one call"""
    client = _scenario("mode1")
    result = await process_request(card_input(), client, settings)
    assert result.answer == "New York, NY had the highest latency spike."
    assert result.report.mode == "Direct"
    assert result.report.llm_calls == 1
    assert result.report.provider_prompt_tokens == 1200
    assert client.tools[0] == tool_specs(PromptStage.PRIMARY_CALL)
    assert TOOL_SELECTION_HEADER in client.requests[0][0].content


@pytest.mark.asyncio
async def test_untruncated_input_sends_no_tools(settings):
    """Without truncation tool calls are ignored and no tools are offered"""
    client = ScriptedLlmClient([_query_call("SELECT 1")])
    result = await process_request(SMALL_INPUT, client, settings)
    assert client.tools == [None]
    assert result.report.mode == "Direct"
    assert not result.report.truncation_triggered


@pytest.mark.asyncio
async def test_native_tools_can_be_disabled(settings):
    client = _scenario("mode1")
    await process_request(card_input(), client, settings.model_copy(update={"native_tools": False}))
    assert client.tools == [None]
    assert TOOL_SELECTION_HEADER in client.requests[0][0].content


@pytest.mark.asyncio
async def test_mode2_forex_backfill(settings):
    """Template backfill returns all 778 points of each series"""
    client = _scenario("mode2_forex")
    result = await process_request(forex_input(), client, settings)
    assert result.report.mode == "TemplateBackfill"
    assert result.report.llm_calls == 2
    source = forex_payload()["CDSAILineChart"]["data"]["list"]
    series = result.answer["chart"]["series"]
    assert [len(s["points"]) for s in series] == [778, 778, 778]
    assert [s["points"] for s in series] == [s["data"] for s in source]

    followup = client.requests[1]
    assert followup[1].role == "assistant"
    assert "GenTemplateAndBackfill" in followup[1].content
    assert followup[-1].content.startswith(BACKFILL_HEADER)
    assert followup[-1].content.endswith(MODE2_INSTRUCTION)
    assert client.tools[1] == tool_specs(PromptStage.MODE2_FOLLOW_UP)
    assert "BackfillData" not in client.requests[0][0].content


@pytest.mark.asyncio
async def test_mode2_backfill_in_primary_call(settings):
    """A BackfillData call on the first turn needs no disclosure call"""
    client = ScriptedLlmClient([{"tool_calls": [{"name": "BackfillData", "arguments": {
        "queries": ["SELECT x FROM data ORDER BY _row_id"],
        "template": {"xs": [0]},
        "mappings": [{"sql_column": "x", "template_path": "xs.(N)"}],
    }}]}])
    result = await process_request(LATENCY_INPUT, client, settings)
    assert result.answer == {"xs": list(range(200))}
    assert result.report.llm_calls == 1


@pytest.mark.asyncio
async def test_mode2_followup_without_call_returns_text(settings):
    client = ScriptedLlmClient([{"tool_calls": [{"name": "GenTemplateAndBackfill", "arguments": {}}]}, "No template."])
    result = await process_request(forex_input(), client, settings)
    assert result.answer == "No template."
    assert result.report.llm_calls == 2


@pytest.mark.asyncio
async def test_mode3_anomaly_evidence(settings):
    """Operator reports are appended verbatim before the follow-up call"""
    client = _scenario("mode3_anomaly")
    result = await process_request(LATENCY_INPUT, client, settings)
    assert result.report.mode == "SqlSynthesis"
    assert result.report.llm_calls == 2
    assert result.answer.startswith("Yes. One sample at x=150")
    evidence = client.requests[1][-1].content
    assert evidence.startswith(
        "SQL results:\n\n[1] SELECT DETECT_ANOMALY(data, y) AS report\nreport: Anomaly detected in data.y:\n  y: 293.0\n"
    )
    assert "  x: 150, y: 293.0, _row_id: 150" in evidence
    assert evidence.endswith(MODE3_INSTRUCTION)
    assert client.tools[1] is None


@pytest.mark.asyncio
async def test_mode3_repair(settings):
    """A failed query spends the repair budget and the corrected one is used"""
    client = _scenario("mode3_repair")
    result = await process_request(LATENCY_INPUT, client, settings.model_copy(update={"repair_budget": 1}))
    assert result.report.llm_calls == 3
    assert result.answer == "The average latency is about 4.65 ms."
    repair = client.requests[1][-1].content
    assert repair.startswith(f"{REPAIR_INSTRUCTION}\nQuery: SELECT AVG(latency) AS avg FROM samples\nError")
    assert "unknown table 'samples'" in repair
    assert "[1] SELECT AVG(y) AS avg_y FROM data\navg_y: " in client.requests[2][-1].content


@pytest.mark.asyncio
async def test_sql_error_without_repair_budget(settings):
    client = _scenario("mode3_repair")
    with pytest.raises(SqlExecutionError, match="unknown table 'samples'"):
        await process_request(LATENCY_INPUT, client, settings)
    assert len(client.requests) == 1


@pytest.mark.asyncio
async def test_budget_exhausted_returns_partial_answer(settings):
    client = _scenario("mode3_anomaly")
    result = await process_request(LATENCY_INPUT, client, settings.model_copy(update={"followup_budget": 0}))
    assert result.report.incomplete
    assert result.report.error == "invocation budget exhausted"
    assert result.report.llm_calls == 1
    assert result.answer == ""


@pytest.mark.asyncio
async def test_transport_failure_carries_partial_report(settings):
    client = ScriptedLlmClient([_query_call("SELECT COUNT(*) AS n FROM data")])
    with pytest.raises(LlmTransportError) as e:
        await process_request(LATENCY_INPUT, client, settings)
    report = e.value.partial.report
    assert report.llm_calls == 2
    assert report.mode == "SqlSynthesis"
    assert report.incomplete
    assert report.error == "scenario has no response for call 2"


@pytest.mark.asyncio
async def test_orchestrator_is_reusable(settings):
    """Usage is reset between requests"""
    orchestrator = Orchestrator(ScriptedLlmClient([
        {"content": "a", "usage": {"prompt_tokens": 5}},
        {"content": "b", "usage": {"prompt_tokens": 7}},
    ]), settings)
    await orchestrator.process_request(SMALL_INPUT)
    second = await orchestrator.process_request(SMALL_INPUT)
    assert second.answer == "b"
    assert second.report.provider_prompt_tokens == 7


def test_invocation_budget():
    budget = InvocationBudget(followup_remaining=1, repair_remaining=0)
    budget.take_primary()
    budget.take_followup()
    assert budget.calls == 2
    for take in (budget.take_primary, budget.take_followup, budget.take_repair):
        with pytest.raises(BudgetExhaustedError):
            take()


def test_format_result():
    result = SqlResult(columns=("a", "b"), rows=[(1, "x"), (2, None)])
    assert format_result(result, 10) == "a | b\n1 | x\n2 | null"
    assert format_result(result, 1) == "a | b\n1 | x\n... (1 more rows not shown)"
    assert format_result(SqlResult(columns=("a",), rows=[]), 10) == "a\n(no rows)"
    assert format_result(SqlResult(columns=("a", "b"), rows=[(1.5, "x")]), 10) == "a: 1.5\nb: x"
