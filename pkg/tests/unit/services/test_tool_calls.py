import pytest

from app.errors import ToolCallValidationError
from app.schemas.v1.llm import ChatResponse, RawToolCall
from app.schemas.v1.tools import ToolCallPayload
from app.services.tool_calls import ModeDecision, parse_tool_call, route_mode


def _structured(name, arguments):
    return {"tool_calls": [{"id": "call_1", "function": {"name": name, "arguments": arguments}}]}


def test_structured_call_with_string_arguments():
    payload = parse_tool_call(_structured("QueryDatastore", '{"queries": ["SELECT 1"]}'))
    assert payload.tool_name == "QueryDatastore"
    assert payload.queries == ["SELECT 1"]


def test_arguments_may_carry_comments():
    payload = parse_tool_call(_structured("QueryDatastore", '{"queries": ["SELECT 1"] // first try\n}'))
    assert payload.queries == ["SELECT 1"]


def test_structured_call_takes_precedence_over_text():
    response = ChatResponse(
        content='{"tool_name": "QueryDatastore", "queries": ["SELECT 2"]}',
        tool_calls=[RawToolCall(name="GenTemplateAndBackfill", arguments={})],
    )
    assert parse_tool_call(response).tool_name == "GenTemplateAndBackfill"


def test_inline_call_in_prose():
    """A JSON object with tool_name inside free text is a call; `query` is accepted"""
    payload = parse_tool_call('I need the full data.\n{"tool_name": "QueryDatastore", "query": "SELECT COUNT(*) FROM data"}')
    assert payload.queries == ["SELECT COUNT(*) FROM data"]


def test_prose_is_not_a_call():
    assert parse_tool_call("The spike happened in Newark, NJ [1].") is None
    assert parse_tool_call(None) is None
    assert parse_tool_call('Here is JSON: {"answer": 42}') is None


def test_backfill_template_given_as_string():
    payload = parse_tool_call(_structured("BackfillData", {
        "queries": ["SELECT x FROM data"],
        "template": '{"rows": [{"x": 0}]}',
        "mappings": [{"sql_column": "x", "template_path": "rows.(N).x"}],
    }))
    assert payload.template == {"rows": [{"x": 0}]}
    assert payload.mappings[0].placeholders == ["N"]


@pytest.mark.parametrize(
    "response, message",
    [
        (_structured("QueryDatastore", "{}"), "requires at least one query"),
        (_structured("QueryDatastore", "{not json"), "not valid JSON"),
        (_structured("QueryDatastore", "[1, 2]"), "must be a JSON object"),
        (_structured("DropTables", "{}"), "tool_name"),
        (_structured("BackfillData", {"queries": ["SELECT 1"]}), "requires at least one mapping"),
        (
            _structured("BackfillData", {
                "queries": ["SELECT 1"],
                "mappings": [{"sql_column": "x", "template_path": "a.(g).b.(h).c.(N).x"}],
            }),
            "one group placeholder",
        ),
    ],
)
def test_invalid_calls(response, message):
    with pytest.raises(ToolCallValidationError, match=message):
        parse_tool_call(response)


@pytest.mark.parametrize(
    "output, truncated, mode",
    [
        ("plain answer", True, ModeDecision.DIRECT),
        (_structured("QueryDatastore", {"queries": ["SELECT 1"]}), True, ModeDecision.SQL_SYNTHESIS),
        (_structured("GenTemplateAndBackfill", {}), True, ModeDecision.TEMPLATE_BACKFILL),
        (ToolCallPayload(tool_name="QueryDatastore", queries=["SELECT 1"]), False, ModeDecision.DIRECT),
    ],
)
def test_route_mode(output, truncated, mode):
    assert route_mode(output, truncated) is mode
