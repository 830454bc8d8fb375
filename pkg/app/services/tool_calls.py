import json
from enum import Enum
from typing import Any, Optional, Union

from pydantic import ValidationError

from app.engines.logging import get_logger
from app.errors import ToolCallValidationError
from app.parsing.document import parse_document
from app.parsing.normalize import strip_json_comments
from app.schemas.v1.llm import ChatResponse, RawToolCall
from app.schemas.v1.tools import ToolCallPayload

logger = get_logger(__name__)


class ModeDecision(str, Enum):
    DIRECT = "Direct"
    TEMPLATE_BACKFILL = "TemplateBackfill"
    SQL_SYNTHESIS = "SqlSynthesis"


def _validate(data: dict[str, Any]) -> ToolCallPayload:
    try:
        return ToolCallPayload.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(p) for p in first["loc"]) or "payload"
        raise ToolCallValidationError(
            f"invalid {data.get('tool_name', 'tool')} call: {location}: {first['msg']}"
        ) from e


def _arguments(call: RawToolCall) -> dict[str, Any]:
    arguments = call.arguments
    if arguments in (None, ""):
        return {}
    if isinstance(arguments, str):
        try:
            arguments = json.loads(strip_json_comments(arguments))
        except json.JSONDecodeError as e:
            raise ToolCallValidationError(f"arguments of {call.name} are not valid JSON: {e.msg}") from e
    if not isinstance(arguments, dict):
        raise ToolCallValidationError(f"arguments of {call.name} must be a JSON object")
    return arguments


def _as_response(response: Union[ChatResponse, dict[str, Any], str, None]) -> ChatResponse:
    if response is None:
        return ChatResponse()
    if isinstance(response, ChatResponse):
        return response
    if isinstance(response, str):
        return ChatResponse(content=response)
    calls = []
    for call in response.get("tool_calls") or []:
        function = call.get("function", call)
        calls.append(RawToolCall(id=call.get("id"), name=function.get("name", ""), arguments=function.get("arguments")))
    return ChatResponse(content=response.get("content"), tool_calls=calls)


def inline_objects(content: str) -> list[Any]:
    """JSON objects recovered from free text, comments removed first."""
    if not content:
        return []
    return parse_document(strip_json_comments(content)).values


def parse_tool_call(response: Union[ChatResponse, dict[str, Any], str, None]) -> Optional[ToolCallPayload]:
    """
    Structured function calls take precedence; otherwise the first inline JSON
    object carrying `tool_name` is used. Plain prose yields None.
    """
    message = _as_response(response)
    if message.tool_calls:
        call = message.tool_calls[0]
        arguments = _arguments(call)
        data = {**arguments, "tool_name": call.name or arguments.get("tool_name")}
        return _validate(data)
    for value in inline_objects(message.text):
        if isinstance(value, dict) and "tool_name" in value:
            return _validate(value)
    return None


def route_mode(
    output: Union[ChatResponse, ToolCallPayload, dict[str, Any], str, None], truncated: bool
) -> ModeDecision:
    payload = output if isinstance(output, ToolCallPayload) else parse_tool_call(output)
    if payload is None or not truncated:
        return ModeDecision.DIRECT
    if payload.tool_name == "QueryDatastore":
        return ModeDecision.SQL_SYNTHESIS
    return ModeDecision.TEMPLATE_BACKFILL
