"""
Deterministic stand-in for an LLM endpoint: replays scripted responses in call order.

Scenario files look like:

    {"responses": [
        {"tool_calls": [{"name": "QueryDatastore", "arguments": {"queries": ["SELECT COUNT(*) AS count FROM data"]}}]},
        {"content": "2304"}
    ]}

A bare string entry is shorthand for {"content": "..."}.
"""
import json
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from app.engines.llm.base import LlmClient
from app.errors import ConfigError, LlmTransportError
from app.schemas.v1.llm import ChatMessage, ChatResponse, RawToolCall, Usage


def _response(entry: Union[str, dict[str, Any]]) -> ChatResponse:
    if isinstance(entry, str):
        return ChatResponse(content=entry)
    calls = [
        RawToolCall(id=c.get("id"), name=c.get("name", ""), arguments=c.get("arguments"))
        for c in entry.get("tool_calls", [])
    ]
    return ChatResponse(content=entry.get("content"), tool_calls=calls, usage=Usage(**entry.get("usage", {})))


class ScriptedLlmClient(LlmClient):
    def __init__(self, responses: Sequence[Union[str, dict[str, Any]]]):
        super().__init__()
        self._responses = [_response(r) for r in responses]
        self.requests: list[list[ChatMessage]] = []
        self.tools: list[Optional[list[dict[str, Any]]]] = []

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ScriptedLlmClient":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot load scenario {path}: {e}") from e
        responses = data.get("responses") if isinstance(data, dict) else data
        if not isinstance(responses, list):
            raise ConfigError(f"scenario {path} must hold a 'responses' list")
        return cls(responses)

    async def _send(self, messages: list[ChatMessage], tools: Optional[list[dict[str, Any]]]) -> ChatResponse:
        index = len(self.requests)
        self.requests.append(list(messages))
        self.tools.append(tools)
        if index >= len(self._responses):
            raise LlmTransportError(f"scenario has no response for call {index + 1}")
        return self._responses[index]
