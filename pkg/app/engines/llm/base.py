from abc import ABC, abstractmethod
from typing import Any, Optional

from app.engines.logging import LoggerMixin
from app.schemas.v1.llm import ChatMessage, ChatResponse


class LlmClient(LoggerMixin, ABC):
    """
    Provider-agnostic chat interface. Implementations must be safe to share
    across concurrent requests; `call_count` is informational only.
    """

    def __init__(self) -> None:
        self.call_count = 0

    async def send(self, messages: list[ChatMessage], tools: Optional[list[dict[str, Any]]] = None) -> ChatResponse:
        self.call_count += 1
        response = await self._send(messages, tools)
        self.logger.debug(
            "LLM call completed",
            extra={"extra_data": {
                "call": self.call_count,
                "tool_calls": [c.name for c in response.tool_calls],
                "usage": response.usage.model_dump(),
            }},
        )
        return response

    @abstractmethod
    async def _send(self, messages: list[ChatMessage], tools: Optional[list[dict[str, Any]]]) -> ChatResponse:
        ...

    async def close(self) -> None:
        return None
