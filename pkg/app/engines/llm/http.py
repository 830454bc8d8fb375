"""
Chat-completions client over aiohttp.
"""
import asyncio
import json
from typing import Any, Optional

import aiohttp

from app.config import Settings
from app.engines.llm.base import LlmClient
from app.errors import ConfigError, LlmTransportError
from app.schemas.v1.llm import ChatMessage, ChatResponse, RawToolCall, Usage


class HttpLlmClient(LlmClient):
    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str,
        timeout: float = 60.0,
        native_tools: bool = True,
    ):
        super().__init__()
        if not api_key:
            raise ConfigError("an API key is required for the HTTP LLM client (set HYVIEW_LLM_API_KEY)")
        self.url = base_url.rstrip("/") + "/chat/completions"
        self.model = model
        self.native_tools = native_tools
        self._headers = {"Authorization": f"Bearer {api_key}", "Content-Type": "application/json"}
        self._timeout = aiohttp.ClientTimeout(total=timeout)
        self._session: Optional[aiohttp.ClientSession] = None

    @classmethod
    def from_settings(cls, settings: Settings) -> "HttpLlmClient":
        key = settings.llm_api_key.get_secret_value() if settings.llm_api_key else ""
        return cls(
            base_url=settings.llm_base_url,
            model=settings.llm_model,
            api_key=key,
            timeout=settings.llm_timeout,
            native_tools=settings.native_tools,
        )

    def _session_or_new(self) -> aiohttp.ClientSession:
        if self._session is None or self._session.closed:
            self._session = aiohttp.ClientSession(headers=self._headers, timeout=self._timeout)
        return self._session

    async def close(self) -> None:
        if self._session is not None and not self._session.closed:
            await self._session.close()

    def _payload(self, messages: list[ChatMessage], tools: Optional[list[dict[str, Any]]]) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "model": self.model,
            "messages": [m.model_dump(exclude_none=True) for m in messages],
        }
        if tools and self.native_tools:
            payload["tools"] = tools
        return payload

    async def _send(self, messages: list[ChatMessage], tools: Optional[list[dict[str, Any]]]) -> ChatResponse:
        session = self._session_or_new()
        try:
            async with session.post(self.url, json=self._payload(messages, tools)) as response:
                if response.status >= 400:
                    body = await response.text()
                    raise LlmTransportError(
                        f"LLM endpoint returned {response.status}: {body[:300]}", status=response.status
                    )
                data = await response.json(content_type=None)
        except aiohttp.ClientError as e:
            self.logger.error("LLM request failed", exc_info=True)
            raise LlmTransportError(f"LLM request failed: {e}") from e
        except asyncio.TimeoutError as e:
            raise LlmTransportError("LLM request timed out") from e
        return parse_completion(data)


def parse_completion(data: dict[str, Any]) -> ChatResponse:
    try:
        message = data["choices"][0]["message"]
    except (KeyError, IndexError, TypeError) as e:
        raise LlmTransportError(f"unexpected completion payload: {json.dumps(data)[:300]}") from e
    calls = []
    for call in message.get("tool_calls") or []:
        function = call.get("function", call)
        calls.append(RawToolCall(id=call.get("id"), name=function.get("name", ""), arguments=function.get("arguments")))
    usage = Usage(**{k: v for k, v in (data.get("usage") or {}).items() if k in Usage.model_fields})
    return ChatResponse(content=message.get("content"), tool_calls=calls, usage=usage)
