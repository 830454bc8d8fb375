from typing import Any, List, Literal, Optional

from pydantic import BaseModel, Field


class ChatMessage(BaseModel):
    role: Literal["system", "user", "assistant", "tool"] = Field(..., description="Message author")
    content: Optional[str] = Field(None, description="Text content")
    tool_calls: Optional[List[dict[str, Any]]] = Field(None, description="Provider tool calls, assistant only")
    tool_call_id: Optional[str] = Field(None, description="Answered tool call, tool role only")


class RawToolCall(BaseModel):
    """Tool call as received, before validation."""

    id: Optional[str] = None
    name: str
    arguments: Any = Field(None, description="JSON string or already decoded object")


class Usage(BaseModel):
    prompt_tokens: int = 0
    completion_tokens: int = 0
    total_tokens: int = 0

    def __add__(self, other: "Usage") -> "Usage":
        return Usage(
            prompt_tokens=self.prompt_tokens + other.prompt_tokens,
            completion_tokens=self.completion_tokens + other.completion_tokens,
            total_tokens=self.total_tokens + other.total_tokens,
        )


class ChatResponse(BaseModel):
    content: Optional[str] = None
    tool_calls: List[RawToolCall] = Field(default_factory=list)
    usage: Usage = Field(default_factory=Usage)

    @property
    def text(self) -> str:
        return self.content or ""
