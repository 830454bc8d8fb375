from app.schemas.v1.api import (
    BackfillRequest,
    BackfillResponse,
    QueryRequest,
    QueryResponse,
    TransformRequest,
    TransformResponse,
    TruncationOverrides,
)
from app.schemas.v1.llm import ChatMessage, ChatResponse, RawToolCall, Usage
from app.schemas.v1.reports import RequestResult, RunReport, TransformStats
from app.schemas.v1.tools import BackfillMapping, ToolCallPayload

__all__ = [
    "BackfillMapping",
    "BackfillRequest",
    "BackfillResponse",
    "ChatMessage",
    "ChatResponse",
    "QueryRequest",
    "QueryResponse",
    "RawToolCall",
    "RequestResult",
    "RunReport",
    "ToolCallPayload",
    "TransformRequest",
    "TransformResponse",
    "TransformStats",
    "TruncationOverrides",
    "Usage",
]
