"""Wire models: HTTP bodies, LLM messages and tool calls, run reports."""
from app.schemas import v1

__all__ = ["v1"]
