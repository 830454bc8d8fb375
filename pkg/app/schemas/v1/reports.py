from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

ModeName = Literal["Direct", "TemplateBackfill", "SqlSynthesis"]


class TransformStats(BaseModel):
    """Size of a transformed prompt against its raw input"""
    raw_tokens: int = Field(..., ge=0, description="Token estimate of the raw input")
    prompt_tokens: int = Field(..., ge=0, description="Token estimate of the transformed prompt")
    reduction_ratio: float = Field(..., description="1 - prompt_tokens / raw_tokens")
    truncation_triggered: bool = Field(..., description="Whether any view was truncated")
    tables: Dict[str, int] = Field(default_factory=dict, description="Datastore tables and their row counts")
    objects: int = Field(0, ge=0, description="Structured objects found in the input")


class RunReport(TransformStats):
    """Usage report of one end-to-end request"""
    mode: ModeName = Field(..., description="Operating mode taken")
    llm_calls: int = Field(..., ge=0, description="LLM invocations made")
    provider_prompt_tokens: int = Field(0, ge=0, description="Prompt tokens reported by the provider")
    provider_completion_tokens: int = Field(0, ge=0, description="Completion tokens reported by the provider")
    incomplete: bool = Field(False, description="Budget ran out before a final answer")
    error: Optional[str] = Field(None, description="Error that ended the request early")

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "mode": "TemplateBackfill",
                "llm_calls": 2,
                "raw_tokens": 21840,
                "prompt_tokens": 3102,
                "reduction_ratio": 0.858,
                "truncation_triggered": True,
                "tables": {"data": 2334},
                "objects": 1,
                "provider_prompt_tokens": 0,
                "provider_completion_tokens": 0,
                "incomplete": False,
                "error": None,
            }
        }
    )


class RequestResult(BaseModel):
    answer: Any = Field(None, description="Final answer: text, or JSON for backfilled templates")
    report: RunReport
