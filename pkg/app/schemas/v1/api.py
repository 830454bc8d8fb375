from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.config import RenderFormat
from app.schemas.v1.reports import TransformStats


class TruncationOverrides(BaseModel):
    """Per-request truncation knobs; unset fields keep the server settings"""
    prefix_len: Optional[int] = Field(None, ge=0, description="Items kept from the head of a list")
    suffix_len: Optional[int] = Field(None, ge=0, description="Items kept from the tail of a list")
    ranked_extra: Optional[int] = Field(None, ge=0, description="Relevance-picked middle items")
    row_top_k: Optional[int] = Field(None, ge=0, description="Rows in the row view")
    max_leaf_len: Optional[int] = Field(None, ge=0, description="Longest leaf inside a columnized list")
    min_table_rows: Optional[int] = Field(None, ge=0, description="Minimum list length promoted to a table")


class TransformRequest(BaseModel):
    """Raw mixed text/JSON input to turn into a hybrid-view prompt"""
    input: str = Field(..., description="Raw input text")
    format: Optional[RenderFormat] = Field(None, description="Column view rendering format")
    truncation: Optional[TruncationOverrides] = Field(None, description="Truncation overrides")

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "input": 'Latency report: {"samples": [{"t": 1, "ms": 3.1}, {"t": 2, "ms": 2.9}]}',
                "format": "beautified",
            }
        }
    )


class TransformResponse(BaseModel):
    prompt: str = Field(..., description="Transformed prompt")
    tool_prompt: Optional[str] = Field(None, description="Tool selection block, present when truncated")
    stats: TransformStats


class QueryRequest(BaseModel):
    """SQL over the datastore built from one input"""
    input: str = Field(..., description="Raw input text")
    sql: str = Field(..., min_length=1, description="Read-only SQL; DETECT_ANOMALY and DESCRIBE_TREND allowed")


class QueryResponse(BaseModel):
    columns: List[str] = Field(..., description="Result column names")
    rows: List[List[Any]] = Field(..., description="Result rows in query order")
    tables: Dict[str, int] = Field(default_factory=dict, description="Datastore tables and their row counts")


class BackfillRequest(BaseModel):
    """Fill a template from the datastore built from one input"""
    input: str = Field(..., description="Raw input text")
    tool_call: Dict[str, Any] = Field(..., description="BackfillData payload: queries, mappings, template")
    template: Optional[Any] = Field(None, description="Template, when not inside tool_call")


class BackfillResponse(BaseModel):
    result: Any = Field(..., description="Template with every mapped list rebuilt")
