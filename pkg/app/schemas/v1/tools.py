import json
import re
from typing import Any, List, Literal, Optional

from pydantic import AliasChoices, BaseModel, ConfigDict, Field, field_validator, model_validator

from app.parsing.normalize import strip_json_comments

PLACEHOLDER = re.compile(r"\(([^()]+)\)")

ToolNameLiteral = Literal["GenTemplateAndBackfill", "QueryDatastore", "BackfillData"]


class BackfillMapping(BaseModel):
    """One SQL result column written into the template at a dotted path."""

    sql_column: str = Field(..., min_length=1, description="Column of the query result")
    template_path: str = Field(
        ...,
        min_length=1,
        description="Dotted template path; (name) placeholders mark list dimensions",
    )

    @field_validator("template_path")
    @classmethod
    def _at_most_two_placeholders(cls, value: str) -> str:
        if len(PLACEHOLDER.findall(value)) > 2:
            raise ValueError("template_path allows one group placeholder and one positional placeholder")
        return value

    @property
    def placeholders(self) -> list[str]:
        return PLACEHOLDER.findall(self.template_path)


class ToolCallPayload(BaseModel):
    """Validated tool call emitted by the model."""

    model_config = ConfigDict(
        populate_by_name=True,
        extra="ignore",
        json_schema_extra={
            "example": {
                "tool_name": "BackfillData",
                "queries": ["SELECT x, y, series_idx FROM data ORDER BY series_idx, _row_id"],
                "template": {"series": [{"name": "a", "data": [{"x": 0, "y": 0}]}]},
                "mappings": [{"sql_column": "x", "template_path": "series.(series_idx).data.(N).x"}],
            }
        },
    )

    tool_name: ToolNameLiteral = Field(..., description="Selected tool")
    queries: List[str] = Field(
        default_factory=list,
        validation_alias=AliasChoices("queries", "query", "sql"),
        description="SQL statements, executed in order",
    )
    mappings: List[BackfillMapping] = Field(default_factory=list, description="BackfillData only")
    template: Optional[Any] = Field(None, description="JSON template to fill (BackfillData only)")

    @field_validator("queries", mode="before")
    @classmethod
    def _listify(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [value]
        return value

    @field_validator("template", mode="before")
    @classmethod
    def _decode_template(cls, value: Any) -> Any:
        if isinstance(value, str):
            try:
                return json.loads(strip_json_comments(value))
            except json.JSONDecodeError as e:
                raise ValueError(f"template is not valid JSON: {e.msg}") from e
        return value

    @model_validator(mode="after")
    def _required_fields(self) -> "ToolCallPayload":
        if self.tool_name in ("QueryDatastore", "BackfillData") and not self.queries:
            raise ValueError(f"{self.tool_name} requires at least one query")
        if self.tool_name == "BackfillData" and not self.mappings:
            raise ValueError("BackfillData requires at least one mapping")
        return self
