from typing import Any, Optional

from pydantic import ValidationError

from app.config import Settings, TruncationConfig
from app.engines.duckdb.relationalize import build_datastore
from app.engines.duckdb.sql import execute_sql
from app.engines.logging import LoggerMixin
from app.errors import ConfigError
from app.parsing.document import parse_document
from app.parsing.robust import RobustParser
from app.schemas.v1.api import (
    BackfillRequest,
    BackfillResponse,
    QueryRequest,
    QueryResponse,
    TransformRequest,
    TransformResponse,
    TruncationOverrides,
)
from app.services.backfill import execute_backfill
from app.services.hybrid_view import build_hybrid_view
from app.services.tool_calls import parse_tool_call


def truncation_with(settings: Settings, overrides: Optional[TruncationOverrides]) -> TruncationConfig:
    base = settings.truncation()
    if overrides is None:
        return base
    try:
        return TruncationConfig(**{**base.model_dump(), **overrides.model_dump(exclude_none=True)})
    except ValidationError as e:
        raise ConfigError(f"invalid truncation settings: {e.errors()[0]['msg']}") from e


class ViewService(LoggerMixin):
    """Stateless operations behind the HTTP API; each call owns one datastore."""

    def __init__(self, settings: Settings):
        self.settings = settings

    def _objects(self, raw: str) -> list[Any]:
        return parse_document(raw, RobustParser(self.settings.coverage_threshold)).values

    def transform(self, request: TransformRequest) -> TransformResponse:
        cfg = truncation_with(self.settings, request.truncation)
        with build_hybrid_view(request.input, self.settings, request.format, cfg=cfg) as view:
            return TransformResponse(prompt=view.prompt, tool_prompt=view.bundle.tool_prompt, stats=view.stats)

    def query(self, request: QueryRequest) -> QueryResponse:
        with build_datastore(self._objects(request.input), self.settings.truncation()) as store:
            result = execute_sql(store, request.sql)
            self.logger.info(f"Query returned {len(result)} rows")
            return QueryResponse(
                columns=list(result.columns),
                rows=[list(row) for row in result.rows],
                tables={name: t.schema.row_count for name, t in store.tables.items()},
            )

    def backfill(self, request: BackfillRequest) -> BackfillResponse:
        call = dict(request.tool_call)
        call.setdefault("tool_name", "BackfillData")
        payload = parse_tool_call({"tool_calls": [{"name": call["tool_name"], "arguments": call}]})
        template = payload.template if payload.template is not None else request.template
        with build_datastore(self._objects(request.input), self.settings.truncation()) as store:
            return BackfillResponse(result=execute_backfill(template, payload, store))
