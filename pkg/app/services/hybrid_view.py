"""
Request preprocessing: raw input to hybrid-view prompt plus the live datastore.
"""
from dataclasses import dataclass, field
from typing import Optional

from app.config import RenderFormat, Settings, TruncationConfig
from app.engines.duckdb.client import Datastore
from app.engines.duckdb.relationalize import build_datastore
from app.engines.logging import get_logger
from app.parsing.document import parse_document
from app.parsing.robust import RobustParser
from app.parsing.types import ParsedDocument
from app.ranking.reference import ReferenceQuery, build_reference_query, slim_representation
from app.rendering.formats import render_view
from app.rendering.layout import PromptBundle, PromptStage, assemble_prompt
from app.rendering.sql_prompt import generate_sql_prompt
from app.rendering.tokens import TokenCounter, count_tokens, reduction_ratio
from app.schemas.v1.reports import TransformStats
from app.structure.columns import ColumnView
from app.structure.rows import RowView, build_row_view, row_candidates
from app.structure.tree import TreeNode, marked_tree
from app.structure.truncation import truncated_column_view

logger = get_logger(__name__)

_FENCE_TAGS = {
    RenderFormat.BEAUTIFIED_JSON: "json",
    RenderFormat.RAW_JSON: "json",
    RenderFormat.TOON: "toon",
}


@dataclass
class HybridView:
    raw: str
    document: ParsedDocument
    store: Datastore
    trees: list[TreeNode]
    column_views: list[ColumnView]
    row_view: RowView
    query: ReferenceQuery
    bundle: PromptBundle
    stats: TransformStats
    rendered_objects: list[str] = field(default_factory=list)

    @property
    def prompt(self) -> str:
        return self.bundle.visible_prompt

    @property
    def truncated(self) -> bool:
        return self.bundle.truncation_triggered

    def close(self) -> None:
        self.store.close()

    def __enter__(self) -> "HybridView":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def _wrap_fenced(text: str, fenced: bool, fmt: RenderFormat) -> str:
    if not fenced:
        return text
    return f"```{_FENCE_TAGS[fmt]}\n{text}\n```"


def build_hybrid_view(
    raw: str,
    settings: Settings,
    fmt: Optional[RenderFormat] = None,
    cfg: Optional[TruncationConfig] = None,
    counter: Optional[TokenCounter] = None,
) -> HybridView:
    """
    Parse, materialize the datastore from the untruncated objects, then render
    truncated column views in place and the ranked row view after the text.
    The tool prompt is only added when some column view was truncated.
    The caller owns the returned datastore and must close it.
    """
    fmt = fmt or settings.render_format
    cfg = cfg or settings.truncation()
    document = parse_document(raw, RobustParser(settings.coverage_threshold))
    values = document.values
    store = build_datastore(values, cfg)
    try:
        trees = [marked_tree(value, cfg) for value in values]
        query = build_reference_query(document.texts, slim_representation(values, trees))
        column_views = [
            truncated_column_view(tree, cfg, query, provenance=i) for i, tree in enumerate(trees)
        ]
        rendered = [
            _wrap_fenced(render_view(view, fmt), obj.segment.fenced, fmt)
            for view, obj in zip(column_views, document.objects)
        ]
        truncated = any(view.truncated for view in column_views)
        row_view = build_row_view(row_candidates(store), query, cfg)
        tool_prompt = generate_sql_prompt(store, PromptStage.PRIMARY_CALL) if truncated else None
        bundle = assemble_prompt(document.texts, rendered, render_view(row_view), tool_prompt)

        raw_tokens = count_tokens(raw, counter)
        prompt_tokens = count_tokens(bundle.visible_prompt, counter)
        stats = TransformStats(
            raw_tokens=raw_tokens,
            prompt_tokens=prompt_tokens,
            reduction_ratio=round(reduction_ratio(raw_tokens, prompt_tokens), 4),
            truncation_triggered=truncated,
            tables={name: t.schema.row_count for name, t in store.tables.items()},
            objects=len(values),
        )
    except Exception:
        store.close()
        raise

    logger.info(
        "Hybrid view built",
        extra={"extra_data": {"scope": store.scope, **stats.model_dump()}},
    )
    return HybridView(
        raw=raw,
        document=document,
        store=store,
        trees=trees,
        column_views=column_views,
        row_view=row_view,
        query=query,
        bundle=bundle,
        stats=stats,
        rendered_objects=rendered,
    )
