"""
Order-preserving list truncation and the truncated columnar document.
"""
from dataclasses import dataclass
from typing import Any, Optional, Sequence

from app.config import TruncationConfig
from app.parsing.types import UNPARSED_KEY
from app.ranking.bm25 import ReferenceQuery, ScoredCandidate, ScoringScope, score_bm25, value_tokens
from app.structure.columns import ColumnView, build_column_view
from app.structure.tree import Consistency, NodeKind, TreeNode


def omission_marker(hidden: int, unit: str = "items") -> str:
    return f"... ({hidden} more {unit})"


@dataclass(frozen=True)
class TruncationResult:
    kept: tuple[int, ...]
    omitted: int

    @property
    def marker(self) -> Optional[str]:
        return omission_marker(self.omitted) if self.omitted else None

    def select(self, values: Sequence[Any]) -> list[Any]:
        return [values[i] for i in self.kept]


def truncate_column(values: Sequence[Any], scores: Sequence[float], cfg: TruncationConfig) -> TruncationResult:
    """
    Keep the first prefix_len, the last suffix_len and up to ranked_extra
    positively scored middle items, in original order.
    """
    n = len(values)
    if n <= cfg.window:
        return TruncationResult(kept=tuple(range(n)), omitted=0)
    head = list(range(cfg.prefix_len))
    tail = list(range(n - cfg.suffix_len, n))
    middle = [i for i in range(cfg.prefix_len, n - cfg.suffix_len) if scores[i] > 0]
    middle.sort(key=lambda i: (-scores[i], i))
    kept = sorted(set(head + tail + middle[: cfg.ranked_extra]))
    return TruncationResult(kept=tuple(kept), omitted=n - len(kept))


def _leaf_values(node: TreeNode) -> list[Any]:
    return [n.value for n in node.walk() if n.kind is NodeKind.LEAF]


def _insert_marker(column: Any, position: int, marker: str) -> None:
    if isinstance(column, list):
        column.insert(position, marker)
    elif isinstance(column, dict):
        for child in column.values():
            _insert_marker(child, position, marker)


class ColumnarRenderer:
    """
    Rebuilds an object for the prompt: consistent lists of records become
    `{field: [values]}` columns, long consistent lists are truncated, and
    inconsistent regions are reproduced element by element.
    """

    def __init__(self, cfg: TruncationConfig, query: Optional[ReferenceQuery] = None):
        self.cfg = cfg
        self.terms = query.terms if query is not None else set()
        self.omitted: dict[str, int] = {}

    def render(self, tree: TreeNode) -> Any:
        self.omitted = {}
        return self._render(tree, "$")

    def _render(self, node: TreeNode, path: str) -> Any:
        if node.kind is NodeKind.LEAF:
            return node.value
        if node.kind is NodeKind.OBJECT:
            out = {c.key: self._render(c, f"{path}.{c.key}") for c in node.children}
            if node.unparsed is not None:
                out[UNPARSED_KEY] = node.unparsed
            return out
        if node.schema_consistent is not Consistency.CONSISTENT:
            items = [self._render(c, f"{path}[{i}]") for i, c in enumerate(node.children)]
            if node.unparsed is not None:
                items.append({UNPARSED_KEY: node.unparsed})
            return items
        return self._render_consistent(node, path)

    def _render_consistent(self, node: TreeNode, path: str) -> Any:
        result = self._select(node.children)
        kept = result.select(node.children)
        if self._columnizable(node):
            out: Any = self._columnize(kept, f"{path}[]")
        else:
            out = [self._render(c, f"{path}[{c.key}]") for c in kept]
        if result.omitted:
            self.omitted[path] = result.omitted
            _insert_marker(out, min(self.cfg.prefix_len, len(kept)), result.marker)
        if node.unparsed is not None:
            if isinstance(out, dict):
                out[UNPARSED_KEY] = node.unparsed
            else:
                out.append({UNPARSED_KEY: node.unparsed})
        return out

    def _select(self, children: list[TreeNode]) -> TruncationResult:
        if len(children) <= self.cfg.window:
            return TruncationResult(kept=tuple(range(len(children))), omitted=0)
        candidates = [
            ScoredCandidate(id=i, value_tokens=value_tokens(_leaf_values(child)))
            for i, child in enumerate(children)
        ]
        scored = score_bm25(candidates, self.terms, ScoringScope.WITHIN_GROUP)
        return truncate_column(children, [c.score for c in scored], self.cfg)

    def _columnizable(self, node: TreeNode) -> bool:
        children = node.children
        return (
            len(children) >= max(self.cfg.min_table_rows, 1)
            and all(c.kind is NodeKind.OBJECT and c.unparsed is None for c in children)
            and bool(children[0].children)
        )

    def _columnize(self, records: list[TreeNode], path: str) -> dict[str, Any]:
        if not records:
            return {}
        columns: dict[str, Any] = {}
        for template in records[0].children:
            cells = [r.child(template.key) for r in records]
            if template.kind is NodeKind.LEAF:
                columns[template.key] = [c.value for c in cells]
            elif template.kind is NodeKind.OBJECT and template.children and all(c.unparsed is None for c in cells):
                columns[template.key] = self._columnize(cells, f"{path}.{template.key}")
            else:
                columns[template.key] = [
                    self._render(c, f"{path}.{template.key}") for c in cells
                ]
        return columns


def truncated_column_view(
    tree: TreeNode, cfg: TruncationConfig, query: Optional[ReferenceQuery] = None, provenance: int = 0
) -> ColumnView:
    """Column view with its rendered, truncated document attached."""
    view = build_column_view(tree, provenance=provenance)
    renderer = ColumnarRenderer(cfg, query)
    view.document = renderer.render(tree)
    view.omitted = dict(renderer.omitted)
    return view
