"""
Path flattening, clustering and the column view.

Indices under Consistent lists are abstracted to `*`; everything else keeps
its literal index, so only schema-consistent repeated records share columns.
"""
from dataclasses import dataclass, field
from typing import Any, Optional

from app.structure.tree import Consistency, NodeKind, TreeNode

WILDCARD = "*"


@dataclass(frozen=True)
class ColumnId:
    context_path: str
    field_path: str

    def __str__(self) -> str:
        return f"{self.context_path}:{self.field_path}" if self.field_path else self.context_path


@dataclass
class Cluster:
    pattern: tuple[str, ...]
    captures: list[tuple[int, ...]] = field(default_factory=list)
    values: list[Any] = field(default_factory=list)
    literal_paths: list[tuple] = field(default_factory=list)

    @property
    def repeated(self) -> bool:
        return WILDCARD in self.pattern

    @property
    def dotted(self) -> str:
        return ".".join(self.pattern)

    def column_id(self) -> ColumnId:
        last = max(i for i, part in enumerate(self.pattern) if part == WILDCARD)
        return ColumnId(
            context_path=context_string(self.pattern[: last + 1]),
            field_path=".".join(self.pattern[last + 1:]),
        )


def context_string(parts: tuple[str, ...]) -> str:
    out: list[str] = []
    for part in parts:
        if part == WILDCARD:
            if out:
                out[-1] += "[]"
            else:
                out.append("[]")
        else:
            out.append(part)
    return ".".join(out)


def flatten_and_cluster(tree: TreeNode) -> list[Cluster]:
    """Leaf occurrences grouped by abstracted path, in document order."""
    clusters: dict[tuple[str, ...], Cluster] = {}

    def visit(node: TreeNode, literal: tuple, pattern: tuple[str, ...], captures: tuple[int, ...]) -> None:
        if node.kind is NodeKind.LEAF:
            cluster = clusters.get(pattern)
            if cluster is None:
                cluster = clusters[pattern] = Cluster(pattern=pattern)
            cluster.values.append(node.value)
            cluster.captures.append(captures)
            cluster.literal_paths.append(literal)
            return
        if node.kind is NodeKind.OBJECT:
            for child in node.children:
                visit(child, literal + (child.key,), pattern + (str(child.key),), captures)
            return
        abstract = node.schema_consistent is Consistency.CONSISTENT
        for i, child in enumerate(node.children):
            if abstract:
                visit(child, literal + (i,), pattern + (WILDCARD,), captures + (i,))
            else:
                visit(child, literal + (i,), pattern + (str(i),), captures)

    visit(tree, (), (), ())
    return list(clusters.values())


@dataclass
class ColumnView:
    columns: dict[ColumnId, list[Any]] = field(default_factory=dict)
    captures: dict[ColumnId, list[tuple[int, ...]]] = field(default_factory=dict)
    provenance: int = 0
    # columnar reconstruction of the object, truncated for the prompt
    document: Any = None
    omitted: dict[str, int] = field(default_factory=dict)

    @property
    def truncated(self) -> bool:
        return bool(self.omitted)

    @property
    def empty(self) -> bool:
        return not self.columns and self.document is None


def build_column_view(tree: TreeNode, provenance: int = 0, clusters: Optional[list[Cluster]] = None) -> ColumnView:
    view = ColumnView(provenance=provenance)
    for cluster in clusters if clusters is not None else flatten_and_cluster(tree):
        if not cluster.repeated:
            continue
        column = cluster.column_id()
        view.columns[column] = list(cluster.values)
        view.captures[column] = list(cluster.captures)
    return view
