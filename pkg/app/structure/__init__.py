from app.structure.tree import Consistency, EdgeOrigin, NodeKind, TreeNode, build_json_tree, mark_schema_consistency
from app.structure.columns import ColumnId, ColumnView, build_column_view, flatten_and_cluster
from app.structure.truncation import omission_marker, truncate_column, truncated_column_view
from app.structure.rows import RowCandidate, RowView, build_row_view, row_candidates

__all__ = [
    "ColumnId",
    "ColumnView",
    "Consistency",
    "EdgeOrigin",
    "NodeKind",
    "RowCandidate",
    "RowView",
    "TreeNode",
    "build_column_view",
    "build_json_tree",
    "build_row_view",
    "flatten_and_cluster",
    "mark_schema_consistency",
    "omission_marker",
    "row_candidates",
    "truncate_column",
    "truncated_column_view",
]
