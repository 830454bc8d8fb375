"""
JSON tree, deep schema signatures and schema-consistency marking.
"""
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Hashable, Iterator, Optional, Union

from app.config import TruncationConfig
from app.parsing.types import UNPARSED_KEY

Signature = Hashable


class EdgeOrigin(str, Enum):
    ROOT = "Root"
    DICT_EDGE = "DictEdge"
    LIST_EDGE = "ListEdge"


class NodeKind(str, Enum):
    OBJECT = "object"
    ARRAY = "array"
    LEAF = "leaf"


class Consistency(str, Enum):
    CONSISTENT = "Consistent"
    INCONSISTENT = "Inconsistent"
    NOT_APPLICABLE = "NotApplicable"


@dataclass(eq=False)
class TreeNode:
    key: Union[str, int, None]
    origin: EdgeOrigin
    kind: NodeKind
    value: Any = None
    children: list["TreeNode"] = field(default_factory=list)
    schema_consistent: Consistency = Consistency.NOT_APPLICABLE
    unparsed: Optional[str] = None
    enumerated: bool = False
    signature: Signature = None

    @property
    def is_leaf(self) -> bool:
        return self.kind is NodeKind.LEAF

    def child(self, key: Union[str, int]) -> Optional["TreeNode"]:
        for node in self.children:
            if node.key == key:
                return node
        return None

    def to_value(self) -> Any:
        """Rebuild the JSON value, re-attaching folded residue."""
        if self.kind is NodeKind.LEAF:
            return self.value
        if self.kind is NodeKind.OBJECT:
            out = {c.key: c.to_value() for c in self.children}
            if self.unparsed is not None:
                out[UNPARSED_KEY] = self.unparsed
            return out
        items = [c.to_value() for c in self.children]
        if self.unparsed is not None:
            items.append({UNPARSED_KEY: self.unparsed})
        return items

    def walk(self) -> Iterator["TreeNode"]:
        yield self
        for node in self.children:
            yield from node.walk()


def _is_residue_item(item: Any) -> bool:
    return isinstance(item, dict) and len(item) == 1 and isinstance(item.get(UNPARSED_KEY), str)


def build_json_tree(
    value: Any, key: Union[str, int, None] = None, origin: EdgeOrigin = EdgeOrigin.ROOT
) -> TreeNode:
    """Mirror `value` as a tree; `unparsed_string` residue becomes a node annotation."""
    if isinstance(value, dict):
        node = TreeNode(key=key, origin=origin, kind=NodeKind.OBJECT)
        for k, v in value.items():
            if k == UNPARSED_KEY and isinstance(v, str):
                node.unparsed = v
                continue
            node.children.append(build_json_tree(v, k, EdgeOrigin.DICT_EDGE))
        return node
    if isinstance(value, list):
        node = TreeNode(key=key, origin=origin, kind=NodeKind.ARRAY)
        items = value
        if items and _is_residue_item(items[-1]):
            node.unparsed = items[-1][UNPARSED_KEY]
            items = items[:-1]
        node.children = [build_json_tree(v, i, EdgeOrigin.LIST_EDGE) for i, v in enumerate(items)]
        return node
    return TreeNode(key=key, origin=origin, kind=NodeKind.LEAF, value=value)


def leaf_type(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, (int, float)):
        return "number"
    return "string"


def schema_signature(value: Any) -> Signature:
    """Key-order-insensitive structural fingerprint; int and float are both `number`."""
    if isinstance(value, dict):
        return ("object", tuple(sorted(
            (k, schema_signature(v)) for k, v in value.items() if k != UNPARSED_KEY
        )))
    if isinstance(value, list):
        items = value[:-1] if value and _is_residue_item(value[-1]) else value
        return ("array", frozenset(schema_signature(v) for v in items))
    return leaf_type(value)


def is_enumerated(node: TreeNode) -> bool:
    """Dicts used as lists: digit keys, or several objects sharing one key set."""
    if node.kind is not NodeKind.OBJECT or len(node.children) < 2:
        return False
    if all(isinstance(c.key, str) and c.key.isdigit() for c in node.children):
        return True
    if all(c.kind is NodeKind.OBJECT for c in node.children):
        key_sets = {frozenset(g.key for g in c.children) for c in node.children}
        return len(key_sets) == 1
    return False


def _serialized_length(node: TreeNode) -> int:
    return len(json.dumps(node.to_value(), ensure_ascii=False, default=str))


def _mark(node: TreeNode, cfg: TruncationConfig) -> tuple[bool, bool]:
    """Returns (has_long_leaf, subtree_consistent) and fills signature/marks."""
    if node.kind is NodeKind.LEAF:
        node.signature = leaf_type(node.value)
        long_leaf = isinstance(node.value, str) and len(node.value) > cfg.max_leaf_len
        return long_leaf, True

    results = [_mark(child, cfg) for child in node.children]
    long_leaf = any(r[0] for r in results)
    below = all(r[1] for r in results)
    child_signatures = {c.signature for c in node.children}

    if node.kind is NodeKind.OBJECT:
        node.signature = ("object", tuple(sorted((c.key, c.signature) for c in node.children)))
        node.enumerated = is_enumerated(node)
        if not node.enumerated:
            return long_leaf, below
        consistent = (
            len(child_signatures) <= 1
            and below
            and all(_serialized_length(c) <= cfg.max_leaf_len for c in node.children)
        )
        node.schema_consistent = Consistency.CONSISTENT if consistent else Consistency.INCONSISTENT
        return long_leaf, consistent

    node.signature = ("array", frozenset(child_signatures))
    consistent = len(child_signatures) <= 1 and not long_leaf and below
    node.schema_consistent = Consistency.CONSISTENT if consistent else Consistency.INCONSISTENT
    return long_leaf, consistent


def mark_schema_consistency(tree: TreeNode, cfg: Optional[TruncationConfig] = None) -> TreeNode:
    """Bottom-up consistency marks on every list and enumerated dict (in place)."""
    _mark(tree, cfg or TruncationConfig())
    return tree


def marked_tree(value: Any, cfg: Optional[TruncationConfig] = None) -> TreeNode:
    return mark_schema_consistency(build_json_tree(value), cfg)
