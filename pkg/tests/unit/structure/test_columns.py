import json
import random
from collections import Counter
from typing import Any

import pytest

from app.config import TruncationConfig
from app.structure.columns import ColumnId, build_column_view, flatten_and_cluster
from app.structure.tree import Consistency, NodeKind, TreeNode, is_enumerated, marked_tree, schema_signature


def test_column_ids_for_records():
    """Repeated records share one column per field"""
    view = build_column_view(marked_tree({"rows": [{"a": 1, "b": "x"}, {"a": 2, "b": "y"}]}))
    assert view.columns == {ColumnId("rows[]", "a"): [1, 2], ColumnId("rows[]", "b"): ["x", "y"]}
    assert str(ColumnId("rows[]", "a")) == "rows[]:a"


def test_nested_lists_capture_indices():
    """Nested consistent lists keep every index in the captures"""
    value = {"groups": [{"items": [{"v": 1}, {"v": 2}]}, {"items": [{"v": 3}, {"v": 4}]}]}
    view = build_column_view(marked_tree(value))
    column = ColumnId("groups[].items[]", "v")
    assert view.columns[column] == [1, 2, 3, 4]
    assert view.captures[column] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_inconsistent_lists_keep_literal_indices():
    clusters = flatten_and_cluster(marked_tree({"mixed": [{"a": 1}, {"b": 2}]}))
    assert [c.dotted for c in clusters] == ["mixed.0.a", "mixed.1.b"]
    assert not any(c.repeated for c in clusters)
    assert build_column_view(marked_tree({"mixed": [{"a": 1}, {"b": 2}]})).columns == {}


# -- randomized checks against a direct tree walk ----------------------------

_KEYS = ["a", "b", "c", "id", "name"]
_CFG = TruncationConfig()


def _random_value(rng: random.Random, depth: int, budget: list[int]) -> Any:
    if depth == 0 or budget[0] <= 0 or rng.random() < 0.3:
        budget[0] -= 1
        return rng.choice([rng.randint(0, 9), round(rng.random(), 2), rng.choice(["x", "yy", "zz"]), None, True])
    if rng.random() < 0.5:
        if rng.random() < 0.6:
            template = {k: rng.randint(0, 1) for k in rng.sample(_KEYS, rng.randint(1, 3))}
            return [
                {k: (_random_value(rng, depth - 1, budget) if flag else rng.randint(0, 9)) for k, flag in template.items()}
                for _ in range(rng.randint(0, 5))
            ]
        return [_random_value(rng, depth - 1, budget) for _ in range(rng.randint(0, 5))]
    return {k: _random_value(rng, depth - 1, budget) for k in rng.sample(_KEYS, rng.randint(1, 4))}


def _oracle_consistent(value: Any) -> bool:
    """Consistency straight from the definition, on the raw value."""
    if isinstance(value, list):
        return len({schema_signature(v) for v in value}) <= 1 and all(_below_consistent(v) for v in value)
    return True


def _below_consistent(value: Any) -> bool:
    if isinstance(value, list):
        return _oracle_consistent(value)
    if isinstance(value, dict):
        if _enumerated(value) and not _oracle_enumerated(value):
            return False
        return all(_below_consistent(v) for v in value.values())
    return True


def _enumerated(value: dict) -> bool:
    return is_enumerated(marked_tree(value, _CFG))


def _oracle_enumerated(value: dict) -> bool:
    return (
        len({schema_signature(v) for v in value.values()}) <= 1
        and all(_below_consistent(v) for v in value.values())
        and all(len(json.dumps(v)) <= _CFG.max_leaf_len for v in value.values())
    )


def _oracle_repeated_leaves(value: Any, repeated: bool = False) -> Counter:
    counts: Counter = Counter()
    if isinstance(value, list):
        inner = repeated or _oracle_consistent(value)
        for item in value:
            counts += _oracle_repeated_leaves(item, inner)
    elif isinstance(value, dict):
        for item in value.values():
            counts += _oracle_repeated_leaves(item, repeated)
    elif repeated:
        counts[(type(value).__name__, value)] += 1
    return counts


def _lists(node: TreeNode, value: Any):
    if node.kind is NodeKind.ARRAY:
        yield node, value
    for child in node.children:
        yield from _lists(child, value[child.key])


def _at(value: Any, path: tuple) -> Any:
    for key in path:
        value = value[key]
    return value


@pytest.mark.parametrize("seed", range(100))
def test_column_view_matches_tree_walk(seed):
    """Column view leaves, duality and consistency labels agree with a direct walk"""
    rng = random.Random(seed)
    value = {"root": _random_value(rng, 4, [200])}
    tree = marked_tree(value, _CFG)

    for node, raw in _lists(tree, value):
        expected = Consistency.CONSISTENT if _oracle_consistent(raw) else Consistency.INCONSISTENT
        assert node.schema_consistent is expected

    view = build_column_view(tree)
    seen: Counter = Counter()
    for values in view.columns.values():
        seen += Counter((type(v).__name__, v) for v in values)
    assert seen == _oracle_repeated_leaves(value)

    for cluster in flatten_and_cluster(tree):
        for path, leaf in zip(cluster.literal_paths, cluster.values):
            assert _at(value, path) == leaf
