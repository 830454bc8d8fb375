from app.config import TruncationConfig
from app.parsing.types import UNPARSED_KEY
from app.structure.tree import (
    Consistency,
    EdgeOrigin,
    NodeKind,
    build_json_tree,
    is_enumerated,
    marked_tree,
    schema_signature,
)


def test_signature_ignores_key_order_and_number_kind():
    """int and float share a signature and key order does not matter"""
    assert schema_signature({"a": 1, "b": "x"}) == schema_signature({"b": "y", "a": 2.5})
    assert schema_signature({"a": 1}) != schema_signature({"a": "1"})
    assert schema_signature([1, 2.0]) == ("array", frozenset({"number"}))


def test_build_tree_origins_and_residue():
    """Edges carry their origin and residue becomes an annotation"""
    value = {"rows": [1, 2, {UNPARSED_KEY: "tail"}], UNPARSED_KEY: "lead"}
    tree = build_json_tree(value)
    assert tree.origin is EdgeOrigin.ROOT
    assert tree.unparsed == "lead"
    rows = tree.child("rows")
    assert rows.origin is EdgeOrigin.DICT_EDGE
    assert rows.unparsed == "tail"
    assert [c.origin for c in rows.children] == [EdgeOrigin.LIST_EDGE, EdgeOrigin.LIST_EDGE]
    assert tree.to_value() == value


def test_consistent_records():
    tree = marked_tree({"rows": [{"a": 1, "b": "x"}, {"b": "y", "a": 2.5}]})
    assert tree.child("rows").schema_consistent is Consistency.CONSISTENT


def test_inconsistent_records():
    tree = marked_tree({"rows": [{"a": 1}, {"b": 1}]})
    assert tree.child("rows").schema_consistent is Consistency.INCONSISTENT


def test_long_leaf_breaks_consistency():
    """A string longer than max_leaf_len makes its list inconsistent"""
    cfg = TruncationConfig(max_leaf_len=5)
    tree = marked_tree({"notes": ["abcdefgh", "x"]}, cfg)
    assert tree.child("notes").schema_consistent is Consistency.INCONSISTENT


def test_inconsistent_child_propagates_upward():
    """A list containing an inconsistent list is itself inconsistent"""
    tree = marked_tree([[1, "a"], [2, "b"]])
    assert tree.children[0].schema_consistent is Consistency.INCONSISTENT
    assert tree.schema_consistent is Consistency.INCONSISTENT


def test_scalars_and_objects_are_not_applicable():
    tree = marked_tree({"a": 1})
    assert tree.schema_consistent is Consistency.NOT_APPLICABLE
    assert tree.child("a").kind is NodeKind.LEAF


def test_enumerated_dicts():
    """Digit-keyed dicts and dicts of same-shaped objects act as lists"""
    digits = marked_tree({"0": {"v": 1}, "1": {"v": 2}})
    assert digits.enumerated
    assert digits.schema_consistent is Consistency.CONSISTENT
    keyed = build_json_tree({"eu": {"cpu": 1}, "us": {"cpu": 2}})
    assert is_enumerated(keyed)
    assert not is_enumerated(build_json_tree({"eu": {"cpu": 1}, "name": "x"}))
