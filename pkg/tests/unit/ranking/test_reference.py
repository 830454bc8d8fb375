from app.parsing.types import UNPARSED_KEY
from app.ranking.reference import ReferenceQuery, build_reference_query, slim_representation


def test_slim_keeps_context_outside_tables():
    """Repeated records are left out; scalars and residue stay"""
    value = {"title": "FX rates", "rows": [{"a": 1}, {"a": 2}], "note": {"k": 3, UNPARSED_KEY: "see appendix"}}
    slim = slim_representation([value])
    assert slim.as_dict() == {"title": "FX rates", "note.k": 3, "note.unparsed_string": "see appendix"}


def test_slim_prefixes_object_index_for_several_objects():
    slim = slim_representation([{"a": 1}, {"b": 2}])
    assert slim.as_dict() == {"0.a": 1, "1.b": 2}


def test_empty_slim_serializes_to_nothing():
    assert slim_representation([{"rows": [{"a": 1}, {"a": 2}]}]).serialize() == ""


def test_reference_query_combines_text_and_slim():
    slim = slim_representation([{"title": "Quarterly revenue"}])
    query = build_reference_query(["Explain the ", " please"], slim)
    assert {"explain", "the", "please", "quarterly", "revenue", "title"} <= query.terms
    assert query.source.startswith("Explain the  please\n")


def test_reference_query_counts_repeats():
    query = build_reference_query(["cpu cpu mem"])
    assert query.tokens["cpu"] == 2
    assert ReferenceQuery().terms == set()
