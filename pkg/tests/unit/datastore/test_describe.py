from app.engines.duckdb.client import Datastore
from app.engines.duckdb.describe import EMPTY_STORE, schema_description


def test_series_table_description(card_store):
    assert schema_description(card_store) == "\n".join([
        "Available tables in datastore:",
        "Table: data",
        "  Source: CARD 1.props.data.data",
        "  Total rows: 2304",
        "  Rows per series: 768",
        "  series_idx values: 0='Newark, NJ', 1='pdx-linux-ea', 2='New York, NY'",
        "  Columns:",
        "    - series_idx (int)",
        "    - x (int)",
        "    - y (float)",
        "    - _row_id (int)",
    ])


def test_child_table_names_its_parent(node_store):
    description = schema_description(node_store)
    assert "Table: nodes\n  Source: nodes\n  Total rows: 12" in description
    assert "  Parent: nodes (parent_id -> nodes._row_id)" in description
    assert description.index("Table: nodes") < description.index("Table: disks")


def test_empty_store():
    with Datastore() as store:
        assert schema_description(store) == EMPTY_STORE
