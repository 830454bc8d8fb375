import pytest

from app.engines.duckdb.sql import execute_sql
from app.rendering.layout import PromptStage
from app.rendering.sql_prompt import (
    BACKFILL_HEADER,
    FEW_SHOT_HEADER,
    TOOL_SELECTION_HEADER,
    DisclosureLevel,
    ToolName,
    contracts_for,
    few_shot_examples,
    generate_sql_prompt,
    tool_specs,
)


def test_primary_prompt_hides_backfill_contract(card_store):
    """The first call only learns that GenTemplateAndBackfill exists"""
    prompt = generate_sql_prompt(card_store, PromptStage.PRIMARY_CALL)
    assert prompt.startswith(TOOL_SELECTION_HEADER)
    assert "GenTemplateAndBackfill" in prompt
    assert '{"tool_name": "QueryDatastore", "queries": ["SELECT ..."]}' in prompt
    assert "Table: data" in prompt
    assert FEW_SHOT_HEADER in prompt
    assert "BackfillData" not in prompt
    assert "template_path" not in prompt


def test_mode2_prompt_discloses_backfill(card_store):
    prompt = generate_sql_prompt(card_store, PromptStage.MODE2_FOLLOW_UP)
    assert prompt.startswith(BACKFILL_HEADER)
    assert "template_path" in prompt
    assert '"template_path": "path.to.list.(series_idx).data.(N).x"' in prompt
    assert "series_idx values: 0='Newark, NJ'" in prompt
    assert TOOL_SELECTION_HEADER not in prompt


def test_mode3_prompt_is_empty(card_store):
    assert generate_sql_prompt(card_store, PromptStage.MODE3_FOLLOW_UP) == ""


def test_few_shot_examples_use_real_names(card_store):
    assert [sql for _, sql in few_shot_examples(card_store)] == [
        "SELECT series_idx, x, y FROM data ORDER BY series_idx, _row_id",
        "SELECT x, y FROM data WHERE series_idx = 0 ORDER BY _row_id",
        "SELECT series_idx, COUNT(*) AS n, AVG(y) AS avg_y, MAX(y) AS max_y FROM data GROUP BY series_idx ORDER BY series_idx",
    ]


@pytest.mark.parametrize("store_name", ["card_store", "latency_store", "forex_store", "node_store"])
def test_few_shot_examples_execute(request, store_name):
    """Every suggested query runs against the store it was generated from"""
    store = request.getfixturevalue(store_name)
    examples = few_shot_examples(store)
    assert 2 <= len(examples) <= 3
    for _, sql in examples:
        execute_sql(store, sql)


def test_contracts_per_stage():
    assert contracts_for(PromptStage.PRIMARY_CALL)[0].disclosure_level is DisclosureLevel.ENTRY_POINT_ONLY
    assert [c.tool for c in contracts_for(PromptStage.MODE2_FOLLOW_UP)] == [ToolName.BACKFILL_DATA]
    assert contracts_for(PromptStage.MODE3_FOLLOW_UP) == ()


def _names(stage):
    return [s["function"]["name"] for s in tool_specs(stage)]


def test_tool_specs():
    assert _names(PromptStage.PRIMARY_CALL) == ["GenTemplateAndBackfill", "QueryDatastore"]
    assert _names(PromptStage.MODE2_FOLLOW_UP) == ["BackfillData"]
    assert tool_specs(PromptStage.MODE3_FOLLOW_UP) == []
    backfill = tool_specs(PromptStage.MODE2_FOLLOW_UP)[0]["function"]["parameters"]
    assert backfill["required"] == ["queries", "template", "mappings"]
