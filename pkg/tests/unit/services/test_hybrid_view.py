import pytest

from app.config import RenderFormat, TruncationConfig
from app.errors import SqlExecutionError
from app.rendering.formats import ROW_VIEW_HEADER
from app.rendering.sql_prompt import TOOL_SELECTION_HEADER
from app.rendering.tokens import WhitespaceTokenCounter
from app.services.hybrid_view import build_hybrid_view
from tests.factories import PROSE, card_input, machine_fixtures, uniform_records, wrap

QUESTION = "Which location had the highest latency spike?"


def test_card_prompt_layout(settings):
    """Truncated column view in place, then the row view, then the tool prompt"""
    with build_hybrid_view(card_input(), settings) as view:
        prompt = view.prompt
        assert view.truncated
        assert prompt.startswith("Here is the latency chart:\n{")
        assert "... (762 more items)" in prompt
        assert prompt.index(QUESTION) < prompt.index(ROW_VIEW_HEADER) < prompt.index(TOOL_SELECTION_HEADER)
        assert "      x | y_0 | y_1 | y_2\n" in prompt
        assert "      1770163200000 | 2.1 | 17.7 | 28.1\n" in prompt
        assert "      ... (748 more rows)" in prompt
        assert "  series_idx values: 0='Newark, NJ', 1='pdx-linux-ea', 2='New York, NY'" in prompt
        assert view.stats.tables == {"data": 2304}
        assert view.stats.objects == 1
        assert view.stats.reduction_ratio > 0.5
        assert view.bundle.tool_prompt.startswith(TOOL_SELECTION_HEADER)


def test_card_store_holds_untruncated_data(settings):
    with build_hybrid_view(card_input(), settings) as view:
        assert view.store.execute("SELECT COUNT(*) FROM data").rows == [(2304,)]


@pytest.mark.parametrize("name, raw", sorted(machine_fixtures().items()))
def test_machine_inputs_shrink(settings, name, raw):
    """Machine-data inputs shrink by half or more, yet keep a tenth of their size"""
    with build_hybrid_view(raw, settings) as view:
        assert view.truncated, name
        assert 0.5 <= view.stats.reduction_ratio <= 0.9, name


@pytest.mark.parametrize("raw", PROSE)
def test_prose_passes_through(settings, raw):
    with build_hybrid_view(raw, settings) as view:
        assert view.prompt == raw
        assert not view.truncated
        assert view.stats.reduction_ratio == 0.0
        assert view.stats.tables == {}


def test_small_input_gets_rows_but_no_tool_prompt(settings):
    """Untruncated tables still get a row view; only the tool prompt needs truncation"""
    raw = wrap("Rows:\n", {"rows": uniform_records(5)}, "\nWhich host is busiest?")
    with build_hybrid_view(raw, settings) as view:
        assert not view.truncated
        assert view.bundle.tool_prompt is None
        assert TOOL_SELECTION_HEADER not in view.prompt
        assert view.prompt.index("\nWhich host is busiest?") < view.prompt.index(ROW_VIEW_HEADER)
        assert "      id | host | cpu | status\n" in view.prompt
        assert len(view.row_view.rows) == 5
        assert view.row_view.hidden("rows") == 0


def test_toon_rendering(settings):
    raw = wrap("Rows:\n", {"rows": uniform_records(5)})
    with build_hybrid_view(raw, settings, RenderFormat.TOON) as view:
        assert view.prompt.startswith("Rows:\nrows:\n  id[5]: 0,1,2,3,4\n  host[5]: web-00,web-01,web-02,web-03,web-04")


def test_fenced_objects_stay_fenced(settings):
    raw = 'Config:\n```json\n{"debug": true, "workers": 4}\n```\nIs debug on?'
    with build_hybrid_view(raw, settings, RenderFormat.RAW_JSON) as view:
        assert view.prompt == 'Config:\n```json\n{"debug":true,"workers":4}\n```\nIs debug on?'


def test_custom_token_counter(settings):
    with build_hybrid_view("one two three", settings, counter=WhitespaceTokenCounter()) as view:
        assert view.stats.raw_tokens == 3
        assert view.stats.prompt_tokens == 3


def test_store_is_closed_on_exit(settings):
    with build_hybrid_view(card_input(), settings) as view:
        store = view.store
    with pytest.raises(SqlExecutionError):
        store.execute("SELECT 1")


def test_card_schema_block_and_row_footer(settings):
    with build_hybrid_view(card_input(), settings, cfg=TruncationConfig(row_top_k=6)) as view:
        assert "  Total rows: 2304\n  Rows per series: 768\n" in view.prompt
        assert "      ... (762 more rows)" in view.prompt
