import pytest

from app.rendering.layout import PromptStage, assemble_prompt
from app.rendering.tokens import CharEstimateTokenCounter, WhitespaceTokenCounter, count_tokens, reduction_ratio


def test_assemble_interleaves_texts_and_views():
    bundle = assemble_prompt(["Before ", " after"], ["{VIEW}"], row_view="ROWS", tool_prompt="TOOLS")
    assert bundle.visible_prompt == "Before {VIEW} after\n\nROWS\n\nTOOLS"
    assert bundle.blocks == ("\n\nROWS", "\n\nTOOLS")
    assert bundle.truncation_triggered
    assert bundle.stage is PromptStage.PRIMARY_CALL


def test_assemble_without_blocks():
    bundle = assemble_prompt(["only text"], [])
    assert bundle.visible_prompt == "only text"
    assert not bundle.truncation_triggered
    assert bundle.tool_prompt is None


def test_assemble_rejects_mismatched_segments():
    with pytest.raises(ValueError, match="expected 2 text segments"):
        assemble_prompt(["a"], ["{V}"])


def test_token_counters():
    assert CharEstimateTokenCounter().count("abcde") == 2
    assert CharEstimateTokenCounter(chars_per_token=1).count("abc") == 3
    assert WhitespaceTokenCounter().count("a b  c") == 3
    assert count_tokens("abcdefgh") == 2
    assert count_tokens("a b", WhitespaceTokenCounter()) == 2


def test_reduction_ratio():
    assert reduction_ratio(100, 25) == 0.75
    assert reduction_ratio(0, 5) == 0.0
    assert reduction_ratio(10, 20) == -1.0
