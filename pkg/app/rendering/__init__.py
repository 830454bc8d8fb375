from app.rendering.formats import ROW_VIEW_HEADER, render_row_view, render_value, render_view, to_toon
from app.rendering.layout import PromptBundle, PromptStage, assemble_prompt
from app.rendering.sql_prompt import (
    DisclosureLevel,
    ToolContract,
    ToolName,
    contracts_for,
    few_shot_examples,
    generate_sql_prompt,
    tool_specs,
)
from app.rendering.tokens import (
    CharEstimateTokenCounter,
    TokenCounter,
    WhitespaceTokenCounter,
    count_tokens,
    reduction_ratio,
)

__all__ = [
    "ROW_VIEW_HEADER",
    "CharEstimateTokenCounter",
    "DisclosureLevel",
    "PromptBundle",
    "PromptStage",
    "TokenCounter",
    "ToolContract",
    "ToolName",
    "WhitespaceTokenCounter",
    "assemble_prompt",
    "contracts_for",
    "count_tokens",
    "few_shot_examples",
    "generate_sql_prompt",
    "reduction_ratio",
    "render_row_view",
    "render_value",
    "render_view",
    "tool_specs",
    "to_toon",
]
