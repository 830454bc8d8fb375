from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence


class PromptStage(str, Enum):
    PRIMARY_CALL = "PrimaryCall"
    MODE2_FOLLOW_UP = "Mode2FollowUp"
    MODE3_FOLLOW_UP = "Mode3FollowUp"


BLOCK_SEPARATOR = "\n\n"


@dataclass(frozen=True)
class PromptBundle:
    visible_prompt: str
    truncation_triggered: bool
    tool_prompt: Optional[str] = None
    stage: PromptStage = PromptStage.PRIMARY_CALL
    # appended blocks, separators included, in prompt order
    blocks: tuple[str, ...] = ()


def assemble_prompt(
    texts: Sequence[str],
    col_views: Sequence[str],
    row_view: str = "",
    tool_prompt: Optional[str] = None,
) -> PromptBundle:
    """
    Text segments interleaved with the column views in input order, followed by
    the row view block and the tool prompt block when present.
    """
    if len(texts) != len(col_views) + 1:
        raise ValueError(f"expected {len(col_views) + 1} text segments, got {len(texts)}")
    parts: list[str] = []
    for text, view in zip(texts, col_views):
        parts.extend((text, view))
    parts.append(texts[-1])
    blocks = []
    if row_view:
        blocks.append(BLOCK_SEPARATOR + row_view)
    if tool_prompt:
        blocks.append(BLOCK_SEPARATOR + tool_prompt)
    return PromptBundle(
        visible_prompt="".join(parts) + "".join(blocks),
        truncation_triggered=tool_prompt is not None,
        tool_prompt=tool_prompt,
        blocks=tuple(blocks),
    )
