import math
from dataclasses import dataclass
from typing import Optional, Protocol


class TokenCounter(Protocol):
    def count(self, text: str) -> int: ...


@dataclass(frozen=True)
class CharEstimateTokenCounter:
    """Provider-agnostic estimate: one token per `chars_per_token` characters."""

    chars_per_token: int = 4

    def count(self, text: str) -> int:
        return math.ceil(len(text) / self.chars_per_token)


class WhitespaceTokenCounter:
    def count(self, text: str) -> int:
        return len(text.split())


DEFAULT_COUNTER = CharEstimateTokenCounter()


def count_tokens(text: str, counter: Optional[TokenCounter] = None) -> int:
    return (counter or DEFAULT_COUNTER).count(text)


def reduction_ratio(raw_tokens: int, prompt_tokens: int) -> float:
    if raw_tokens <= 0:
        return 0.0
    return 1.0 - prompt_tokens / raw_tokens
