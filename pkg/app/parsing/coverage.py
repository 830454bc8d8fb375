"""
Word-overlap check between a parse and the text it came from.
"""
import re
from typing import Any, Iterator

from app.parsing.types import UNPARSED_KEY

DEFAULT_COVERAGE_THRESHOLD = 0.9

_WORD = re.compile(r"[^\W\d_]{2,}")
_ESCAPE = re.compile(r"\\(u[0-9a-fA-F]{4}|.)", re.DOTALL)
# literal keywords carry no content on either side
_KEYWORDS = frozenset({"true", "false", "null", "none", "nan", "infinity"})


def _unescape(match: re.Match) -> str:
    token = match.group(1)
    if token[0] == "u" and len(token) == 5:
        return chr(int(token[1:], 16))
    return " "


def iter_words(text: str) -> Iterator[str]:
    """Alphabetic words of length >= 2 as they appear in `text`, escapes decoded."""
    for match in _WORD.finditer(_ESCAPE.sub(_unescape, text)):
        if match.group(0).casefold() not in _KEYWORDS:
            yield match.group(0)


def original_words(text: str) -> list[str]:
    return [w.casefold() for w in iter_words(text)]


def _strings(value: Any) -> Iterator[str]:
    if isinstance(value, dict):
        for key, child in value.items():
            if key != UNPARSED_KEY:
                yield str(key)
            yield from _strings(child)
    elif isinstance(value, list):
        for child in value:
            yield from _strings(child)
    elif isinstance(value, str):
        yield value


def value_words(value: Any) -> set[str]:
    words: set[str] = set()
    for text in _strings(value):
        for match in _WORD.finditer(text):
            word = match.group(0).casefold()
            if word not in _KEYWORDS:
                words.add(word)
    return words


def coverage_ratio(value: Any, original: str) -> float:
    reference = original_words(original)
    if not reference:
        return 1.0
    present = value_words(value)
    return sum(1 for w in reference if w in present) / len(reference)


def validate_source_coverage(
    value: Any, original: str, threshold: float = DEFAULT_COVERAGE_THRESHOLD
) -> bool:
    """True iff enough of the original's words survive in the parse (residue included)."""
    return coverage_ratio(value, original) >= threshold


def invented_words(value: Any, original: str) -> set[str]:
    return value_words(value) - set(original_words(original))


def missing_words(value: Any, original: str) -> list[str]:
    """Original words absent from `value`, first occurrence order, original casing."""
    present = value_words(value)
    seen: set[str] = set()
    missing = []
    for word in iter_words(original):
        folded = word.casefold()
        if folded not in present and folded not in seen:
            seen.add(folded)
            missing.append(word)
    return missing
