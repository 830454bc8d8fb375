"""
Candidate detection: split a raw string into text and structured segments.
"""
import re
from typing import Optional

from app.parsing.types import Segment, SegmentKind

_OPENERS = {"{": "}", "[": "]"}
_CLOSERS = {"}": "{", "]": "["}
_FENCE = "```"

_OBJECT_START = re.compile(r"\{\s*(?:\\?[\"'}]|[A-Za-z_][\w\-]*\s*:)")
_ARRAY_START = re.compile(
    r"\[\s*(?:\\?[\"'\[\]{\-\d]|true\b|false\b|null\b|True\b|False\b|None\b)"
)


def scan_balanced(text: str, start: int) -> Optional[int]:
    """
    Return the end offset (exclusive) of the bracketed structure opening at `start`.

    Quotes and backslash escapes are honoured. A mismatched closer aborts the
    candidate (None). A structure still open at end of input runs to the end.
    """
    stack: list[str] = []
    quote: Optional[str] = None
    i = start
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\\":
            i += 2
            continue
        if quote:
            if ch == quote:
                quote = None
            elif ch == "\n" and quote == "'":
                # an apostrophe in prose, not a literal
                return None
        elif ch in "\"'":
            quote = ch
        elif ch in _OPENERS:
            stack.append(ch)
        elif ch in _CLOSERS:
            if not stack or stack[-1] != _CLOSERS[ch]:
                return None
            stack.pop()
            if not stack:
                return i + 1
        i += 1
    return n


def _looks_structured(candidate: str) -> bool:
    if len(candidate) < 2:
        return False
    starter = _OBJECT_START if candidate[0] == "{" else _ARRAY_START
    if not starter.match(candidate):
        return False
    return any(c in candidate for c in ":,\"'")


def _fence_end(text: str, start: int) -> Optional[tuple[int, str]]:
    """(end offset, body) of a fenced block opening at `start`, or None."""
    line_end = text.find("\n", start)
    if line_end == -1:
        return None
    close = text.find(_FENCE, line_end + 1)
    if close == -1:
        return len(text), text[line_end + 1:]
    return close + len(_FENCE), text[line_end + 1:close]


def extract_segments(raw: str) -> list[Segment]:
    """
    Partition `raw` into Text and Structured segments.

    Structured segments are JSON/Python-literal candidates found by a balanced
    bracket scan, or fenced code blocks whose body starts with `{` or `[`
    (the fence is part of the segment).
    """
    segments: list[Segment] = []
    text_start = 0
    i = 0
    n = len(raw)

    def emit_text(end: int) -> None:
        if end > text_start:
            segments.append(Segment(SegmentKind.TEXT, text_start, end, raw[text_start:end]))

    while i < n:
        if raw.startswith(_FENCE, i):
            fence = _fence_end(raw, i)
            if fence is None:
                i += len(_FENCE)
                continue
            end, body = fence
            if body.lstrip()[:1] in ("{", "["):
                emit_text(i)
                segments.append(Segment(SegmentKind.STRUCTURED, i, end, raw[i:end]))
                text_start = i = end
            else:
                # other code blocks stay verbatim text
                i = end
            continue

        if raw[i] in _OPENERS:
            end = scan_balanced(raw, i)
            if end is not None and _looks_structured(raw[i:end]):
                emit_text(i)
                segments.append(Segment(SegmentKind.STRUCTURED, i, end, raw[i:end]))
                text_start = i = end
                continue
        i += 1

    emit_text(n)
    return segments
