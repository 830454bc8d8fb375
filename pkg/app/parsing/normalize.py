"""
Text normalizations applied before the repair strategies.
"""
import re
from typing import Optional

_UNQUOTED_KEY = re.compile(r"([{,]\s*)([A-Za-z_][\w\-]*)(\s*):")
_NESTED_FRAGMENT = re.compile(r":\s*\"(?=[\{\[])")
_PY_KEYWORDS = {"true": "True", "false": "False", "null": "None"}
_JSON_KEYWORD = re.compile(r"\b(true|false|null)\b")
_FENCE = "```"


def split_string_regions(text: str) -> list[tuple[bool, str]]:
    """Split into (is_string_literal, chunk) pairs; literals keep their quotes."""
    regions: list[tuple[bool, str]] = []
    buf_start = 0
    quote: Optional[str] = None
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\\":
            i += 2
            continue
        if quote is None and ch in "\"'":
            if i > buf_start:
                regions.append((False, text[buf_start:i]))
            buf_start = i
            quote = ch
        elif quote is not None and ch == quote:
            regions.append((True, text[buf_start:i + 1]))
            buf_start = i + 1
            quote = None
        i += 1
    if buf_start < n:
        regions.append((quote is not None, text[buf_start:]))
    return regions


def strip_markdown_fences(text: str) -> str:
    stripped = text.strip()
    if not stripped.startswith(_FENCE):
        return stripped
    newline = stripped.find("\n")
    body = stripped[newline + 1:] if newline != -1 else ""
    body = body.rstrip()
    if body.endswith(_FENCE):
        body = body[: -len(_FENCE)]
    return body.strip()


def strip_json_comments(text: str) -> str:
    """Drop // and /* */ comments that sit outside string literals."""
    out = []
    for is_string, chunk in split_string_regions(text):
        if is_string:
            out.append(chunk)
            continue
        chunk = re.sub(r"/\*.*?\*/", "", chunk, flags=re.DOTALL)
        chunk = re.sub(r"//[^\n]*", "", chunk)
        out.append(chunk)
    return "".join(out)


def normalize_control_characters(text: str) -> str:
    out = []
    for is_string, chunk in split_string_regions(text):
        if is_string:
            chunk = chunk.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
            chunk = "".join(c for c in chunk if ord(c) >= 0x20)
        else:
            chunk = "".join(c for c in chunk if ord(c) >= 0x20 or c in "\n\t\r")
        out.append(chunk)
    return "".join(out)


def quote_unquoted_keys(text: str) -> str:
    out = []
    for is_string, chunk in split_string_regions(text):
        out.append(chunk if is_string else _UNQUOTED_KEY.sub(r'\1"\2"\3:', chunk))
    return "".join(out)


def _fragment_end(text: str, start: int) -> Optional[int]:
    depth = 0
    for i in range(start, len(text)):
        ch = text[i]
        if ch in "{[":
            depth += 1
        elif ch in "}]":
            depth -= 1
            if depth == 0:
                return i + 1
    return None


def stabilize_nested_quotes(text: str) -> str:
    """Escape bare quotes inside JSON fragments embedded in string values."""
    out = []
    i = 0
    while True:
        match = _NESTED_FRAGMENT.search(text, i)
        if match is None:
            out.append(text[i:])
            break
        body_start = match.end()
        end = _fragment_end(text, body_start)
        if end is None or end >= len(text) or text[end] != '"':
            out.append(text[i:body_start])
            i = body_start
            continue
        fragment = re.sub(r'(?<!\\)"', r'\\"', text[body_start:end])
        out.append(text[i:body_start])
        out.append(fragment)
        out.append('"')
        i = end + 1
    return "".join(out)


def pythonize_keywords(text: str) -> str:
    out = []
    for is_string, chunk in split_string_regions(text):
        out.append(chunk if is_string else _JSON_KEYWORD.sub(lambda m: _PY_KEYWORDS[m.group(1)], chunk))
    return "".join(out)


def normalize_candidate(text: str) -> str:
    return stabilize_nested_quotes(quote_unquoted_keys(normalize_control_characters(text)))
