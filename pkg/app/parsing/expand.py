import json
from typing import Any

from app.parsing.types import UNPARSED_KEY

INT64_MIN = -(2 ** 63)
INT64_MAX = 2 ** 63 - 1

_NOT_JSON = object()


def parse_int(literal: str) -> int | float:
    """`parse_int` hook for json.loads: integers beyond 64 bits become floats."""
    value = int(literal)
    return value if INT64_MIN <= value <= INT64_MAX else float(value)


def clamp_numbers(value: Any) -> Any:
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return value if INT64_MIN <= value <= INT64_MAX else float(value)
    if isinstance(value, dict):
        return {k: clamp_numbers(v) for k, v in value.items()}
    if isinstance(value, list):
        return [clamp_numbers(v) for v in value]
    return value


def loads(text: str) -> Any:
    return json.loads(text, parse_int=parse_int)


def _as_container(text: str) -> Any:
    stripped = text.strip()
    if not stripped or stripped[0] not in "{[":
        return _NOT_JSON
    try:
        parsed = loads(stripped)
    except (ValueError, RecursionError):
        return _NOT_JSON
    return parsed if isinstance(parsed, (dict, list)) else _NOT_JSON


def expand_nested_json(value: Any) -> Any:
    """
    Replace every string that parses as a JSON object or array with the parsed
    structure, recursing into whatever gets exposed. Idempotent.
    """
    if isinstance(value, dict):
        return {
            k: (v if k == UNPARSED_KEY else expand_nested_json(v))
            for k, v in value.items()
        }
    if isinstance(value, list):
        return [expand_nested_json(v) for v in value]
    if isinstance(value, str):
        parsed = _as_container(value)
        if parsed is not _NOT_JSON:
            return expand_nested_json(parsed)
    return value
