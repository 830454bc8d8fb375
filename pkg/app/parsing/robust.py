"""
Two-stage candidate parser.

Fast stage: canonical JSON, then Python literals. Repair stage (after
normalization): structural repair, encoded-payload decoding, embedded-span
recovery. Every accepted value is expanded and checked against the source
words; repaired values are reconciled so unrecovered words land in
`unparsed_string`.
"""
import ast
import json
import re
from typing import Any, Callable, Optional, Union

from json_repair import repair_json

from app.engines.logging import LoggerMixin
from app.parsing.coverage import (
    DEFAULT_COVERAGE_THRESHOLD,
    invented_words,
    missing_words,
    validate_source_coverage,
)
from app.parsing.expand import clamp_numbers, expand_nested_json, loads
from app.parsing.normalize import normalize_candidate, pythonize_keywords, strip_markdown_fences
from app.parsing.segments import scan_balanced
from app.parsing.types import UNPARSED_KEY, ParseOutcome, ParseStage, Segment

_FAIL = object()
_PAIRS = {"{": "}", "[": "]"}
_ENCODED_OPENING = re.compile(r"^[\[{]\s*\\\"")


class SetLiteralError(ValueError):
    """Python sets have no JSON counterpart."""


def _json_key(key: Any) -> str:
    if isinstance(key, str):
        return key
    if key is None or isinstance(key, (bool, int, float)):
        return json.dumps(key)
    raise TypeError(f"unsupported key type {type(key).__name__}")


def _python_to_json(value: Any) -> Any:
    if isinstance(value, dict):
        return {_json_key(k): _python_to_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_python_to_json(v) for v in value]
    if isinstance(value, (set, frozenset)):
        raise SetLiteralError("set literal")
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    raise TypeError(f"unsupported literal {type(value).__name__}")


def load_canonical(text: str) -> Any:
    try:
        value = loads(text)
    except (ValueError, RecursionError):
        return _FAIL
    return value if isinstance(value, (dict, list)) else _FAIL


def load_python_literal(text: str) -> Any:
    attempts = [text]
    pythonized = pythonize_keywords(text)
    if pythonized != text:
        attempts.append(pythonized)
    for attempt in attempts:
        try:
            value = ast.literal_eval(attempt)
        except (ValueError, SyntaxError, TypeError, MemoryError, RecursionError):
            continue
        if isinstance(value, (set, frozenset)):
            raise SetLiteralError("set literal")
        if not isinstance(value, (dict, list, tuple)):
            return _FAIL
        try:
            return clamp_numbers(_python_to_json(value))
        except TypeError:
            return _FAIL
    return _FAIL


def _repair_structure(text: str) -> Any:
    stripped = text.strip()
    if not stripped or stripped[0] not in _PAIRS:
        return _FAIL
    if _ENCODED_OPENING.match(stripped):
        return _FAIL
    if stripped[0] == "{" and ":" not in stripped:
        return _FAIL
    try:
        value = repair_json(stripped, return_objects=True)
    except Exception:  # json_repair raises assorted internal errors on hostile input
        return _FAIL
    if not isinstance(value, (dict, list)):
        return _FAIL
    return clamp_numbers(value)


def _load_any(text: str) -> Any:
    for loader in (load_canonical, load_python_literal, _repair_structure):
        try:
            value = loader(text)
        except SetLiteralError:
            return _FAIL
        if value is not _FAIL:
            return value
    return _FAIL


def _open_state(text: str) -> tuple[list[str], Optional[str], list[int]]:
    """Unclosed openers, the quote left open (if any) and offsets of unmatched closers."""
    stack: list[str] = []
    unmatched: list[int] = []
    quote: Optional[str] = None
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            i += 2
            continue
        if quote:
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
        elif ch in _PAIRS:
            stack.append(ch)
        elif ch in "}]":
            if stack and _PAIRS[stack[-1]] == ch:
                stack.pop()
            else:
                unmatched.append(i)
        i += 1
    return stack, quote, unmatched


def _closed_spans(text: str) -> list[tuple[int, int]]:
    spans = []
    i = 0
    while i < len(text):
        if text[i] in _PAIRS:
            end = scan_balanced(text, i)
            if end is not None and text[end - 1] == _PAIRS[text[i]] and _balanced(text[i:end]):
                spans.append((i, end))
                i = end
                continue
        i += 1
    return spans


def _balanced(span: str) -> bool:
    stack, quote, unmatched = _open_state(span)
    return not stack and quote is None and not unmatched


def _outside(text: str, start: int, end: int) -> str:
    return " ".join((text[:start] + " " + text[end:]).split())


class RobustParser(LoggerMixin):
    """Parses one structured candidate; stateless apart from its threshold."""

    def __init__(self, coverage_threshold: float = DEFAULT_COVERAGE_THRESHOLD):
        self.coverage_threshold = coverage_threshold

    def parse(self, candidate: Union[Segment, str]) -> ParseOutcome:
        text = candidate.content if isinstance(candidate, Segment) else candidate
        source = strip_markdown_fences(text)

        try:
            for stage, loader in (
                (ParseStage.FAST_CANONICAL, load_canonical),
                (ParseStage.FAST_PYTHON_LITERAL, load_python_literal),
            ):
                value = loader(source)
                if value is _FAIL:
                    continue
                value = expand_nested_json(value)
                if validate_source_coverage(value, source, self.coverage_threshold):
                    return ParseOutcome(value=value, stage=stage)
                self.logger.debug(f"{stage.value} parse failed coverage")
        except SetLiteralError:
            self.logger.debug("Candidate is a Python set literal; rejected")
            return ParseOutcome.rejected()

        normalized = normalize_candidate(source)
        repairers: tuple[tuple[ParseStage, Callable[[str], Optional[tuple[Any, str]]]], ...] = (
            (ParseStage.REPAIR_MALFORMED, self._repair_malformed),
            (ParseStage.REPAIR_ENCODED, self._repair_encoded),
            (ParseStage.REPAIR_EMBEDDED_SPAN, self._repair_embedded_span),
        )
        for stage, repairer in repairers:
            attempt = repairer(normalized)
            if attempt is None:
                continue
            value, outside_text = attempt
            outcome = self._reconcile(expand_nested_json(value), source, stage, outside_text)
            if outcome is not None:
                return outcome

        self.logger.debug(
            "Candidate rejected", extra={"extra_data": {"length": len(source)}}
        )
        return ParseOutcome.rejected()

    def _reconcile(
        self, value: Any, source: str, stage: ParseStage, outside_text: str
    ) -> Optional[ParseOutcome]:
        invented = invented_words(value, source)
        if invented:
            self.logger.debug(
                f"{stage.value} invented content; discarded",
                extra={"extra_data": {"words": sorted(invented)[:10]}},
            )
            return None

        residue_parts = [outside_text] if outside_text else []
        covered = {w.casefold() for w in re.findall(r"[^\W\d_]{2,}", outside_text)}
        residue_parts.extend(w for w in missing_words(value, source) if w.casefold() not in covered)
        residue = " ".join(residue_parts).strip()

        if residue and len(residue) <= len(json.dumps(value, ensure_ascii=False)):
            value = _attach_residue(value, residue)
        else:
            residue = ""

        if not validate_source_coverage(value, source, self.coverage_threshold):
            return None
        return ParseOutcome(value=value, stage=stage, residue=residue or None)

    def _repair_malformed(self, text: str) -> Optional[tuple[Any, str]]:
        value = _repair_structure(text)
        return None if value is _FAIL else (value, "")

    def _repair_encoded(self, text: str) -> Optional[tuple[Any, str]]:
        stripped = text.strip()
        decoded: Any = _FAIL
        if len(stripped) >= 2 and stripped[0] == stripped[-1] and stripped[0] in "\"'":
            try:
                decoded = ast.literal_eval(stripped)
            except (ValueError, SyntaxError):
                decoded = _FAIL
        elif '\\"' in stripped:
            try:
                decoded = json.loads(f'"{stripped}"')
            except ValueError:
                decoded = _FAIL
        for _ in range(3):
            if not isinstance(decoded, str):
                break
            candidate = decoded.strip()
            value = load_canonical(candidate)
            if value is not _FAIL:
                return value, ""
            try:
                decoded = json.loads(candidate)
            except ValueError:
                break
        return None

    def _repair_embedded_span(self, text: str) -> Optional[tuple[Any, str]]:
        spans = _closed_spans(text)
        if spans:
            start, end = max(spans, key=lambda span: (span[1] - span[0], -span[0]))
            value = _load_any(text[start:end])
            if value is not _FAIL:
                return value, _outside(text, start, end)

        # restore missing closers on a span running to the end
        first = min((i for i in (text.find("{"), text.find("[")) if i != -1), default=-1)
        if first != -1:
            tail = text[first:]
            stack, quote, unmatched = _open_state(tail)
            if stack and not unmatched:
                completed = tail + (quote or "") + "".join(_PAIRS[c] for c in reversed(stack))
                value = _load_any(completed)
                if value is not _FAIL:
                    return value, _outside(text, first, len(text))

        # restore missing openers before a dangling closer
        stack, quote, unmatched = _open_state(text)
        if unmatched and not stack and quote is None:
            end = unmatched[-1] + 1
            start = text.find('"')
            if 0 <= start < end:
                openers = "".join("{" if text[i] == "}" else "[" for i in reversed(unmatched))
                value = _load_any(openers + text[start:end])
                if value is not _FAIL:
                    return value, _outside(text, start, end)
        return None


def _attach_residue(value: Any, residue: str) -> Any:
    if isinstance(value, dict):
        merged = dict(value)
        existing = merged.get(UNPARSED_KEY)
        merged[UNPARSED_KEY] = f"{existing} {residue}" if isinstance(existing, str) else residue
        return merged
    return list(value) + [{UNPARSED_KEY: residue}]


_default_parser = RobustParser()


def parse_candidate(segment: Union[Segment, str], coverage_threshold: Optional[float] = None) -> ParseOutcome:
    parser = _default_parser if coverage_threshold is None else RobustParser(coverage_threshold)
    return parser.parse(segment)
