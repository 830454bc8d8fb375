from app.parsing.coverage import validate_source_coverage
from app.parsing.document import parse_document
from app.parsing.expand import expand_nested_json
from app.parsing.normalize import strip_json_comments
from app.parsing.robust import RobustParser, parse_candidate
from app.parsing.segments import extract_segments
from app.parsing.types import (
    UNPARSED_KEY,
    JsonValue,
    ParsedDocument,
    ParsedObject,
    ParseOutcome,
    ParseStage,
    Segment,
    SegmentKind,
)

__all__ = [
    "UNPARSED_KEY",
    "JsonValue",
    "ParsedDocument",
    "ParsedObject",
    "ParseOutcome",
    "ParseStage",
    "RobustParser",
    "Segment",
    "SegmentKind",
    "expand_nested_json",
    "extract_segments",
    "parse_candidate",
    "parse_document",
    "strip_json_comments",
    "validate_source_coverage",
]
