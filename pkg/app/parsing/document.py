from typing import Optional

from app.engines.logging import get_logger
from app.parsing.robust import RobustParser
from app.parsing.segments import extract_segments
from app.parsing.types import ParsedDocument, ParsedObject, SegmentKind

logger = get_logger(__name__)


def parse_document(raw: str, parser: Optional[RobustParser] = None) -> ParsedDocument:
    """
    Interleave text and recovered objects. Rejected candidates fold back into
    the surrounding text, so texts[0] + obj[0] + texts[1] + ... covers the input.
    """
    parser = parser or RobustParser()
    document = ParsedDocument(texts=[], objects=[])
    buffer: list[str] = []
    rejected = 0

    for segment in extract_segments(raw):
        if segment.kind is SegmentKind.TEXT:
            buffer.append(segment.content)
            continue
        outcome = parser.parse(segment)
        if not outcome.ok:
            rejected += 1
            buffer.append(segment.content)
            continue
        document.texts.append("".join(buffer))
        buffer = []
        document.objects.append(ParsedObject(value=outcome.value, outcome=outcome, segment=segment))

    document.texts.append("".join(buffer))
    logger.debug(
        "Parsed document",
        extra={"extra_data": {
            "objects": len(document.objects),
            "rejected": rejected,
            "stages": [obj.outcome.stage.value for obj in document.objects],
        }},
    )
    return document
