from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional, Union

# Null | Bool | Number | String | list | dict, as produced by json.loads
JsonValue = Union[None, bool, int, float, str, list, dict]

UNPARSED_KEY = "unparsed_string"


class SegmentKind(str, Enum):
    TEXT = "text"
    STRUCTURED = "structured"


@dataclass(frozen=True)
class Segment:
    """A slice of the raw input; `start`/`end` are character offsets."""

    kind: SegmentKind
    start: int
    end: int
    content: str

    @property
    def fenced(self) -> bool:
        return self.kind is SegmentKind.STRUCTURED and self.content.lstrip().startswith("```")


class ParseStage(str, Enum):
    FAST_CANONICAL = "FastCanonical"
    FAST_PYTHON_LITERAL = "FastPythonLiteral"
    REPAIR_MALFORMED = "RepairMalformed"
    REPAIR_ENCODED = "RepairEncoded"
    REPAIR_EMBEDDED_SPAN = "RepairEmbeddedSpan"
    REJECTED = "Rejected"

    @property
    def is_repair(self) -> bool:
        return self in (
            ParseStage.REPAIR_MALFORMED,
            ParseStage.REPAIR_ENCODED,
            ParseStage.REPAIR_EMBEDDED_SPAN,
        )


@dataclass(frozen=True)
class ParseOutcome:
    value: Any
    stage: ParseStage
    residue: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.stage is not ParseStage.REJECTED

    @classmethod
    def rejected(cls) -> "ParseOutcome":
        return cls(value=None, stage=ParseStage.REJECTED)


@dataclass(frozen=True)
class ParsedObject:
    value: Any
    outcome: ParseOutcome
    segment: Segment


@dataclass
class ParsedDocument:
    """texts[i] precedes objects[i]; there is always one more text than objects."""

    texts: list[str] = field(default_factory=lambda: [""])
    objects: list[ParsedObject] = field(default_factory=list)

    @property
    def values(self) -> list[Any]:
        return [obj.value for obj in self.objects]
