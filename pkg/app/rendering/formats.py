"""
Serializers for views: beautified JSON (default), minified JSON, and a
TOON dialect (YAML-like indentation, CSV-style rows for uniform arrays).
"""
import json
import re
from typing import Any, Union

from app.config import RenderFormat
from app.structure.columns import ColumnView
from app.structure.rows import RowView
from app.structure.truncation import omission_marker

ROW_VIEW_HEADER = "### Row View:"

_BARE_KEY = re.compile(r"^[A-Za-z_][\w.-]*$")
_NUMBER_LIKE = re.compile(r"^-?\d+(\.\d+)?([eE][+-]?\d+)?$")
_TOON_SPECIAL = set(',:"\n\r\t#[]{}')
_INDENT = "  "


def _is_scalar(value: Any) -> bool:
    return value is None or isinstance(value, (bool, int, float, str))


def toon_scalar(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return json.dumps(value)
    text = str(value)
    if (
        not text
        or text != text.strip()
        or text.startswith("- ")
        or text in ("true", "false", "null")
        or _NUMBER_LIKE.match(text)
        or any(ch in _TOON_SPECIAL for ch in text)
    ):
        return json.dumps(text, ensure_ascii=False)
    return text


def toon_key(key: Any) -> str:
    key = str(key)
    return key if _BARE_KEY.match(key) else json.dumps(key, ensure_ascii=False)


def _uniform_records(items: list) -> bool:
    if not items or not all(isinstance(i, dict) and i for i in items):
        return False
    keys = list(items[0])
    return all(list(i) == keys and all(_is_scalar(v) for v in i.values()) for i in items)


def _toon_list(label: str, items: list, level: int) -> list[str]:
    pad = _INDENT * level
    if all(_is_scalar(i) for i in items):
        body = ",".join(toon_scalar(i) for i in items)
        return [f"{pad}{label}[{len(items)}]:" + (f" {body}" if body else "")]
    if _uniform_records(items):
        fields = ",".join(toon_key(k) for k in items[0])
        lines = [f"{pad}{label}[{len(items)}]{{{fields}}}:"]
        lines.extend(f"{pad}{_INDENT}" + ",".join(toon_scalar(v) for v in i.values()) for i in items)
        return lines
    lines = [f"{pad}{label}[{len(items)}]:"]
    for item in items:
        lines.extend(_toon_item(item, level + 1))
    return lines


def _toon_item(item: Any, level: int) -> list[str]:
    pad = _INDENT * level
    if _is_scalar(item):
        return [f"{pad}- {toon_scalar(item)}"]
    if isinstance(item, list):
        nested = _toon_list("", item, level + 1)
        nested[0] = f"{pad}- {nested[0].lstrip()}"
        return nested
    if not item:
        return [f"{pad}- {{}}"]
    nested = _toon_dict(item, level + 1)
    nested[0] = f"{pad}- {nested[0][len(pad) + len(_INDENT):]}"
    return nested


def _toon_dict(value: dict, level: int) -> list[str]:
    pad = _INDENT * level
    lines: list[str] = []
    for key, child in value.items():
        label = toon_key(key)
        if _is_scalar(child):
            lines.append(f"{pad}{label}: {toon_scalar(child)}")
        elif isinstance(child, list):
            lines.extend(_toon_list(label, child, level))
        elif not child:
            lines.append(f"{pad}{label}: {{}}")
        else:
            lines.append(f"{pad}{label}:")
            lines.extend(_toon_dict(child, level + 1))
    return lines


def to_toon(value: Any) -> str:
    if _is_scalar(value):
        return toon_scalar(value)
    if isinstance(value, list):
        return "\n".join(_toon_list("", value, 0))
    if not value:
        return "{}"
    return "\n".join(_toon_dict(value, 0))


def render_value(value: Any, fmt: RenderFormat = RenderFormat.BEAUTIFIED_JSON) -> str:
    if fmt is RenderFormat.RAW_JSON:
        return json.dumps(value, ensure_ascii=False, separators=(",", ":"))
    if fmt is RenderFormat.TOON:
        return to_toon(value)
    return json.dumps(value, ensure_ascii=False, indent=2)


def format_cell(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value).replace("|", "\\|").replace("\n", "\\n")


def render_row_view(view: RowView) -> str:
    if view.empty:
        return ""
    lines = [ROW_VIEW_HEADER]
    for table, rows in view.by_table().items():
        header = " | ".join(rows[0].candidate.columns)
        lines.append(f"    {table}:")
        lines.append(f"      {header}")
        lines.append(f"      {'-' * len(header)}")
        lines.extend("      " + " | ".join(format_cell(v) for v in r.candidate.values) for r in rows)
        hidden = view.hidden(table)
        if hidden:
            lines.append(f"      {omission_marker(hidden, 'rows')}")
    return "\n".join(lines)


def render_view(view: Union[ColumnView, RowView], fmt: RenderFormat = RenderFormat.BEAUTIFIED_JSON) -> str:
    if isinstance(view, RowView):
        return render_row_view(view)
    if view.empty or view.document is None:
        return ""
    return render_value(view.document, fmt)
