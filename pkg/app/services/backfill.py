"""
Deterministic BackfillData execution.

A mapping path such as `chart.list.(series_idx).data.(N).x` names the list
rebuilt from SQL rows. The last placeholder is always the positional
dimension: the list is cleared and refilled in result order, whatever the
placeholder is called. An earlier placeholder that is also a result column
groups the rows, one group element per distinct value. A mapping whose only
placeholder is such a group column writes one field per group element.
Group elements cloned for new groups start with every scalar cleared.
"""
import copy
from dataclasses import dataclass, field, replace
from typing import Any, Iterator, Optional, Union

from app.engines.duckdb.client import Datastore
from app.engines.duckdb.models import SqlResult
from app.engines.duckdb.sql import execute_sql
from app.engines.logging import get_logger
from app.errors import BackfillError, BackfillPathError, MissingColumnError
from app.schemas.v1.tools import PLACEHOLDER, BackfillMapping, ToolCallPayload

logger = get_logger(__name__)

PathKey = tuple[Union[str, int], ...]


@dataclass(frozen=True)
class MappingPlan:
    mapping: BackfillMapping
    result: int
    group: Optional[str]
    prefix: list[str]  # up to the group list, or the positional list when flat
    middle: list[str]  # group element to positional list
    suffix: list[str]  # positional element to the written field
    positional: bool
    placeholder: Optional[str] = None  # the only placeholder, when there is one


@dataclass
class ListRebuild:
    path: PathKey
    rows: list[int]
    result: int
    fields: list[tuple[list[str], str]] = field(default_factory=list)


class UnsupportedGrouping(Exception):
    pass


def split_path(path: str) -> list[str]:
    return [part for part in path.split(".") if part]


def _placeholder(segment: str) -> Optional[str]:
    match = PLACEHOLDER.fullmatch(segment)
    return match.group(1) if match else None


def _match_key(node: dict, segment: str) -> Optional[str]:
    if segment in node:
        return segment
    folded = [k for k in node if str(k).casefold() == segment.casefold()]
    return folded[0] if len(folded) == 1 else None


def _walk(root: Any, segments: list[str]) -> Optional[list[Union[str, int]]]:
    node, out = root, []
    for segment in segments:
        if isinstance(node, dict):
            key = _match_key(node, segment)
            if key is None:
                return None
            out.append(key)
            node = node[key]
        elif isinstance(node, list) and segment.isdigit() and int(segment) < len(node):
            out.append(int(segment))
            node = node[int(segment)]
        else:
            return None
    return out


def _node_paths(node: Any, path: tuple = ()) -> Iterator[tuple]:
    yield path
    if isinstance(node, dict):
        for key, child in node.items():
            yield from _node_paths(child, path + (key,))
    elif isinstance(node, list):
        for i, child in enumerate(node):
            yield from _node_paths(child, path + (i,))


def get_at(root: Any, path: PathKey) -> Any:
    node = root
    for key in path:
        node = node[key]
    return node


def validate_and_correct_path(root: Any, segments: list[str], expect_list: bool, original: str) -> list:
    """
    Exact match, then case-insensitive keys, then the unique location in the
    document whose trailing keys equal `segments`.
    """
    walked = _walk(root, segments)
    if walked is not None and (not expect_list or isinstance(get_at(root, tuple(walked)), list)):
        return walked
    if not segments:
        raise BackfillPathError(original, "the template root is not a list")
    wanted = [s.casefold() for s in segments]
    matches = []
    for path in _node_paths(root):
        if len(path) < len(segments):
            continue
        tail = [str(p).casefold() for p in path[len(path) - len(segments):]]
        if tail != wanted:
            continue
        if expect_list and not isinstance(get_at(root, path), list):
            continue
        matches.append(list(path))
    if len(matches) == 1:
        logger.debug(f"Corrected template path {'.'.join(segments)} -> {'.'.join(map(str, matches[0]))}")
        return matches[0]
    if not matches:
        raise BackfillPathError(original, f"'{'.'.join(segments)}' not found in the template")
    raise BackfillPathError(original, f"'{'.'.join(segments)}' matches {len(matches)} locations")


def _set_field(item: Any, suffix: list[str], value: Any) -> Any:
    if not suffix:
        return value
    node = item
    for segment in suffix[:-1]:
        key = _match_key(node, segment) or segment
        if not isinstance(node.get(key), dict):
            node[key] = {}
        node = node[key]
    node[_match_key(node, suffix[-1]) or suffix[-1]] = value
    return item


def _prototype_from_suffix(fields: list[tuple[list[str], str]]) -> Any:
    if any(not suffix for suffix, _ in fields):
        return None
    item: dict = {}
    for suffix, _ in fields:
        _set_field(item, suffix, None)
    return item


def _plan(mapping: BackfillMapping, results: list[SqlResult]) -> MappingPlan:
    for index, result in enumerate(results):
        if mapping.sql_column in result.columns:
            break
    else:
        available = sorted({c for r in results for c in r.columns})
        raise MissingColumnError(mapping.sql_column, available)
    columns = results[index].columns

    segments = split_path(mapping.template_path)
    holes = [i for i, s in enumerate(segments) if _placeholder(s) is not None]
    if not holes:
        return MappingPlan(mapping, index, None, segments, [], [], positional=False)
    last = holes[-1]
    group = None
    if len(holes) == 2:
        group = _placeholder(segments[holes[0]])
        if group not in columns:
            raise UnsupportedGrouping(f"placeholder ({group}) is not a result column")
        return MappingPlan(
            mapping,
            index,
            group,
            prefix=segments[: holes[0]],
            middle=segments[holes[0] + 1: last],
            suffix=segments[last + 1:],
            positional=True,
        )
    return MappingPlan(
        mapping,
        index,
        None,
        segments[:last],
        [],
        segments[last + 1:],
        positional=True,
        placeholder=_placeholder(segments[last]),
    )


def _group_field(plan: MappingPlan, groups: set[str], results: list[SqlResult]) -> MappingPlan:
    """A lone placeholder naming the group column addresses group elements, not positions."""
    if plan.placeholder in groups and plan.placeholder in results[plan.result].columns:
        return replace(plan, group=plan.placeholder, positional=False)
    return plan


def _group_rows(result: SqlResult, column: str) -> list[tuple[Any, list[int]]]:
    order: list[Any] = []
    rows: dict[Any, list[int]] = {}
    values = result.column(column)
    for i, value in enumerate(values):
        if value not in rows:
            order.append(value)
            rows[value] = []
        rows[value].append(i)
    return [(value, rows[value]) for value in order]


def _group_slot(values: list[Any], value: Any) -> int:
    if all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in values):
        return value
    return values.index(value)


def _cleared(node: Any) -> Any:
    if isinstance(node, dict):
        return {key: _cleared(value) for key, value in node.items()}
    if isinstance(node, list):
        return [_cleared(value) for value in node]
    return None


def _first_item(document: Any, group_path: PathKey, middle: list[str]) -> Any:
    """First element of the positional list under any element of the group list."""
    for element in get_at(document, group_path):
        walked = _walk(element, middle)
        if walked is None:
            continue
        target = get_at(element, tuple(walked))
        if isinstance(target, list) and target:
            return copy.deepcopy(target[0])
    return None


def execute_backfill(template: Any, call: ToolCallPayload, store: Datastore) -> Any:
    if call.tool_name != "BackfillData":
        raise BackfillError(f"expected a BackfillData call, got {call.tool_name}")
    if template is None:
        raise BackfillError("BackfillData needs a template")
    results = [execute_sql(store, query) for query in call.queries]

    try:
        plans = [_plan(m, results) for m in call.mappings]
        groups = {p.group for p in plans if p.group is not None}
        if len(groups) > 1:
            raise UnsupportedGrouping(f"more than one group column: {', '.join(sorted(groups))}")
        plans = [_group_field(p, groups, results) for p in plans]
    except UnsupportedGrouping as e:
        logger.warning(f"Backfill grouping unsupported, template returned unchanged: {e}")
        return template

    document = copy.deepcopy(template)
    rebuilds: dict[PathKey, ListRebuild] = {}
    prototypes: dict[PathKey, Any] = {}

    for plan in plans:
        result = results[plan.result]
        path = plan.mapping.template_path
        if not plan.positional and plan.group is None:
            if len(result) != 1:
                raise BackfillError(
                    f"mapping '{path}' has no list placeholder and needs exactly one result row, got {len(result)}"
                )
            target = validate_and_correct_path(document, plan.prefix, expect_list=False, original=path)
            if not target:
                raise BackfillPathError(path, "cannot overwrite the template root")
            parent = get_at(document, tuple(target[:-1]))
            parent[target[-1]] = result.rows[0][result.columns.index(plan.mapping.sql_column)]
            continue

        if plan.group is None:
            list_path = tuple(validate_and_correct_path(document, plan.prefix, expect_list=True, original=path))
            rebuild = rebuilds.setdefault(list_path, ListRebuild(list_path, list(range(len(result))), plan.result))
            rebuild.fields.append((plan.suffix, plan.mapping.sql_column))
            continue

        group_path = tuple(validate_and_correct_path(document, plan.prefix, expect_list=True, original=path))
        group_list = get_at(document, group_path)
        if not group_list:
            raise BackfillPathError(path, "the group list has no element to clone")
        grouped = _group_rows(result, plan.group)
        values = [value for value, _ in grouped]
        for value, rows in grouped:
            slot = _group_slot(values, value)
            while len(group_list) <= slot:
                group_list.append(_cleared(group_list[0]))
            if not plan.positional:
                column = result.columns.index(plan.mapping.sql_column)
                group_list[slot] = _set_field(group_list[slot], plan.suffix, result.rows[rows[0]][column])
                continue
            element_path = group_path + (slot,)
            relative = validate_and_correct_path(group_list[slot], plan.middle, expect_list=True, original=path)
            list_path = element_path + tuple(relative)
            rebuild = rebuilds.setdefault(list_path, ListRebuild(list_path, rows, plan.result))
            rebuild.fields.append((plan.suffix, plan.mapping.sql_column))
            if group_path not in prototypes:
                prototypes[group_path] = _first_item(document, group_path, plan.middle)
            prototypes.setdefault(list_path, prototypes[group_path])

    for list_path, rebuild in rebuilds.items():
        target = get_at(document, list_path)
        prototype = copy.deepcopy(target[0]) if target else prototypes.get(list_path)
        if prototype is None:
            prototype = _prototype_from_suffix(rebuild.fields)
        result = results[rebuild.result]
        items = []
        for row in rebuild.rows:
            item = copy.deepcopy(prototype)
            for suffix, column in rebuild.fields:
                item = _set_field(item, suffix, result.rows[row][result.columns.index(column)])
            items.append(item)
        target[:] = items
        logger.debug(f"Rebuilt {'.'.join(map(str, list_path))} with {len(items)} items")
    return document
