import json
from collections import Counter
from dataclasses import dataclass
from typing import Any, Optional, Sequence

from app.parsing.types import UNPARSED_KEY
from app.ranking.bm25 import ReferenceQuery, tokenize
from app.structure.columns import flatten_and_cluster
from app.structure.tree import TreeNode, marked_tree


@dataclass(frozen=True)
class SlimRepresentation:
    """Key-value content outside detected tables, keyed by dotted path."""

    pairs: tuple[tuple[str, Any], ...] = ()

    def as_dict(self) -> dict[str, Any]:
        return dict(self.pairs)

    def serialize(self) -> str:
        if not self.pairs:
            return ""
        return json.dumps(self.as_dict(), ensure_ascii=False, default=str)


def _dotted(path: tuple) -> str:
    return ".".join(str(p) for p in path)


def slim_representation(
    objects: Sequence[Any], trees: Optional[Sequence[TreeNode]] = None
) -> SlimRepresentation:
    """Leaves outside Consistent repeated records plus residue annotations."""
    if trees is None:
        trees = [marked_tree(value) for value in objects]
    prefix_objects = len(trees) > 1
    pairs: list[tuple[str, Any]] = []
    for index, tree in enumerate(trees):
        base = (index,) if prefix_objects else ()
        for cluster in flatten_and_cluster(tree):
            if cluster.repeated:
                continue
            for path, value in zip(cluster.literal_paths, cluster.values):
                pairs.append((_dotted(base + path), value))
        for node, path in _annotated(tree, ()):
            pairs.append((_dotted(base + path + (UNPARSED_KEY,)), node.unparsed))
    return SlimRepresentation(pairs=tuple(pairs))


def _annotated(node: TreeNode, path: tuple):
    if node.unparsed is not None:
        yield node, path
    for child in node.children:
        yield from _annotated(child, path + (child.key,))


def build_reference_query(texts: Sequence[str], slim: Optional[SlimRepresentation] = None) -> ReferenceQuery:
    source = "".join(texts)
    if slim is not None and slim.pairs:
        source = f"{source}\n{slim.serialize()}"
    return ReferenceQuery(source=source, tokens=Counter(tokenize(source)))
