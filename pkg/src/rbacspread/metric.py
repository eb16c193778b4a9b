"""Hierarchy tree over actions, LCA-depth distance and set diameter.

Distances here are depths: a larger value means the two actions share a
longer segment prefix, i.e. they are semantically closer.  The diameter
of a set is therefore the *minimum* pairwise distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .catalog import ActionPath


class MetricError(ValueError):
    pass


@dataclass
class Node:
    label: str
    depth: int
    children: dict[str, "Node"] = field(default_factory=dict)
    # actions ending exactly at this node
    actions: list[ActionPath] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class HierarchyTree:
    root: Node
    leaves: dict[str, Node]

    def __contains__(self, action) -> bool:
        key = action.raw if isinstance(action, ActionPath) else action
        return key in self.leaves

    def node_count(self) -> int:
        count, stack = 0, [self.root]
        while stack:
            node = stack.pop()
            count += 1
            stack.extend(node.children.values())
        return count

    def find(self, segments: Sequence[str]) -> Optional[Node]:
        node = self.root
        for seg in segments:
            node = node.children.get(seg)
            if node is None:
                return None
        return node


@dataclass(frozen=True)
class DistanceResult:
    distance: int
    lca_path: str


@dataclass(frozen=True)
class DiameterResult:
    value: Optional[int]
    witness: Optional[tuple[ActionPath, ActionPath]] = None

    @property
    def defined(self) -> bool:
        return self.value is not None


UNDEFINED = DiameterResult(None, None)


def build_tree(actions: Iterable[ActionPath]) -> HierarchyTree:
    root = Node("", 0)
    leaves: dict[str, Node] = {}
    for action in actions:
        node = root
        for seg in action.segments:
            child = node.children.get(seg)
            if child is None:
                child = node.children[seg] = Node(seg, node.depth + 1)
            node = child
        node.actions.append(action)
        leaves[action.raw] = node
    return HierarchyTree(root, leaves)


def common_prefix_length(a: Sequence[str], b: Sequence[str]) -> int:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


def depth(action: ActionPath) -> int:
    """Depth of the leaf for ``action`` (the reflexive case of distance)."""
    return action.depth


def distance(u: ActionPath, v: ActionPath, tree: Optional[HierarchyTree] = None) -> DistanceResult:
    """Depth of the lowest common ancestor of two distinct actions."""
    if u.raw == v.raw:
        raise MetricError(f"distance is defined for distinct actions only: {u.raw}")
    if tree is not None:
        for a in (u, v):
            if a.raw not in tree.leaves:
                raise MetricError(f"action not in tree: {a.raw}")
    k = common_prefix_length(u.segments, v.segments)
    return DistanceResult(k, u.prefix_path(k))


def diameter_bruteforce(members: Iterable[ActionPath]) -> DiameterResult:
    """O(n^2) reference: min pairwise distance, smallest (left, right) witness."""
    items = sorted({a.raw: a for a in members}.values(), key=lambda a: a.raw)
    best: Optional[int] = None
    witness = None
    for u, v in combinations(items, 2):
        d = common_prefix_length(u.segments, v.segments)
        if best is None or d < best:
            best, witness = d, (u, v)
    return DiameterResult(best, witness)


def diameter(members: Iterable[ActionPath], tree: Optional[HierarchyTree] = None) -> DiameterResult:
    """Minimum pairwise LCA depth over a set, with a deterministic witness.

    Sorting by segment tuples puts the minimum on an adjacent pair, so the
    value comes from one sweep.  The witness is the lexicographically
    smallest ``(left.raw, right.raw)`` pair attaining it.
    """
    items = list({a.raw: a for a in members}.values())
    if len(items) < 2:
        return UNDEFINED
    if tree is not None:
        for a in items:
            if a.raw not in tree.leaves:
                raise MetricError(f"action not in tree: {a.raw}")

    by_segments = sorted(items, key=lambda a: a.segments)
    if any(a.segments == b.segments for a, b in zip(by_segments, by_segments[1:])):
        # distinct raws with identical segment tuples ('.' vs '/')
        return diameter_bruteforce(items)
    best = min(
        common_prefix_length(a.segments, b.segments) for a, b in zip(by_segments, by_segments[1:])
    )

    # every member shares the first `best` segments; pairs at distance `best`
    # are exactly those that differ at segment index `best`
    def branch(a: ActionPath):
        return a.segments[best] if best < len(a.segments) else None

    first = min(items, key=lambda a: a.raw)
    others = [a for a in items if branch(a) != branch(first)]
    second = min(others, key=lambda a: a.raw)
    return DiameterResult(best, (first, second))
