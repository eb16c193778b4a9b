"""Expanding patterns over a catalog and computing effective permission sets."""

from __future__ import annotations

import logging
from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .catalog import ActionPath, Catalog
from .grammar import WildcardPattern, parse_pattern

log = logging.getLogger(__name__)

PatternLike = Union[str, WildcardPattern]


@dataclass(frozen=True)
class MatchSet:
    pattern: WildcardPattern
    members: tuple[ActionPath, ...]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, item) -> bool:
        key = item.raw if isinstance(item, ActionPath) else str(item).lower()
        return any(m.raw == key for m in self.members)

    @property
    def raws(self) -> list[str]:
        return [m.raw for m in self.members]


def _as_pattern(p: PatternLike, allow_bare_wildcard: bool = False) -> WildcardPattern:
    if isinstance(p, WildcardPattern):
        return p
    return parse_pattern(p, allow_bare_wildcard=allow_bare_wildcard)


def _matching(pattern: WildcardPattern, catalog: Catalog) -> list[ActionPath]:
    if pattern.explicit:
        action = catalog.get(pattern.raw)
        return [action] if action is not None else []
    prefix, matcher = pattern.prefix, pattern.matcher
    raws = catalog.raws
    # the catalog is sorted by raw, so every candidate lies in one prefix block
    lo = bisect_left(raws, prefix)
    out = []
    for i in range(lo, len(raws)):
        raw = raws[i]
        if not raw.startswith(prefix):
            break
        if matcher.matches(raw):
            out.append(catalog.actions[i])
    return out


def expand(pattern: PatternLike, catalog: Catalog, *, allow_bare_wildcard: bool = False) -> MatchSet:
    """All catalog actions matched by ``pattern``, in catalog order."""
    w = _as_pattern(pattern, allow_bare_wildcard)
    return MatchSet(w, tuple(_matching(w, catalog)))


def effective_set(
    action: PatternLike,
    not_actions: Sequence[PatternLike],
    catalog: Catalog,
    *,
    allow_bare_wildcard: bool = False,
) -> MatchSet:
    """Expansion of ``action`` minus the union of the NotAction expansions."""
    granted = expand(action, catalog, allow_bare_wildcard=allow_bare_wildcard)
    removed: set[str] = set()
    for n in not_actions:
        hit = expand(n, catalog, allow_bare_wildcard=allow_bare_wildcard)
        if not hit.members:
            log.info("NotAction %s matches nothing in the catalog", hit.pattern.raw)
        removed.update(m.raw for m in hit.members)
    return MatchSet(granted.pattern, tuple(m for m in granted.members if m.raw not in removed))


def dead_not_actions(
    not_actions: Iterable[PatternLike], catalog: Catalog, *, allow_bare_wildcard: bool = False
) -> list[str]:
    """NotActions that match no catalog action (often a typo)."""
    return [
        hit.pattern.raw
        for hit in (expand(n, catalog, allow_bare_wildcard=allow_bare_wildcard) for n in not_actions)
        if not hit.members
    ]
