"""Wildcard candidates made by replacing a character run of an action with '*'.

Intervals are ``(first, last)`` with both offsets 0-based and inclusive:
``origin.raw[first:last + 1]`` is the replaced run.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Optional

from . import grammar
from .catalog import ActionPath

if TYPE_CHECKING:
    from .evolution import FitnessScore

C1 = "C1"  # wildcard starts fewer than 3 characters after the provider dot
C2 = "C2"  # wildcard splits the verb segment without replacing it

MAX_ATTEMPTS = 200
MIN_CHARS_AFTER_DOT = 3


class InsertionError(ValueError):
    def __init__(self, constraint: str, message: str):
        super().__init__(f"{constraint}: {message}")
        self.constraint = constraint


class Unsatisfiable(ValueError):
    """The origin admits no valid wildcard insertion."""


@dataclass(frozen=True)
class GACandidate:
    origin: ActionPath
    first: int
    last: int
    pattern: grammar.WildcardPattern
    fitness: Optional["FitnessScore"] = field(default=None, compare=False)
    born: int = field(default=0, compare=False)

    @property
    def text(self) -> str:
        return self.pattern.raw

    def with_fitness(self, fitness: Optional["FitnessScore"]) -> "GACandidate":
        return replace(self, fitness=fitness)


def _min_first(raw: str) -> Optional[int]:
    dot = raw.find(".")
    if dot < 0:
        return None
    return dot + MIN_CHARS_AFTER_DOT + 1


def check_interval(origin: ActionPath, first: int, last: int) -> Optional[str]:
    """Return the violated constraint id, or None when the interval is valid."""
    raw = origin.raw
    n = len(raw)
    if not (0 <= first <= last < n):
        raise IndexError(f"interval ({first}, {last}) out of bounds for length {n}")
    lo = _min_first(raw)
    if lo is None or first < lo:
        return C1
    verb_start = raw.rfind("/") + 1
    end = last + 1
    if not ((end == n and first <= verb_start) or end <= verb_start):
        return C2
    report = grammar.parse(raw[:first] + "*" + raw[end:])
    if not report.accepted:
        return report.violations[0].rule_id
    return None


def insert_wildcard(origin: ActionPath, first: int, last: int, born: int = 0) -> GACandidate:
    violation = check_interval(origin, first, last)
    if violation is not None:
        raise InsertionError(violation, f"cannot replace [{first}, {last}] of {origin.raw}")
    raw = origin.raw
    pattern = grammar.parse_pattern(raw[:first] + "*" + raw[last + 1:])
    return GACandidate(origin, first, last, pattern, born=born)


def enumerate_valid_intervals(origin: ActionPath) -> list[tuple[int, int]]:
    n = len(origin.raw)
    return [
        (first, last)
        for first in range(n)
        for last in range(first, n)
        if check_interval(origin, first, last) is None
    ]


def random_candidate(origin: ActionPath, rng: random.Random, max_attempts: int = MAX_ATTEMPTS) -> GACandidate:
    """Draw a valid interval uniformly by rejection sampling.

    After ``max_attempts`` misses, falls back to a uniform pick from the
    exhaustive interval list.  Raises Unsatisfiable if that list is empty.
    """
    n = len(origin.raw)
    for _ in range(max_attempts):
        first, last = rng.randrange(n), rng.randrange(n)
        if first <= last and check_interval(origin, first, last) is None:
            return insert_wildcard(origin, first, last)
    valid = enumerate_valid_intervals(origin)
    if not valid:
        raise Unsatisfiable(f"no valid wildcard insertion for {origin.raw}")
    return insert_wildcard(origin, *rng.choice(valid))
