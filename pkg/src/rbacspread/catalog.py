"""Loading and normalizing the universe of explicit Azure actions."""

from __future__ import annotations

import hashlib
import io
import json
import logging
import os
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import IO, TYPE_CHECKING, Iterable, Iterator, Optional, Union

from . import grammar

if TYPE_CHECKING:
    from .metric import HierarchyTree

log = logging.getLogger(__name__)

PLAINTEXT = "plaintext"
AZ_PROVIDER_JSON = "az_provider_json"
FORMATS = (PLAINTEXT, AZ_PROVIDER_JSON)

# fitness = weight * diameter - wildcard offset only orders by diameter first
# when every action is shorter than the weight
MAX_ACTION_LENGTH = 999

_SPLIT = re.compile(r"([/.])")


class CatalogError(Exception):
    pass


@dataclass(frozen=True)
class ActionPath:
    """A wildcard-free action split into tree segments on both '/' and '.'."""

    raw: str
    segments: tuple[str, ...]
    separators: tuple[str, ...]

    @classmethod
    def from_raw(cls, raw: str) -> "ActionPath":
        raw = raw.strip().lower()
        if not raw or "*" in raw:
            raise ValueError(f"not an explicit action: {raw!r}")
        parts = _SPLIT.split(raw)
        segments = tuple(parts[0::2])
        if any(not s for s in segments):
            raise ValueError(f"empty segment in {raw!r}")
        return cls(raw, segments, tuple(parts[1::2]))

    @property
    def verb(self) -> str:
        return self.raw.rsplit("/", 1)[-1]

    @property
    def depth(self) -> int:
        return len(self.segments)

    @property
    def provider(self) -> str:
        """First two dot-segments of the first slash-segment, e.g. ``microsoft.aad``."""
        return ".".join(self.raw.split("/", 1)[0].split(".")[:2])

    def prefix_path(self, k: int) -> str:
        """The raw text spanned by the first ``k`` segments."""
        if k <= 0:
            return ""
        out = [self.segments[0]]
        for sep, seg in zip(self.separators[: k - 1], self.segments[1:k]):
            out.append(sep)
            out.append(seg)
        return "".join(out)

    def __str__(self) -> str:
        return self.raw

    def __lt__(self, other: "ActionPath") -> bool:
        return self.raw < other.raw


@dataclass(frozen=True)
class Catalog:
    actions: tuple[ActionPath, ...]
    tree: "HierarchyTree" = field(repr=False, compare=False)
    source_digest: str = ""
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_raw", {a.raw: a for a in self.actions})
        object.__setattr__(self, "raws", [a.raw for a in self.actions])

    def __len__(self) -> int:
        return len(self.actions)

    def __iter__(self) -> Iterator[ActionPath]:
        return iter(self.actions)

    def __contains__(self, item) -> bool:
        key = item.raw if isinstance(item, ActionPath) else str(item).strip().lower()
        return key in self._by_raw

    def get(self, raw: str) -> Optional[ActionPath]:
        return self._by_raw.get(raw.strip().lower())

    def __getitem__(self, raw: str) -> ActionPath:
        action = self.get(raw)
        if action is None:
            raise KeyError(raw)
        return action


@dataclass(frozen=True)
class CatalogSummary:
    total: int
    providers: int
    verbs: dict[str, int]
    max_depth: int


def _read_bytes(source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, (str, os.PathLike)):
        try:
            with open(source, "rb") as fh:
                return fh.read()
        except OSError as exc:
            raise CatalogError(f"cannot read catalog {source}: {exc}") from exc
    try:
        data = source.read()
    except (OSError, ValueError) as exc:
        raise CatalogError(f"cannot read catalog: {exc}") from exc
    return data.encode("utf-8") if isinstance(data, str) else data


def _plaintext_entries(text: str) -> list[str]:
    entries = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.append(line)
    return entries


def _harvest_operation_names(node, out: list[str], in_operations: bool = False) -> None:
    if isinstance(node, list):
        for item in node:
            _harvest_operation_names(item, out, in_operations)
    elif isinstance(node, dict):
        if in_operations and isinstance(node.get("name"), str) and not node.get("isDataAction", False):
            out.append(node["name"])
        for key, value in node.items():
            if isinstance(value, (list, dict)):
                _harvest_operation_names(value, out, key == "operations")


def _json_entries(text: str) -> list[str]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"malformed provider-operations JSON: {exc}") from exc
    names: list[str] = []
    _harvest_operation_names(doc, names)
    return names


def load_catalog(source: Union[bytes, IO, str, os.PathLike], format: str = PLAINTEXT) -> Catalog:
    """Read, normalize, deduplicate and index a catalog of explicit actions.

    ``source`` is a byte string, a binary file object or a path.  Entries
    with an unrecognized verb are kept and flagged in ``warnings``; entries
    containing ``*`` or failing the grammar are dropped with a warning.
    """
    from .metric import build_tree

    if format not in FORMATS:
        raise CatalogError(f"unknown catalog format {format!r}")
    data = _read_bytes(source)
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise CatalogError(f"catalog is not UTF-8: {exc}") from exc

    entries = _plaintext_entries(text) if format == PLAINTEXT else _json_entries(text)

    warnings: list[str] = []
    seen: dict[str, ActionPath] = {}
    for entry in entries:
        entry = entry.strip()
        if not entry:
            continue
        if "*" in entry:
            warnings.append(f"wildcard in catalog entry: {entry}")
            continue
        report = grammar.parse(entry, check_verb=False)
        if not report.accepted:
            ids = ",".join(sorted(report.rule_ids))
            warnings.append(f"rejected catalog entry ({ids}): {entry}")
            continue
        raw = report.pattern.raw
        if len(raw) > MAX_ACTION_LENGTH:
            warnings.append(f"catalog entry longer than {MAX_ACTION_LENGTH} characters: {entry[:60]}...")
            continue
        if raw in seen:
            warnings.append(f"duplicate catalog entry: {entry}")
            continue
        action = ActionPath.from_raw(raw)
        if action.verb not in grammar.VERBS:
            warnings.append(f"unrecognized verb {action.verb!r}: {raw}")
        seen[raw] = action

    if not seen:
        raise CatalogError("catalog is empty after filtering")

    actions = tuple(sorted(seen.values(), key=lambda a: a.raw))
    digest = hashlib.sha256("\n".join(a.raw for a in actions).encode()).hexdigest()
    for w in warnings:
        log.debug("catalog: %s", w)
    return Catalog(actions, build_tree(actions), digest, tuple(warnings))


def load_catalog_file(path: Union[str, os.PathLike], format: Optional[str] = None) -> Catalog:
    """Load from a path, inferring the JSON format from a ``.json`` suffix."""
    if format is None:
        format = AZ_PROVIDER_JSON if str(path).lower().endswith(".json") else PLAINTEXT
    return load_catalog(path, format)


def catalog_from_actions(actions: Iterable[str]) -> Catalog:
    """Build a catalog from in-memory action strings (plaintext semantics)."""
    return load_catalog("\n".join(actions).encode("utf-8"))


def serialize(catalog: Catalog) -> bytes:
    return "".join(a.raw + "\n" for a in catalog.actions).encode("utf-8")


def catalog_stats(catalog: Catalog) -> CatalogSummary:
    verbs = Counter(a.verb for a in catalog.actions)
    return CatalogSummary(
        total=len(catalog.actions),
        providers=len({a.provider for a in catalog.actions}),
        verbs=dict(sorted(verbs.items())),
        max_depth=max((a.depth for a in catalog.actions), default=0),
    )


def sample_catalog_text() -> str:
    return resources.files("rbacspread").joinpath("data/sample_actions.txt").read_text("utf-8")


def load_sample_catalog() -> Catalog:
    """The bundled desk-scale catalog (~500 actions)."""
    return load_catalog(io.BytesIO(sample_catalog_text().encode("utf-8")))
