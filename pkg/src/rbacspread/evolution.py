"""Per-action genetic search for wildcard placements with the widest reach.

Each origin action gets its own population of wildcard candidates.  The
fitness ``weight * D - x`` is minimized, where ``D`` is the diameter of the
candidate's expansion and ``x`` is the offset of its ``*``: a small diameter
dominates, and among equal diameters the rightmost wildcard wins.
"""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, field
from fractions import Fraction
from typing import IO, Iterable, Iterator, Optional, Sequence

from . import generator
from .catalog import ActionPath, Catalog, catalog_from_actions
from .expansion import expand
from .generator import GACandidate, Unsatisfiable
from .metric import diameter

log = logging.getLogger(__name__)

MAX_REMUTATIONS = 20
CSV_FIELDS = ("pattern", "left", "right", "diameter", "origin", "generation_found")


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 40
    generations: int = 10
    survivor_fraction: Fraction = Fraction(1, 2)
    mutation_max_offset: int = 4
    master_seed: int = 0
    fitness_weight: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "survivor_fraction", Fraction(self.survivor_fraction))
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if not 0 < self.survivor_fraction < 1:
            raise ValueError("survivor_fraction must be in (0, 1)")
        if self.mutation_max_offset < 1:
            raise ValueError("mutation_max_offset must be at least 1")
        if self.generations < 0:
            raise ValueError("generations must be non-negative")

    @property
    def survivors(self) -> int:
        return math.ceil(self.survivor_fraction * self.population_size)


@dataclass(frozen=True)
class FitnessScore:
    diameter: int
    wildcard_pos: int
    value: int
    expansion_size: int
    witness: tuple[str, str]


@dataclass(frozen=True, order=True)
class ExtremePairRecord:
    pattern: str
    left: str
    right: str
    diameter: int
    origin: str
    generation_found: int

    def sort_key(self):
        return (self.origin, self.pattern, self.left, self.right)


@dataclass
class OriginRun:
    origin: ActionPath
    records: list[ExtremePairRecord]
    best_trace: list[Optional[int]] = field(default_factory=list)
    population_sizes: list[int] = field(default_factory=list)
    population: list[GACandidate] = field(default_factory=list)


def origin_seed(master_seed: int, raw: str) -> int:
    """Stable 64-bit seed for one origin, independent of scheduling."""
    h = hashlib.blake2b(f"{master_seed}\x00{raw}".encode("utf-8"), digest_size=8)
    return int.from_bytes(h.digest(), "big")


def evaluate(
    cand: GACandidate,
    catalog: Catalog,
    cfg: GAConfig = GAConfig(),
    cache: Optional[dict] = None,
) -> Optional[FitnessScore]:
    """Fitness of a candidate, or None when its expansion has fewer than 2 actions."""
    key = cand.pattern.raw
    if cache is not None and key in cache:
        return cache[key]
    members = expand(cand.pattern, catalog).members
    score = None
    if len(members) >= 2:
        diam = diameter(members)
        x = cand.pattern.wildcard_index
        left, right = diam.witness
        score = FitnessScore(diam.value, x, cfg.fitness_weight * diam.value - x, len(members), (left.raw, right.raw))
    if cache is not None:
        cache[key] = score
    return score


def rank_key(cand: GACandidate):
    if cand.fitness is None:
        return (1, 0, cand.pattern.raw)
    return (0, cand.fitness.value, cand.pattern.raw)


def _mutate(parent: GACandidate, cfg: GAConfig, rng: random.Random, generation: int) -> GACandidate:
    n = len(parent.origin.raw)
    offsets = [d for d in range(-cfg.mutation_max_offset, cfg.mutation_max_offset + 1) if d]
    for _ in range(MAX_REMUTATIONS):
        first, last = parent.first, parent.last
        if rng.random() < 0.5:
            first += rng.choice(offsets)
        else:
            last += rng.choice(offsets)
        if 0 <= first <= last < n and generator.check_interval(parent.origin, first, last) is None:
            return generator.insert_wildcard(parent.origin, first, last, born=generation)
    return parent


def step_generation(
    population: Sequence[GACandidate],
    cfg: GAConfig,
    catalog: Catalog,
    rng: random.Random,
    generation: int = 1,
    cache: Optional[dict] = None,
) -> list[GACandidate]:
    """Select the top fraction, then refill by mutating clones of survivors."""
    ranked = sorted(population, key=rank_key)
    survivors = ranked[: cfg.survivors]
    children = []
    while len(survivors) + len(children) < cfg.population_size:
        parent = rng.choice(survivors)
        child = _mutate(parent, cfg, rng, generation)
        if child is not parent:
            child = child.with_fitness(evaluate(child, catalog, cfg, cache))
        children.append(child)
    return survivors + children


def best_candidates(population: Iterable[GACandidate]) -> list[GACandidate]:
    """All fit candidates tied at the minimum fitness, one per pattern."""
    fit = [c for c in population if c.fitness is not None]
    if not fit:
        return []
    best = min(c.fitness.value for c in fit)
    by_pattern: dict[str, GACandidate] = {}
    for c in sorted(fit, key=lambda c: (c.pattern.raw, c.born)):
        if c.fitness.value == best:
            by_pattern.setdefault(c.pattern.raw, c)
    return list(by_pattern.values())


def run_origin(origin: ActionPath, cfg: GAConfig, catalog: Catalog) -> OriginRun:
    """Evolve one origin and keep the per-generation trace."""
    rng = random.Random(origin_seed(cfg.master_seed, origin.raw))
    cache: dict = {}
    run = OriginRun(origin, [])
    try:
        population = [generator.random_candidate(origin, rng) for _ in range(cfg.population_size)]
    except Unsatisfiable:
        log.info("skipping %s: no valid wildcard insertion", origin.raw)
        return run
    population = [c.with_fitness(evaluate(c, catalog, cfg, cache)) for c in population]

    def record(pop):
        run.population_sizes.append(len(pop))
        values = [c.fitness.value for c in pop if c.fitness is not None]
        run.best_trace.append(min(values) if values else None)

    record(population)
    for g in range(1, cfg.generations + 1):
        population = step_generation(population, cfg, catalog, rng, g, cache)
        record(population)

    run.population = population
    for cand in best_candidates(population):
        left, right = cand.fitness.witness
        run.records.append(
            ExtremePairRecord(cand.pattern.raw, left, right, cand.fitness.diameter, origin.raw, cand.born)
        )
    return run


def evolve_origin(origin: ActionPath, cfg: GAConfig, catalog: Catalog) -> list[ExtremePairRecord]:
    return run_origin(origin, cfg, catalog).records


_worker_catalog: Optional[Catalog] = None


def _init_worker(raws: list[str]) -> None:
    global _worker_catalog
    _worker_catalog = catalog_from_actions(raws)


def _worker_run(args):
    raw, cfg = args
    return raw, evolve_origin(_worker_catalog[raw], cfg, _worker_catalog)


def iter_origin_results(
    cfg: GAConfig,
    catalog: Catalog,
    origins: Optional[Iterable[str]] = None,
    jobs: int = 1,
) -> Iterator[tuple[str, list[ExtremePairRecord]]]:
    """Yield ``(origin, records)`` in origin order, optionally across processes."""
    if catalog.raws and max(len(r) for r in catalog.raws) >= cfg.fitness_weight:
        raise ValueError("fitness_weight must exceed the longest action for diameter to dominate")
    todo = list(catalog.raws if origins is None else origins)
    if jobs <= 1:
        for raw in todo:
            yield raw, evolve_origin(catalog[raw], cfg, catalog)
        return
    with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(catalog.raws,)) as pool:
        yield from pool.map(_worker_run, [(raw, cfg) for raw in todo], chunksize=8)


def evolve_all(cfg: GAConfig, catalog: Catalog, jobs: int = 1) -> Iterator[ExtremePairRecord]:
    for _, records in iter_origin_results(cfg, catalog, jobs=jobs):
        yield from records


def canonical_order(records: Iterable[ExtremePairRecord]) -> list[ExtremePairRecord]:
    return sorted(records, key=ExtremePairRecord.sort_key)


def write_records(records: Iterable[ExtremePairRecord], fh: IO[str], header: bool = True) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    if header:
        writer.writerow(CSV_FIELDS)
    for r in records:
        writer.writerow(astuple(r))


def read_records(fh: IO[str]) -> list[ExtremePairRecord]:
    reader = csv.DictReader(fh)
    missing = set(CSV_FIELDS) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"pairs CSV is missing columns: {sorted(missing)}")
    out = []
    for row in reader:
        out.append(
            ExtremePairRecord(
                row["pattern"], row["left"], row["right"], int(row["diameter"]),
                row["origin"], int(row["generation_found"]),
            )
        )
    return out


def records_to_csv(records: Iterable[ExtremePairRecord]) -> str:
    buf = io.StringIO()
    write_records(records, buf)
    return buf.getvalue()

