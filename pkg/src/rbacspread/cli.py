"""Command-line entry point.

Data goes to stdout, one item per line or as CSV; diagnostics go to stderr.
Exit codes: 0 success, 1 domain error (rejected pattern, unknown action),
2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import logging
import os
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, evolution, generator, grammar, stats
from .catalog import AZ_PROVIDER_JSON, PLAINTEXT, Catalog, CatalogError, load_catalog_file, load_sample_catalog
from .expansion import dead_not_actions, effective_set, expand
from .metric import MetricError, diameter, distance

CATALOG_ENV = "RBACSPREAD_CATALOG"
DEFAULT_CATALOG = "actions.txt"
SAMPLE = "@sample"

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("rbacspread")


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _open_catalog(args) -> Catalog:
    path = args.catalog or os.environ.get(CATALOG_ENV) or DEFAULT_CATALOG
    try:
        if path == SAMPLE:
            return load_sample_catalog()
        fmt = args.catalog_format
        return load_catalog_file(path, None if fmt == "auto" else fmt)
    except CatalogError as exc:
        raise UsageError(str(exc)) from exc


def _pattern(text: str, allow_bare: bool = False) -> grammar.WildcardPattern:
    report = grammar.parse(text, allow_bare_wildcard=allow_bare)
    if not report.accepted:
        for v in report.violations:
            _err(grammar.caret_message(text, v))
        raise DomainError(f"invalid pattern {text!r}")
    return report.pattern


def _explicit_action(catalog: Catalog, text: str):
    p = _pattern(text)
    if not p.explicit:
        raise DomainError(f"expected an explicit action, got wildcard pattern {text!r}")
    action = catalog.get(p.raw)
    if action is None:
        raise DomainError(f"unknown action {p.raw!r}")
    return action


def _split_csv(values: Sequence[str]) -> list[str]:
    out = []
    for value in values:
        out.extend(part.strip() for part in value.split(",") if part.strip())
    return out


def _read_lines(path: str) -> list[str]:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text("utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]


def cmd_validate(args) -> int:
    status = EXIT_OK
    for text in args.patterns:
        report = grammar.parse(text, allow_bare_wildcard=args.allow_bare_wildcard)
        if report.accepted:
            p = report.pattern
            kind = "explicit" if p.explicit else f"wildcard@{p.wildcard_index}"
            print(f"ok\t{p.raw}\t{kind}")
        else:
            status = EXIT_DOMAIN
            print(f"rejected\t{text}\t{','.join(v.rule_id for v in report.violations)}")
            for v in report.violations:
                _err(grammar.caret_message(text, v))
    return status


def cmd_expand(args) -> int:
    catalog = _open_catalog(args)
    match = expand(_pattern(args.pattern, args.allow_bare_wildcard), catalog)
    for raw in match.raws:
        print(raw)
    _err(f"{len(match)} action(s) matched")
    return EXIT_OK


def cmd_effective(args) -> int:
    catalog = _open_catalog(args)
    action = _pattern(args.action, args.allow_bare_wildcard)
    texts = _split_csv(args.not_actions or [])
    if args.not_actions_file:
        texts.extend(_read_lines(args.not_actions_file))
    not_actions = [_pattern(t, args.allow_bare_wildcard) for t in texts]
    result = effective_set(action, not_actions, catalog)
    for raw in result.raws:
        print(raw)
    granted = len(expand(action, catalog))
    _err(f"{len(result)} effective action(s) ({granted} granted, {granted - len(result)} removed)")
    for dead in dead_not_actions(not_actions, catalog):
        _err(f"warning: NotAction {dead} matches nothing")
    return EXIT_OK


def cmd_distance(args) -> int:
    catalog = _open_catalog(args)
    u = _explicit_action(catalog, args.u)
    v = _explicit_action(catalog, args.v)
    if u.raw == v.raw:
        raise UsageError("distance needs two distinct actions")
    result = distance(u, v, catalog.tree)
    print(f"{result.distance} {result.lca_path}")
    return EXIT_OK


def cmd_diameter(args) -> int:
    catalog = _open_catalog(args)
    members = [_explicit_action(catalog, t) for t in _read_lines(args.actions_file)]
    result = diameter(members, catalog.tree)
    if not result.defined:
        print("undefined")
        _err("diameter needs at least two distinct actions")
        return EXIT_OK
    left, right = result.witness
    print(f"{result.value} {left.raw} {right.raw}")
    return EXIT_OK


def cmd_generate(args) -> int:
    catalog = _open_catalog(args)
    origins = [_explicit_action(catalog, o) for o in args.origin] if args.origin else list(catalog)
    import csv

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["origin", "pattern", "first", "last"])
    skipped = 0
    for origin in origins:
        rng = random.Random(evolution.origin_seed(args.seed, origin.raw))
        for _ in range(args.count):
            try:
                cand = generator.random_candidate(origin, rng)
            except generator.Unsatisfiable:
                skipped += 1
                break
            writer.writerow([origin.raw, cand.pattern.raw, cand.first, cand.last])
    if skipped:
        _err(f"{skipped} origin(s) admit no valid wildcard insertion")
    return EXIT_OK


def cmd_evolve(args) -> int:
    catalog = _open_catalog(args)
    try:
        cfg = evolution.GAConfig(
            population_size=args.population,
            generations=args.generations,
            survivor_fraction=Fraction(args.survivors),
            mutation_max_offset=args.mutation_offset,
            master_seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    origins = [_explicit_action(catalog, o).raw for o in args.origin] if args.origin else list(catalog.raws)
    if args.limit is not None:
        origins = origins[: args.limit]

    if args.out is None:
        if args.resume:
            raise UsageError("--resume needs --out")
        records = []
        for _, recs in evolution.iter_origin_results(cfg, catalog, origins, jobs=args.jobs):
            records.extend(recs)
        evolution.write_records(evolution.canonical_order(records), sys.stdout)
        _err(f"{len(records)} record(s) from {len(origins)} origin(s)")
        return EXIT_OK

    out = Path(args.out)
    checkpoint = Path(args.checkpoint or f"{args.out}.checkpoint")
    done: set[str] = set()
    records: list[evolution.ExtremePairRecord] = []
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        checkpoint.parent.mkdir(parents=True, exist_ok=True)
        if args.resume and checkpoint.exists():
            done = {ln.strip() for ln in checkpoint.read_text("utf-8").splitlines() if ln.strip()}
            if out.exists():
                with out.open(encoding="utf-8") as fh:
                    records = [r for r in evolution.read_records(fh) if r.origin in done]
        else:
            checkpoint.write_text("", encoding="utf-8")
        todo = [o for o in origins if o not in done]
        _err(f"evolving {len(todo)} origin(s), {len(done)} already done")
        with out.open("w", encoding="utf-8") as fh, checkpoint.open("a", encoding="utf-8") as ck:
            evolution.write_records(records, fh)
            fh.flush()
            for raw, recs in evolution.iter_origin_results(cfg, catalog, todo, jobs=args.jobs):
                evolution.write_records(recs, fh, header=False)
                fh.flush()
                ck.write(raw + "\n")
                ck.flush()
                records.extend(recs)
        with out.open("w", encoding="utf-8") as fh:
            evolution.write_records(evolution.canonical_order(records), fh)
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    _err(f"{len(records)} record(s) written to {out}")
    return EXIT_OK


def cmd_stats(args) -> int:
    try:
        with open(args.pairs, encoding="utf-8") as fh:
            records = evolution.read_records(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read pairs {args.pairs}: {exc}") from exc
    hist = stats.histogram(records)
    if hist.total == 0:
        raise DomainError("no records in pairs file")
    sys.stdout.write(stats.histogram_csv(hist))
    median = stats.interpolated_median(hist)
    _err(f"records: {hist.total}  interpolated median diameter: {float(median):.2f}")
    if args.plot:
        try:
            Path(args.plot).write_bytes(stats.emit_plot_data(hist, "svg_bars"))
        except OSError as exc:
            raise UsageError(str(exc)) from exc
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rbacspread", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--catalog",
        help=f"catalog file (default: ${CATALOG_ENV} or ./{DEFAULT_CATALOG}; '{SAMPLE}' for the bundled sample)",
    )
    common.add_argument("--catalog-format", choices=["auto", PLAINTEXT, AZ_PROVIDER_JSON], default="auto")
    bare = argparse.ArgumentParser(add_help=False)
    bare.add_argument("--allow-bare-wildcard", action="store_true", help="accept '*' as a pattern")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[bare], help="parse patterns and report rule violations")
    p.add_argument("patterns", nargs="+")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("expand", parents=[common, bare], help="list catalog actions matched by a pattern")
    p.add_argument("pattern")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("effective", parents=[common, bare], help="effective permission set of an Action")
    p.add_argument("--action", required=True)
    p.add_argument("--notActions", "--not-actions", dest="not_actions", action="append",
                   help="comma-separated NotActions; repeatable")
    p.add_argument("--not-actions-file", help="file with one NotAction per line")
    p.set_defaults(func=cmd_effective)

    p = sub.add_parser("distance", parents=[common], help="LCA depth of two explicit actions")
    p.add_argument("u")
    p.add_argument("v")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("diameter", parents=[common], help="min pairwise distance of an action list")
    p.add_argument("actions_file", help="one explicit action per line, '-' for stdin")
    p.set_defaults(func=cmd_diameter)

    p = sub.add_parser("generate", parents=[common], help="random wildcard candidates as CSV")
    p.add_argument("--origin", action="append", help="restrict to these actions (repeatable)")
    p.add_argument("--count", type=int, default=1, help="candidates per origin")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evolve", parents=[common], help="genetic search for extreme wildcard pairs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--population", type=int, default=40)
    p.add_argument("--generations", type=int, default=10)
    p.add_argument("--survivors", default="1/2", help="survivor fraction, e.g. 1/2 or 0.5")
    p.add_argument("--mutation-offset", type=int, default=4)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="pairs CSV; enables checkpointing")
    p.add_argument("--checkpoint", help="checkpoint file (default: OUT.checkpoint)")
    p.add_argument("--resume", action="store_true", help="skip origins listed in the checkpoint")
    p.add_argument("--origin", action="append", help="restrict to these actions (repeatable)")
    p.add_argument("--limit", type=int, help="only the first N origins")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("stats", help="diameter histogram and interpolated median of a pairs CSV")
    p.add_argument("--pairs", required=True)
    p.add_argument("--plot", help="write an SVG bar chart here")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DomainError as exc:
        _err(f"error: {exc}")
        return EXIT_DOMAIN
    except (UsageError, MetricError) as exc:
        _err(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
