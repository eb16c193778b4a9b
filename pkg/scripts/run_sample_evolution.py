#!/usr/bin/env python3
"""Evolve wildcard candidates for every action in the bundled sample catalog.

Writes the extreme-pair CSV, the diameter histogram and an SVG bar chart to
an output directory, then prints a short summary.
"""

import argparse
import sys
import time
from pathlib import Path

from rbacspread.catalog import load_sample_catalog
from rbacspread.evolution import GAConfig, canonical_order, evolve_all, records_to_csv
from rbacspread.stats import emit_plot_data, histogram, interpolated_median


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out-dir", type=Path, default=Path("runs/sample"))
    args = ap.parse_args(argv)

    catalog = load_sample_catalog()
    cfg = GAConfig(master_seed=args.seed)
    t0 = time.perf_counter()
    records = canonical_order(evolve_all(cfg, catalog, jobs=args.jobs))
    elapsed = time.perf_counter() - t0

    args.out_dir.mkdir(parents=True, exist_ok=True)
    (args.out_dir / "pairs.csv").write_text(records_to_csv(records))
    h = histogram(records)
    (args.out_dir / "diameters.csv").write_bytes(emit_plot_data(h, "csv"))
    (args.out_dir / "diameters.svg").write_bytes(emit_plot_data(h, "svg_bars"))

    print(f"{len(catalog)} origins, {len(records)} records in {elapsed:.1f}s", file=sys.stderr)
    for d, pct in sorted(h.percentages().items()):
        print(f"  diameter {d}: {h.bins[d]:5d}  {float(pct):6.2f}%")
    if h.total:
        print(f"interpolated median: {float(interpolated_median(h)):.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
