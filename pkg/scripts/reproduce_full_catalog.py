#!/usr/bin/env python3
"""Long-run reproduction over a complete Azure action catalog.

Supply the catalog (plain text, one action per line, or the JSON from
``az provider operation list``). The run checkpoints after every origin and
can be resumed with --resume. When it finishes, the diameter-1 share is
compared with a reference share (default 50%) at +/-10 percentage points.
Expect several hours single-threaded; use --jobs to fan out.
"""

import argparse
import sys

from rbacspread import cli
from rbacspread.evolution import read_records
from rbacspread.stats import histogram, interpolated_median

REFERENCE_SHARE = 50.0
TOLERANCE = 10.0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("catalog")
    ap.add_argument("--out", default="runs/full/pairs.csv")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--resume", action="store_true")
    ap.add_argument("--reference-share", type=float, default=REFERENCE_SHARE)
    args = ap.parse_args(argv)

    evolve = ["evolve", "--catalog", args.catalog, "--seed", str(args.seed), "--jobs", str(args.jobs),
              "--out", args.out]
    if args.resume:
        evolve.append("--resume")
    code = cli.main(evolve)
    if code:
        return code

    with open(args.out, newline="") as fh:
        h = histogram(read_records(fh))
    if not h.total:
        print("no records produced", file=sys.stderr)
        return 1
    share = float(h.percentages().get(1, 0))
    print(f"records: {h.total}")
    print(f"largest diameter: {max(h.bins)}")
    print(f"diameter-1 share: {share:.2f}% (reference {args.reference_share:.0f}% +/- {TOLERANCE:.0f})")
    print(f"interpolated median: {float(interpolated_median(h)):.4f}")
    ok = abs(share - args.reference_share) <= TOLERANCE
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
