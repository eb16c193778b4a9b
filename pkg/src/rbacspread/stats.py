"""Diameter distribution of extreme-pair runs and its interpolated median."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union
from xml.sax.saxutils import escape

from .evolution import ExtremePairRecord


@dataclass
class DiameterHistogram:
    bins: dict[int, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.bins.values())

    def merge(self, other: "DiameterHistogram") -> "DiameterHistogram":
        merged = Counter(self.bins)
        merged.update(other.bins)
        return DiameterHistogram(dict(sorted(merged.items())))

    def percentages(self) -> dict[int, Fraction]:
        total = self.total
        return {d: Fraction(100 * c, total) for d, c in sorted(self.bins.items())}


def histogram(records: Iterable[Union[ExtremePairRecord, int]]) -> DiameterHistogram:
    counts = Counter(r if isinstance(r, int) else r.diameter for r in records)
    return DiameterHistogram(dict(sorted(counts.items())))


def interpolated_median(h: DiameterHistogram) -> Fraction:
    """Median by linear interpolation on the cumulative percentage curve.

    The curve starts from a virtual point ``(d_min - 1, 0%)`` so that a
    first bin already holding more than half the mass still interpolates.
    """
    if h.total <= 0:
        raise ValueError("median of an empty histogram")
    points = [(min(h.bins) - 1, Fraction(0))]
    cum = Fraction(0)
    for d, pct in h.percentages().items():
        cum += pct
        points.append((d, cum))
    for (d_a, c_a), (d_b, c_b) in zip(points, points[1:]):
        if c_a < 50 <= c_b:
            return d_a + (50 - c_a) / (c_b - c_a) * (d_b - d_a)
    raise AssertionError("cumulative distribution never reaches 50%")


def histogram_csv(h: DiameterHistogram) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["diameter", "count", "percent"])
    pct = h.percentages()
    for d, c in sorted(h.bins.items()):
        w.writerow([d, c, f"{float(pct[d]):.2f}"])
    return buf.getvalue()


def parse_histogram_csv(text: str) -> DiameterHistogram:
    rows = csv.DictReader(io.StringIO(text))
    return DiameterHistogram({int(r["diameter"]): int(r["count"]) for r in rows})


def histogram_svg(h: DiameterHistogram, title: str = "Distribution of diameters") -> str:
    width, height = 480, 320
    left, right, top, bottom = 60, 20, 40, 50
    plot_w, plot_h = width - left - right, height - top - bottom
    items = sorted(h.bins.items())
    peak = max(c for _, c in items)
    slot = plot_w / len(items)
    bar_w = slot * 0.7
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
    ]
    for i, (d, c) in enumerate(items):
        bh = plot_h * c / peak
        x = left + i * slot + (slot - bar_w) / 2
        y = top + plot_h - bh
        out.append(
            f'<rect x="{x:.1f}" y="{y:.1f}" width="{bar_w:.1f}" height="{bh:.1f}" fill="#4a78b5">'
            f"<title>diameter {d}: {c}</title></rect>"
        )
        out.append(f'<text x="{x + bar_w / 2:.1f}" y="{top + plot_h + 16}" text-anchor="middle">{d}</text>')
        out.append(f'<text x="{x + bar_w / 2:.1f}" y="{y - 4:.1f}" text-anchor="middle">{c}</text>')
    out.append(f'<text x="{left + plot_w / 2:.1f}" y="{height - 12}" text-anchor="middle">diameter</text>')
    out.append(
        f'<text x="16" y="{top + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + plot_h / 2:.1f})">count</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot_data(h: DiameterHistogram, format: str = "csv") -> bytes:
    if h.total <= 0:
        raise ValueError("nothing to plot")
    if format == "csv":
        return histogram_csv(h).encode("utf-8")
    if format == "svg_bars":
        return histogram_svg(h).encode("utf-8")
    raise ValueError(f"unknown plot format {format!r}")
