"""Bare-bones SVG line plots (polylines and a frame), no renderer needed."""
from __future__ import annotations

import math

WIDTH, HEIGHT, PAD = 640, 400, 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def svg_lines(series: dict, xlabel: str = "", ylabel: str = "", title: str = "") -> str:
    """Render ``{label: (xs, ys)}`` as an SVG document string."""
    pts = [(x, y) for xs, ys in series.values() for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
    if not pts:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    else:
        x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
        y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x):
        return PAD + (x - x0) / (x1 - x0) * (WIDTH - 2 * PAD)

    def sy(y):
        return HEIGHT - PAD - (y - y0) / (y1 - y0) * (HEIGHT - 2 * PAD)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}">',
        f'<rect x="{PAD}" y="{PAD}" width="{WIDTH - 2 * PAD}" height="{HEIGHT - 2 * PAD}" fill="none" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{PAD / 2}" text-anchor="middle">{title}</text>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 10}" text-anchor="middle">{xlabel}</text>',
        f'<text x="12" y="{HEIGHT / 2}" transform="rotate(-90 12 {HEIGHT / 2})" text-anchor="middle">{ylabel}</text>',
        f'<text x="{PAD}" y="{HEIGHT - PAD + 15}" text-anchor="middle">{_fmt(x0)}</text>',
        f'<text x="{WIDTH - PAD}" y="{HEIGHT - PAD + 15}" text-anchor="middle">{_fmt(x1)}</text>',
        f'<text x="{PAD - 5}" y="{HEIGHT - PAD}" text-anchor="end">{_fmt(y0)}</text>',
        f'<text x="{PAD - 5}" y="{PAD + 5}" text-anchor="end">{_fmt(y1)}</text>',
    ]
    for i, (label, (xs, ys)) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        coords = " ".join(
            f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)
        )
        out.append(f'<polyline fill="none" stroke="{color}" points="{coords}"/>')
        out.append(f'<text x="{WIDTH - PAD - 5}" y="{PAD + 15 * (i + 1)}" text-anchor="end" fill="{color}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, series: dict, **kw):
    with open(path, "w") as fh:
        fh.write(svg_lines(series, **kw))
