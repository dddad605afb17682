"""Dependency-free, deterministic SVG scatter for the cluster map."""
from __future__ import annotations

from typing import Optional, Sequence

PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)

WIDTH = 640
HEIGHT = 480
MARGIN = 40


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def scatter_svg(
    xy: Sequence[tuple[float, float]],
    clusters: Sequence[int],
    outcomes: Sequence[int],
    medoids: Optional[Sequence[int]] = None,
    ids: Optional[Sequence[str]] = None,
) -> str:
    """Scatter plot: color = cluster, shape = outcome, medoids emphasized."""
    medoid_set = set(medoids or ())
    xs = [p[0] for p in xy]
    ys = [p[1] for p in xy]
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    xspan = (xmax - xmin) or 1.0
    yspan = (ymax - ymin) or 1.0

    def sx(x: float) -> float:
        return MARGIN + (x - xmin) / xspan * (WIDTH - 2 * MARGIN)

    def sy(y: float) -> float:
        # SVG y axis grows downward
        return HEIGHT - MARGIN - (y - ymin) / yspan * (HEIGHT - 2 * MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    for i, (x, y) in enumerate(xy):
        color = PALETTE[clusters[i] % len(PALETTE)]
        px, py = sx(x), sy(y)
        is_medoid = i in medoid_set
        title = f"<title>{ids[i] if ids else i}</title>"
        if outcomes[i] == 1:
            r = 7 if is_medoid else 4
            stroke = ' stroke="black" stroke-width="2"' if is_medoid else ""
            parts.append(
                f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="{r}" fill="{color}"{stroke}>'
                f"{title}</circle>"
            )
        else:
            half = 8 if is_medoid else 5
            stroke = ' stroke="black" stroke-width="2"' if is_medoid else ""
            parts.append(
                f'<rect x="{_fmt(px - half / 2)}" y="{_fmt(py - half / 2)}" '
                f'width="{half}" height="{half}" fill="{color}"{stroke}>{title}</rect>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
