"""Plain SVG 1.1 output for traced curves, circles and event markers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .geometry import FOCUS, FeatureEvent, SampledCurve

EVENT_COLORS = {
    "axis_crossing": "#d62728",
    "vertical_tangent": "#2ca02c",
    "horizontal_tangent": "#9467bd",
    "tangent_through_focus": "#ff7f0e",
    "self_intersection": "#000000",
    "line_crossing": "#8c564b",
}


@dataclass
class Figure:
    """Accumulates shapes in plane coordinates and writes one SVG document."""

    width: int = 800
    height: int = 800
    viewport: tuple[float, float, float, float] | None = None  # xmin, xmax, ymin, ymax
    margin: float = 0.05
    stroke_width: float = 1.2
    _items: list[tuple[str, dict]] = field(default_factory=list)
    _points: list[tuple[float, float]] = field(default_factory=list)

    def polyline(self, pts: np.ndarray, color: str = "#1f77b4", width: float | None = None,
                 breaks: Sequence[int] = ()) -> None:
        """Add a polyline; ``breaks`` are indices where the line is interrupted."""
        pts = np.asarray(pts, dtype=float)
        cuts = [0, *sorted(breaks), len(pts)]
        for a, b in zip(cuts, cuts[1:]):
            if b - a >= 2:
                self._items.append(("polyline", {"pts": pts[a:b], "color": color, "width": width}))
        self._points.extend(map(tuple, pts))

    def circle(self, center: Sequence[float], radius: float, color: str = "#7f7f7f",
               fill: str = "none", width: float | None = None) -> None:
        self._items.append(("circle", {"c": tuple(center), "r": radius, "color": color,
                                       "fill": fill, "width": width}))

    def marker(self, p: Sequence[float], color: str = "#000000", size: float = 4.0,
               title: str = "") -> None:
        self._items.append(("marker", {"p": tuple(p), "color": color, "size": size, "title": title}))
        self._points.append(tuple(p))

    def _bounds(self) -> tuple[float, float, float, float]:
        if self.viewport is not None:
            return self.viewport
        if not self._points:
            return (-1.0, 1.0, -1.0, 1.0)
        arr = np.array(self._points)
        xmin, ymin = arr.min(axis=0)
        xmax, ymax = arr.max(axis=0)
        # square aspect so circles stay round
        cx, cy = (xmin + xmax) / 2, (ymin + ymax) / 2
        half = max(xmax - xmin, ymax - ymin, 1e-9) / 2 * (1 + 2 * self.margin)
        return (cx - half, cx + half, cy - half, cy + half)

    def render(self) -> str:
        xmin, xmax, ymin, ymax = self._bounds()
        sx = self.width / (xmax - xmin)
        sy = self.height / (ymax - ymin)

        def X(x: float) -> str:
            return f"{(x - xmin) * sx:.3f}"

        def Y(y: float) -> str:
            return f"{(ymax - y) * sy:.3f}"

        out = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">',
            '<rect width="100%" height="100%" fill="white"/>',
        ]
        # axes
        if xmin < 0 < xmax:
            out.append(f'<line x1="{X(0)}" y1="0" x2="{X(0)}" y2="{self.height}" '
                       'stroke="#cccccc" stroke-width="0.8"/>')
        if ymin < 0 < ymax:
            out.append(f'<line x1="0" y1="{Y(0)}" x2="{self.width}" y2="{Y(0)}" '
                       'stroke="#cccccc" stroke-width="0.8"/>')
        for kind, it in self._items:
            w = it.get("width") or self.stroke_width
            if kind == "polyline":
                pts = " ".join(f"{X(x)},{Y(y)}" for x, y in it["pts"])
                out.append(f'<polyline points="{pts}" fill="none" stroke="{it["color"]}" '
                           f'stroke-width="{w}" stroke-linejoin="round"/>')
            elif kind == "circle":
                cx, cy = it["c"]
                out.append(f'<ellipse cx="{X(cx)}" cy="{Y(cy)}" rx="{it["r"] * sx:.3f}" '
                           f'ry="{it["r"] * sy:.3f}" fill="{it["fill"]}" stroke="{it["color"]}" '
                           f'stroke-width="{w * 0.6:.2f}"/>')
            else:
                x, y = it["p"]
                title = f"<title>{escape(it['title'])}</title>" if it["title"] else ""
                out.append(f'<circle cx="{X(x)}" cy="{Y(y)}" r="{it["size"]}" '
                           f'fill="{it["color"]}">{title}</circle>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.render())


def _jumps(c: SampledCurve, factor: float = 50.0) -> list[int]:
    # break the line across focus gaps and wild jumps
    if len(c) < 3:
        return []
    steps = np.hypot(*np.diff(c.p, axis=0).T)
    med = float(np.median(steps)) or 1.0
    return [int(i) + 1 for i in np.nonzero(steps > factor * med)[0]]


def curve_figure(
    curve: SampledCurve,
    *,
    reflected: bool = False,
    circles: int = 0,
    events: Iterable[FeatureEvent] = (),
    viewport: tuple[float, float, float, float] | None = None,
    width: int = 800,
) -> Figure:
    """Curve (blue), optional reflection (red), circles S_t, foci and events."""
    fig = Figure(width=width, height=width, viewport=viewport)
    fig.polyline(curve.p, "#1f77b4", breaks=_jumps(curve))
    if reflected:
        fig.polyline(curve.p * np.array([1.0, -1.0]), "#d62728", breaks=_jumps(curve))
    if circles > 0:
        idx = np.linspace(0, len(curve) - 1, circles + 2).round().astype(int)[1:-1]
        for i in idx:
            cx, cy = curve.p[i]
            r = math.hypot(cx - FOCUS[0], cy - FOCUS[1])
            fig.circle((cx, cy), r)
    for e in events:
        label = f"{e.kind} t={', '.join(f'{t:.7g}' for t in e.params)}"
        fig.marker(e.location, EVENT_COLORS.get(e.kind, "#000000"), title=label)
    fig.marker(FOCUS, "#000000", 3.0, "focus (0, 1)")
    fig.marker((0.0, -1.0), "#000000", 3.0, "focus (0, -1)")
    return fig
