"""Minimal standalone SVG emission for the diagnostic diagrams.

Layered filled bands, polylines and scatter dots only; no styling contract
beyond being valid SVG.  Intended for quick inspection of results without a
plotting stack.
"""

import numpy as np

__all__ = ["band_svg", "logx_diagram_svg"]

_COLORS = ("#c44e52", "#4c72b0", "#55a868", "#8172b2", "#ccb974", "#64b5cd")

_PANEL_W, _PANEL_H, _MARGIN = 640, 220, 40


class _Canvas:
    def __init__(self, width, height):
        self.width, self.height = width, height
        self.parts = []

    def polyline(self, pts, color, width=1.2, opacity=1.0):
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        self.parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="{width}" stroke-opacity="{opacity}"/>'
        )

    def polygon(self, pts, color, opacity):
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        self.parts.append(
            f'<polygon points="{coords}" fill="{color}" fill-opacity="{opacity}" '
            'stroke="none"/>'
        )

    def circle(self, x, y, r, color, opacity):
        self.parts.append(
            f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r:.2f}" fill="{color}" '
            f'fill-opacity="{opacity}"/>'
        )

    def rect(self, x, y, w, h):
        self.parts.append(
            f'<rect x="{x:.1f}" y="{y:.1f}" width="{w:.1f}" height="{h:.1f}" '
            'fill="none" stroke="#555" stroke-width="1"/>'
        )

    def text(self, x, y, s):
        self.parts.append(f'<text x="{x:.1f}" y="{y:.1f}" font-size="11">{s}</text>')

    def render(self):
        body = "\n".join(self.parts)
        return (
            '<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">\n{body}\n</svg>\n'
        )


class _Axes:
    """Linear data-to-pixel mapping inside one panel."""

    def __init__(self, canvas, row, x_range, y_range, label=""):
        self.canvas = canvas
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        self.left = _MARGIN
        self.top = _MARGIN / 2 + row * _PANEL_H
        self.w = _PANEL_W - 2 * _MARGIN
        self.h = _PANEL_H - _MARGIN
        canvas.rect(self.left, self.top, self.w, self.h)
        if label:
            canvas.text(self.left + 4, self.top + 13, label)

    def px(self, x):
        span = self.x1 - self.x0 or 1.0
        return self.left + (x - self.x0) / span * self.w

    def py(self, y):
        span = self.y1 - self.y0 or 1.0
        return self.top + self.h - (y - self.y0) / span * self.h

    def map(self, xs, ys):
        return [(self.px(x), self.py(y)) for x, y in zip(xs, ys)]


def _finite_range(values, pad=0.05):
    values = np.asarray(values, dtype=np.float64)
    values = values[np.isfinite(values)]
    lo, hi = float(values.min()), float(values.max())
    span = (hi - lo) or 1.0
    return lo - pad * span, hi + pad * span


def band_svg(bands, path=None, label=""):
    """Render contour bands (one or more runs) into an SVG string.

    Nested level envelopes become translucent fills, the median a solid
    line.  Writes to ``path`` when given; returns the SVG text.
    """
    if isinstance(bands, (list, tuple)):
        bands = list(bands)
    else:
        bands = [bands]
    canvas = _Canvas(_PANEL_W, _PANEL_H + _MARGIN // 2)
    ys = np.concatenate([b.upper.ravel() for b in bands])
    axes = _Axes(
        canvas,
        0,
        _finite_range(np.concatenate([b.grid for b in bands])),
        (0.0, _finite_range(ys)[1]),
        label,
    )
    for i, band in enumerate(bands):
        color = _COLORS[i % len(_COLORS)]
        for k in range(len(band.level_masses) - 1, -1, -1):
            pts = axes.map(band.grid, band.upper[k])
            pts += axes.map(band.grid[::-1], band.lower[k][::-1])
            canvas.polygon(pts, color, 0.18)
        canvas.polyline(axes.map(band.grid, band.median), color)
    text = canvas.render()
    if path is not None:
        from .io import atomic_write

        atomic_write(path, text)
    return text


def logx_diagram_svg(diagram, path=None):
    """Render a log X diagram into an SVG string.

    Top panel: relative posterior mass per run.  One panel per function:
    weighted scatter of sampled values against log X, with thread traces as
    black polylines.  Writes to ``path`` when given; returns the SVG text.
    """
    entries = diagram.runs
    fn_names = list(entries[0].scatter) if entries else []
    n_panels = 1 + len(fn_names)
    canvas = _Canvas(_PANEL_W, n_panels * _PANEL_H + _MARGIN // 2)

    x_range = _finite_range(
        np.concatenate([e.mass_curve.logx for e in entries]), pad=0.02
    )
    axes = _Axes(canvas, 0, x_range, (0.0, 1.05), "relative posterior mass")
    for i, entry in enumerate(entries):
        mc = entry.mass_curve
        canvas.polyline(axes.map(mc.logx, mc.mass), _COLORS[i % len(_COLORS)])

    for row, name in enumerate(fn_names, start=1):
        values = np.concatenate([e.scatter[name][:, 1] for e in entries])
        axes = _Axes(canvas, row, x_range, _finite_range(values), name)
        for i, entry in enumerate(entries):
            color = _COLORS[i % len(_COLORS)]
            pts = entry.scatter[name]
            wmax = pts[:, 2].max() or 1.0
            for x, v, w in pts[:: max(1, len(pts) // 2000)]:
                canvas.circle(
                    axes.px(x), axes.py(v), 1.4, color, 0.15 + 0.8 * (w / wmax)
                )
            for polyline in entry.traces.values():
                arr = polyline[name]
                canvas.polyline(
                    axes.map(arr[:, 0], arr[:, 1]), "#222222", width=1.0
                )
    text = canvas.render()
    if path is not None:
        from .io import atomic_write

        atomic_write(path, text)
    return text
