"""SVG heatmap of a coherence bundle.

Layout follows the usual coherence figure: time runs left to right,
Fourier period grows downwards on a log2 axis, the cone of influence is
washed out and outlined, significant regions are outlined in thick black,
and phase arrows are drawn inside significant cells outside the cone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .export import grid_csv
from .significance import mask_contours

_COLORMAPS = {
    # (position, (r, g, b)) anchors, linearly interpolated
    "jet": [(0.0, (0, 0, 143)), (0.125, (0, 0, 255)), (0.375, (0, 255, 255)),
            (0.625, (255, 255, 0)), (0.875, (255, 0, 0)), (1.0, (128, 0, 0))],
    "hot": [(0.0, (10, 0, 0)), (0.375, (255, 0, 0)), (0.75, (255, 255, 0)), (1.0, (255, 255, 255))],
    "viridis": [(0.0, (68, 1, 84)), (0.25, (59, 82, 139)), (0.5, (33, 145, 140)),
                (0.75, (94, 201, 98)), (1.0, (253, 231, 37))],
    "gray": [(0.0, (0, 0, 0)), (1.0, (255, 255, 255))],
}

PERIOD_TICKS = (4, 8, 16, 32, 64, 128)


@dataclass(frozen=True)
class RenderOptions:
    width: int = 720
    height: int = 360
    colormap: str = "jet"
    levels: int = 64
    arrow_cell: int = 32
    arrow_length: float = 14.0
    title: str | None = None


def colormap(name, levels):
    if name not in _COLORMAPS:
        raise ValueError(f"unknown colormap {name!r}; choose from {sorted(_COLORMAPS)}")
    anchors = _COLORMAPS[name]
    pos = np.array([a[0] for a in anchors])
    rgb = np.array([a[1] for a in anchors], dtype=float)
    t = np.linspace(0, 1, levels)
    cols = np.stack([np.interp(t, pos, rgb[:, c]) for c in range(3)], axis=1)
    return ["#%02x%02x%02x" % tuple(int(round(v)) for v in c) for c in cols]


def _n(v):
    return format(float(v), ".2f").rstrip("0").rstrip(".")


def arrow_positions(bundle, options=RenderOptions()):
    """Cells that receive a phase arrow: one per ``arrow_cell`` pixel block at most."""
    rows, cols = bundle.fields["r2"].shape
    sig = bundle.fields.get("mask")
    if sig is None:
        return []
    ok = np.asarray(sig, dtype=bool) & bundle.outside_coi()
    if bundle.coherence is not None:
        ok &= ~bundle.coherence.degenerate
    cw, ch = options.width / cols, options.height / rows
    step = options.arrow_cell
    out = []
    for by in range(int(math.ceil(options.height / step))):
        for bx in range(int(math.ceil(options.width / step))):
            px = min((bx + 0.5) * step, options.width - 1e-9)
            py = min((by + 0.5) * step, options.height - 1e-9)
            u, j = int(px // cw), int(py // ch)
            if ok[j, u]:
                out.append((j, u))
    return out


def render_svg(bundle, options=RenderOptions()):
    """SVG text for a pair bundle; the r2 grid is embedded verbatim as CSV metadata."""
    r2 = np.asarray(bundle.fields["r2"])
    phase = np.asarray(bundle.fields["phase"])
    rows, cols = r2.shape
    W, H = options.width, options.height
    left, top, right, bottom = 70, 40, 110, 120
    cw, ch = W / cols, H / rows
    palette = colormap(options.colormap, options.levels)
    name_x, name_y = (bundle.names + ("y",))[:2]

    def xpix(u):
        return left + (u + 0.5) * cw

    def ypix(j):
        return top + (j + 0.5) * ch

    out = []
    a = out.append
    a('<?xml version="1.0" encoding="UTF-8"?>')
    a(f'<svg xmlns="http://www.w3.org/2000/svg" width="{W + left + right}" height="{H + top + bottom}" '
      f'viewBox="0 0 {W + left + right} {H + top + bottom}" font-family="sans-serif" font-size="11">')
    a('<metadata id="r2-grid"><![CDATA[')
    a(grid_csv(r2, bundle.dates, bundle.periods).rstrip("\n"))
    a("]]></metadata>")
    a('<defs><marker id="head" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="5" markerHeight="5" '
      'orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="black"/></marker></defs>')
    title = options.title or f"Wavelet coherence: {name_x} vs {name_y}"
    a(f'<text x="{left + W / 2}" y="{top - 15}" text-anchor="middle" font-size="14">{escape(title)}</text>')

    # heatmap, one rect per run of equal colour
    a('<g id="heatmap" shape-rendering="crispEdges">')
    idx = np.clip((np.nan_to_num(r2) * (options.levels - 1)).round().astype(int), 0, options.levels - 1)
    for j in range(rows):
        u = 0
        while u < cols:
            v = idx[j, u]
            end = u + 1
            while end < cols and idx[j, end] == v:
                end += 1
            a(f'<rect x="{_n(left + u * cw)}" y="{_n(top + j * ch)}" width="{_n((end - u) * cw)}" '
              f'height="{_n(ch)}" fill="{palette[v]}"/>')
            u = end
    a("</g>")

    # cone of influence
    s0, dj = bundle.scales[0], math.log2(bundle.scales[1] / bundle.scales[0]) if rows > 1 else 1.0
    jc = np.log2(np.maximum(bundle.coi, 1e-300) / s0) / dj
    yc = np.clip(top + (jc + 0.5) * ch, top, top + H)
    xs = [left + (u + 0.5) * cw for u in range(cols)]
    line = " ".join(f"{_n(x)},{_n(y)}" for x, y in zip(xs, yc))
    a(f'<polygon id="coi" points="{_n(left)},{_n(top + H)} {_n(left)},{_n(yc[0])} {line} '
      f'{_n(left + W)},{_n(yc[-1])} {_n(left + W)},{_n(top + H)}" fill="white" fill-opacity="0.55" stroke="none"/>')
    a(f'<polyline id="coi-edge" points="{line}" fill="none" stroke="black" stroke-width="2"/>')

    # significance contours
    mask = bundle.fields.get("mask")
    a('<g id="significance" fill="none" stroke="black" stroke-width="2.5" stroke-linejoin="round">')
    if mask is not None:
        for loop in mask_contours(np.asarray(mask, dtype=bool)):
            pts = " ".join(f"{_n(xpix(u))},{_n(ypix(j))}" for u, j in loop)
            a(f'<polyline points="{pts}"/>')
    a("</g>")

    # phase arrows: right = in phase, left = anti-phase,
    # down = first series leads, up = second series leads
    a('<g id="arrows" stroke="black" stroke-width="1.3">')
    half = options.arrow_length / 2
    for j, u in arrow_positions(bundle, options):
        cx, cy = xpix(u), ypix(j)
        dx, dy = math.cos(phase[j, u]) * half, math.sin(phase[j, u]) * half
        a(f'<line x1="{_n(cx - dx)}" y1="{_n(cy - dy)}" x2="{_n(cx + dx)}" y2="{_n(cy + dy)}" '
          f'marker-end="url(#head)"/>')
    a("</g>")

    # frame and axes
    a(f'<rect x="{left}" y="{top}" width="{W}" height="{H}" fill="none" stroke="black"/>')
    a('<g id="period-axis" text-anchor="end">')
    for p in PERIOD_TICKS:
        j = math.log2(p / bundle.periods[0]) / dj
        if -0.5 <= j <= rows - 0.5:
            y = ypix(j)
            a(f'<line x1="{left - 4}" y1="{_n(y)}" x2="{left}" y2="{_n(y)}" stroke="black"/>')
            a(f'<text x="{left - 6}" y="{_n(y + 4)}">{p}</text>')
    a(f'<text transform="translate(18,{top + H / 2}) rotate(-90)" text-anchor="middle">Period (weeks)</text>')
    a("</g>")
    a('<g id="time-axis" text-anchor="middle">')
    for u, label in _time_ticks(bundle.dates):
        x = xpix(u)
        a(f'<line x1="{_n(x)}" y1="{top + H}" x2="{_n(x)}" y2="{top + H + 4}" stroke="black"/>')
        a(f'<text x="{_n(x)}" y="{top + H + 16}">{label}</text>')
    a("</g>")

    # colour bar
    bx, by, bh = left + W + 25, top, H
    a('<g id="colorbar" shape-rendering="crispEdges">')
    n = len(palette)
    for i, c in enumerate(palette):
        a(f'<rect x="{bx}" y="{_n(by + bh - (i + 1) * bh / n)}" width="14" height="{_n(bh / n + 0.5)}" fill="{c}"/>')
    for v in (0, 0.5, 1):
        a(f'<text x="{bx + 20}" y="{_n(by + bh - v * bh + 4)}">{v:g}</text>')
    a(f'<text x="{bx}" y="{by - 8}">R²</text>')
    a("</g>")

    # legend
    ly = top + H + 40
    legend = [
        "Thick contour: significant against AR(1) red noise; pale region: cone of influence.",
        "Arrows: → in phase, ← anti-phase,",
        f"↓ {name_x} (first) leads {name_y} by π/2, ↑ {name_y} (second) leads {name_x} by π/2.",
    ]
    a('<g id="legend">')
    for i, text in enumerate(legend):
        a(f'<text x="{left}" y="{ly + 16 * i}">{escape(text)}</text>')
    a("</g>")
    a("</svg>")
    return "\n".join(out) + "\n"


def _time_ticks(dates):
    if not dates:
        return []
    ticks = []
    for u in range(1, len(dates)):
        if dates[u].year != dates[u - 1].year:
            ticks.append((u, str(dates[u].year)))
    if len(ticks) > 12:
        keep = max(1, len(ticks) // 8)
        ticks = ticks[::keep]
    if not ticks:
        step = max(1, len(dates) // 6)
        ticks = [(u, dates[u].isoformat()) for u in range(0, len(dates), step)]
    return ticks
