"""CSV tables and hand-written SVG for diffusion and pair plots.

CSV is the canonical output (RFC 4180 quoting, LF endings); the SVG views
draw exactly the numbers the CSV carries.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import datetime
from xml.sax.saxutils import escape

from .metrics import (
    Kind,
    PairMatrix,
    SupersedingPoint,
    TimeSeries,
    diffusion_series,
    superseding_points,
)
from .timeutil import format_time, from_millis, to_millis
from .universe import NodeKey, Universe

WIDTH, HEIGHT = 960, 540
FONT = 'font-family="sans-serif" font-size="12"'
PALETTE = (
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e",
    "#e6ab02", "#a6761d", "#666666", "#1f78b4", "#b2df8a",
)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


# diffusion


@dataclass(frozen=True)
class Diffusion:
    releases: tuple[NodeKey, ...]
    popularity: dict[NodeKey, TimeSeries]
    variety: dict[NodeKey, TimeSeries]
    crossings: tuple[SupersedingPoint, ...]
    window: tuple[datetime | None, datetime | None] = (None, None)


def diffusion(u: Universe, releases, window=(None, None)) -> Diffusion:
    """Series for ``releases`` plus superseding points between consecutive
    selected releases of the same project."""
    releases = tuple(dict.fromkeys(releases))
    pop = {r: diffusion_series(u, r, Kind.POPULARITY) for r in releases}
    var = {r: diffusion_series(u, r, Kind.VARIETY) for r in releases}
    crossings = []
    for a, b in zip(releases, releases[1:]):
        if a.name == b.name and u.precedes(a, b):
            for kind in Kind:
                p = superseding_points(u, a, b, kind)
                if p is not None:
                    crossings.append(p)
    return Diffusion(releases, pop, var, tuple(crossings), window)


def _in_window(t: datetime, window) -> bool:
    start, end = window
    return (start is None or t >= start) and (end is None or t <= end)


def diffusion_rows(d: Diffusion) -> list[tuple]:
    rows = []
    for r in d.releases:
        pop, var = d.popularity[r], d.variety[r]
        times = sorted({t for t, _ in pop.samples} | {t for t, _ in var.samples})
        for t in times:
            if _in_window(t, d.window):
                rows.append((format_time(t), str(r), pop.value_at(t), var.value_at(t)))
    return rows


def diffusion_csv(d: Diffusion) -> str:
    return write_csv(diffusion_rows(d), ["time", "release", "popularity", "variety"])


def _svg_open(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]


def _year_ticks(t0: int, t1: int) -> list[tuple[int, str]]:
    y0, y1 = from_millis(t0).year, from_millis(t1).year
    ticks = []
    for y in range(y0, y1 + 2):
        ms = to_millis(datetime(y, 1, 1))
        if t0 <= ms <= t1:
            ticks.append((ms, str(y)))
    return ticks


def diffusion_svg(d: Diffusion) -> str:
    out = _svg_open("Diffusion plot: " + ", ".join(str(r) for r in d.releases))
    all_times = [
        to_millis(t)
        for series in (*d.popularity.values(), *d.variety.values())
        for t, _ in series.samples
        if _in_window(t, d.window)
    ]
    start, end = d.window
    t0 = to_millis(start) if start else min(all_times, default=0)
    t1 = to_millis(end) if end else max(all_times, default=t0)
    if t1 <= t0:
        t1 = t0 + 86_400_000
    panels = ((Kind.POPULARITY, d.popularity, 60), (Kind.VARIETY, d.variety, 520))
    pw, top, ph = 380, 60, 380
    for kind, series_map, left in panels:
        vmax = max((s.final for s in series_map.values()), default=0) or 1

        def sx(ms):
            return left + (ms - t0) / (t1 - t0) * pw

        def sy(v):
            return top + ph - v / vmax * ph

        out.append(f'<g class="panel {kind.value}">')
        out.append(f'<text x="{left + pw / 2:.1f}" y="{top - 20}" text-anchor="middle" {FONT}>{kind.value}_t</text>')
        out.append(f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="#000"/>')
        out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="#000"/>')
        for ms, label in _year_ticks(t0, t1):
            x = sx(ms)
            out.append(f'<line x1="{x:.1f}" y1="{top + ph}" x2="{x:.1f}" y2="{top + ph + 5}" stroke="#000"/>')
            out.append(f'<text x="{x:.1f}" y="{top + ph + 18}" text-anchor="middle" {FONT}>{label}</text>')
        for v in sorted({0, vmax, vmax // 2}):
            out.append(f'<text x="{left - 6}" y="{sy(v) + 4:.1f}" text-anchor="end" {FONT}>{v}</text>')
        for i, r in enumerate(d.releases):
            samples = [(to_millis(t), v) for t, v in series_map[r].samples]
            if not samples:
                continue
            pts = []
            prev = 0
            for ms, v in samples:
                ms = min(max(ms, t0), t1)
                pts += [(sx(ms), sy(prev)), (sx(ms), sy(v))]
                prev = v
            pts.append((sx(t1), sy(prev)))
            colour = PALETTE[i % len(PALETTE)]
            coords = " ".join(f"{x:.1f},{y:.1f}" for x, y in pts)
            out.append(
                f'<polyline fill="none" stroke="{colour}" stroke-width="2" points="{coords}">'
                f"<title>{escape(str(r))}</title></polyline>"
            )
        for p in d.crossings:
            if p.kind is not kind or not _in_window(p.time, d.window):
                continue
            v = series_map[p.successor].value_at(p.time)
            out.append(
                f'<circle class="superseding" cx="{sx(to_millis(p.time)):.1f}" cy="{sy(v):.1f}" r="6" '
                f'fill="none" stroke="#d00" stroke-width="2"><title>'
                f"{escape(f'{p.successor} supersedes {p.predecessor} at {format_time(p.time)}')}"
                "</title></circle>"
            )
        out.append("</g>")
    for i, r in enumerate(d.releases):
        y = top + ph + 40 + (i // 4) * 16
        x = 60 + (i % 4) * 220
        colour = PALETTE[i % len(PALETTE)]
        out.append(f'<rect x="{x}" y="{y - 9}" width="10" height="10" fill="{colour}"/>')
        out.append(f'<text x="{x + 14}" y="{y}" {FONT}>{escape(str(r))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# project pairs


def project_pairs_csv(m: PairMatrix) -> str:
    rows = []
    for i, p in enumerate(m.axis_x):
        rows.append([p] + ["" if i == j else float(m.intensity[i, j]) for j in range(len(m.axis_y))])
    return write_csv(rows, ["project", *m.axis_y])


def _heat_grid(title, row_labels, col_labels, cell, extra_col=None, extra_row=None) -> str:
    """Shaded grid; ``cell(i, j)`` returns (text, opacity) or None for blank."""
    out = _svg_open(title)
    n_rows = len(row_labels) + (1 if extra_row else 0)
    n_cols = len(col_labels) + (1 if extra_col else 0)
    left, top = 220, 150
    size = max(12.0, min((WIDTH - left - 20) / max(n_cols, 1), (HEIGHT - top - 20) / max(n_rows, 1)))
    for j, label in enumerate(list(col_labels) + ([extra_col[0]] if extra_col else [])):
        x = left + (j + 0.5) * size
        out.append(
            f'<text x="{x:.1f}" y="{top - 6}" transform="rotate(-45 {x:.1f} {top - 6})" {FONT}>{escape(label)}</text>'
        )
    for i, label in enumerate(list(row_labels) + ([extra_row[0]] if extra_row else [])):
        y = top + (i + 0.5) * size + 4
        out.append(f'<text x="{left - 6}" y="{y:.1f}" text-anchor="end" {FONT}>{escape(label)}</text>')
    for i in range(len(row_labels)):
        for j in range(len(col_labels)):
            x, y = left + j * size, top + i * size
            value = cell(i, j)
            if value is None:
                out.append(f'<rect x="{x:.1f}" y="{y:.1f}" width="{size:.1f}" height="{size:.1f}" fill="#eeeeee"/>')
                continue
            text, opacity = value
            out.append(
                f'<rect x="{x:.1f}" y="{y:.1f}" width="{size:.1f}" height="{size:.1f}" fill="#08519c" '
                f'fill-opacity="{opacity:.4f}" stroke="#cccccc"/>'
            )
            colour = "#ffffff" if opacity > 0.5 else "#000000"
            out.append(
                f'<text x="{x + size / 2:.1f}" y="{y + size / 2 + 4:.1f}" text-anchor="middle" '
                f'fill="{colour}" {FONT}>{escape(text)}</text>'
            )
    if extra_col:
        x = left + len(col_labels) * size
        for i, v in enumerate(extra_col[1]):
            y = top + (i + 0.5) * size + 4
            out.append(f'<text class="outside" x="{x + size / 2:.1f}" y="{y:.1f}" text-anchor="middle" {FONT}>{v}</text>')
    if extra_row:
        y = top + len(row_labels) * size
        for j, v in enumerate(extra_row[1]):
            x = left + (j + 0.5) * size
            out.append(
                f'<text class="outside" x="{x:.1f}" y="{y + size / 2 + 4:.1f}" text-anchor="middle" {FONT}>{v}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def project_pairs_svg(m: PairMatrix) -> str:
    def cell(i, j):
        if i == j:
            return None
        v = float(m.intensity[i, j])
        return (f"{v:.2f}", v)

    return _heat_grid("Project pair intensity", m.axis_x, m.axis_y, cell)


# release pairs


def release_pairs_rows(m: PairMatrix) -> tuple[list[str], list[list]]:
    header = ["release", *(k.release for k in m.axis_y), "outside"]
    rows = []
    for i, x in enumerate(m.axis_x):
        rows.append([x.release, *(int(v) for v in m.counts[i]), m.outside_x[i]])
    rows.append(["outside", *m.outside_y, ""])
    return header, rows


def release_pairs_csv(m: PairMatrix) -> str:
    header, rows = release_pairs_rows(m)
    return write_csv(rows, header)


def release_pairs_svg(m: PairMatrix) -> str:
    # x releases run along the horizontal axis, y releases down the side
    def cell(i, j):
        return (str(int(m.counts[j, i])), float(m.intensity[j, i]))

    px = m.axis_x[0].name if m.axis_x else ""
    py = m.axis_y[0].name if m.axis_y else ""
    return _heat_grid(
        f"Release pairs: {px} vs {py}",
        [f"{py} {k.release}" for k in m.axis_y],
        [f"{px} {k.release}" for k in m.axis_x],
        cell,
        extra_col=("outside", list(m.outside_y)),
        extra_row=("outside", list(m.outside_x)),
    )
