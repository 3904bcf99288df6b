"""Text, TSV and SVG renderings of Ext charts (stem t - s across, s up)."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .ext import ExtChart

FORMATS = ("ascii", "tsv", "svg")


def _entries(chart: ExtChart):
    return sorted((s, t, n) for (s, t), n in chart.dims.items() if n)


def render_ascii(chart: ExtChart) -> str:
    entries = _entries(chart)
    stems = [t - s for s, t, _ in entries]
    lo = min(stems, default=0)
    hi = max(stems, default=0)
    width = max((n for *_, n in entries), default=1)
    cell = max(width, 2)
    grid = {(s, t - s): n for s, t, n in entries}
    lines = []
    for s in range(chart.s_max, -1, -1):
        row = []
        for x in range(lo, hi + 1):
            n = grid.get((s, x), 0)
            row.append(("o" * n if n else ".").ljust(cell))
        lines.append(f"{s:>3} | " + " ".join(row).rstrip() if entries else f"{s:>3} |")
    axis = " ".join(str(x).ljust(cell) for x in range(lo, hi + 1)).rstrip()
    lines.append("    +-" + "-" * len(axis))
    lines.append("  s   " + axis + "   (t-s)")
    return "\n".join(lines) + "\n"


def render_tsv(chart: ExtChart) -> str:
    return "".join(f"{s}\t{t}\t{n}\n" for s, t, n in _entries(chart))


def render_svg(chart: ExtChart, unit: int = 24) -> str:
    entries = _entries(chart)
    stems = [t - s for s, t, _ in entries]
    lo = min(stems, default=0)
    hi = max(stems, default=0)
    margin = unit * 2
    width = margin + unit * (hi - lo + 2)
    height = margin + unit * (chart.s_max + 2)

    def xy(x: int, s: int) -> tuple[float, float]:
        return margin + unit * (x - lo + 0.5), height - margin - unit * (s + 0.5)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="0" x2="{margin}" y2="{height - margin}" stroke="black"/>',
    ]
    for x in range(lo, hi + 1):
        cx, _ = xy(x, 0)
        out.append(f'<text x="{cx:.1f}" y="{height - margin + 16}" font-size="10" text-anchor="middle">{x}</text>')
    for s in range(chart.s_max + 1):
        _, cy = xy(lo, s)
        out.append(f'<text x="{margin - 6}" y="{cy + 3:.1f}" font-size="10" text-anchor="end">{s}</text>')
    for s, t, n in entries:
        cx, cy = xy(t - s, s)
        for i in range(n):
            dx = (i - (n - 1) / 2) * 7
            out.append(f'<circle cx="{cx + dx:.1f}" cy="{cy:.1f}" r="3"><title>{escape(f"s={s} t={t}")}</title></circle>')
    out.append(f'<text x="{width / 2:.1f}" y="{height - 8}" font-size="11" text-anchor="middle">t - s</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_chart(chart: ExtChart, fmt: str = "ascii") -> str:
    if fmt == "ascii":
        return render_ascii(chart)
    if fmt == "tsv":
        return render_tsv(chart)
    if fmt == "svg":
        return render_svg(chart)
    raise ValueError(f"unknown chart format {fmt!r} (expected one of {', '.join(FORMATS)})")
