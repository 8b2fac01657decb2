"""Static before/after gap diagrams: one horizontal track per stage."""

from __future__ import annotations

from fractions import Fraction

from . import pointset as ps
from .rationals import format_rational

_WIDTH = 840
_MARGIN = 60
_TRACK = 56

_KIND_SHORT = {
    ps.GapKind.OPEN: "open",
    ps.GapKind.CLOSED: "closed",
    ps.GapKind.CLOSED_OPEN: "bad [_)",
    ps.GapKind.OPEN_CLOSED: "bad (_]",
}


def _bracket(closed: bool, left: bool) -> str:
    if left:
        return "[" if closed else "("
    return "]" if closed else ")"


def render_text(stages: list[tuple[str, ps.PointSet]]) -> str:
    lines = []
    for label, s in stages:
        parts = []
        for c in s.components:
            if c.is_point:
                parts.append("{%s}" % format_rational(c.lo))
            else:
                parts.append(
                    _bracket(c.lo_closed, True)
                    + format_rational(c.lo)
                    + ", "
                    + format_rational(c.hi)
                    + _bracket(c.hi_closed, False)
                )
        lines.append(f"{label}: " + " u ".join(parts))
        for g in ps.gaps(s):
            lines.append(
                f"    gap {format_rational(g.lo)}..{format_rational(g.hi)} "
                f"{g.kind.value} length {format_rational(g.length)}"
            )
    return "\n".join(lines) + "\n"


def render_svg(stages: list[tuple[str, ps.PointSet]]) -> str:
    lo = min(s.inf for _, s in stages)
    hi = max(s.sup for _, s in stages)
    span = hi - lo if hi > lo else Fraction(1)

    def x_of(v: Fraction) -> float:
        return _MARGIN + float((v - lo) / span) * (_WIDTH - 2 * _MARGIN)

    height = _TRACK * len(stages) + _MARGIN
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{height}" font-family="monospace" font-size="11">'
    ]
    for row, (label, s) in enumerate(stages):
        y = _MARGIN // 2 + row * _TRACK
        out.append(
            f'<text x="4" y="{y + 4}" font-size="12">{label}</text>'
        )
        out.append(
            f'<line x1="{x_of(s.inf):.2f}" y1="{y}" x2="{x_of(s.sup):.2f}" '
            f'y2="{y}" stroke="#bbb" stroke-width="1"/>'
        )
        for c in s.components:
            if c.is_point:
                out.append(
                    f'<circle cx="{x_of(c.lo):.2f}" cy="{y}" r="3.5" fill="#205080"/>'
                )
            else:
                x1, x2 = x_of(c.lo), x_of(c.hi)
                out.append(
                    f'<rect x="{x1:.2f}" y="{y - 4}" width="{max(x2 - x1, 1.0):.2f}" '
                    f'height="8" fill="#205080"/>'
                )
                for end, closed in ((c.lo, c.lo_closed), (c.hi, c.hi_closed)):
                    fill = "#205080" if closed else "#ffffff"
                    out.append(
                        f'<circle cx="{x_of(end):.2f}" cy="{y}" r="3.5" '
                        f'fill="{fill}" stroke="#205080"/>'
                    )
        for g in ps.gaps(s):
            cx = (x_of(g.lo) + x_of(g.hi)) / 2
            out.append(
                f'<text x="{cx:.2f}" y="{y + 18}" text-anchor="middle" '
                f'fill="#803020">{_KIND_SHORT[g.kind]} {format_rational(g.length)}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_diagram(path: str, stages: list[tuple[str, ps.PointSet]]) -> None:
    text = render_svg(stages) if path.endswith(".svg") else render_text(stages)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
