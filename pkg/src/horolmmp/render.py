"""SVG snapshots of 2D polytope families.

Weights are drawn in a plain orthogonal embedding of the chosen weight basis,
y pointing up. Colors go from light (small eps) to dark (eps near the reference).
"""
from __future__ import annotations

import math
from fractions import Fraction

from .errors import DimensionError
from .exact import format_rat
from .family import Family, polytope_at

SIZE = 480
MARGIN = 40


def _f(x: float) -> str:
    return f"{x:.3f}"


def _gray(eps: Fraction, ref: Fraction | None) -> str:
    t = 0.0 if not ref else min(1.0, float(eps / ref))
    g = round(225 - 175 * t)
    return f"rgb({g},{g},{g})"


def _order(pts: list[tuple]) -> list[tuple]:
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    return sorted(pts, key=lambda p: math.atan2(p[1] - cy, p[0] - cx))


def snapshot_points(f: Family, eps) -> tuple[list[tuple], str | None]:
    """Vertices of Q^eps as float pairs, or a note ("empty", "unbounded")."""
    snap = polytope_at(f, eps)
    if snap.q_tilde.is_empty():
        return [], "empty"
    if not snap.q_tilde.is_bounded():
        return [], "unbounded"
    return [tuple(float(c) for c in p) for p in snap.q_vertices(f.space)], None


class _Frame:
    def __init__(self, pts: list[tuple]):
        xs = [p[0] for p in pts] + [0.0]
        ys = [p[1] for p in pts] + [0.0]
        lo_x, hi_x, lo_y, hi_y = min(xs), max(xs), min(ys), max(ys)
        span = max(hi_x - lo_x, hi_y - lo_y, 1.0) * 1.2
        self.cx, self.cy = (lo_x + hi_x) / 2, (lo_y + hi_y) / 2
        self.scale = (SIZE - 2 * MARGIN) / span
        self.half = span / 2

    def xy(self, p) -> tuple[str, str]:
        x = SIZE / 2 + (p[0] - self.cx) * self.scale
        y = SIZE / 2 - (p[1] - self.cy) * self.scale
        return _f(x), _f(y)

    def clip_ray(self, d) -> tuple:
        # far enough to leave the viewport
        r = 4 * (self.half + abs(self.cx) + abs(self.cy) + 1)
        n = math.hypot(*d)
        return (d[0] * r / n, d[1] * r / n)


def _background(f: Family, fr: _Frame) -> list[str]:
    out = []
    o = fr.xy((0.0, 0.0))
    walls = [c.coroot_pairings for c in f.space.colors]
    for k, a in enumerate(walls):
        d = (-float(a[1]), float(a[0]))  # direction of the wall line <x, a> = 0
        p, q = fr.xy(fr.clip_ray(d)), fr.xy(fr.clip_ray((-d[0], -d[1])))
        out.append(f'<line class="wall" data-color="{f.space.colors[k].name}" x1="{p[0]}" y1="{p[1]}" '
                   f'x2="{q[0]}" y2="{q[1]}" stroke="#bbb" stroke-dasharray="4 4"/>')
    # boundary rays of the dominant cone {<x, a> >= 0 for every color}
    for k, a in enumerate(walls):
        for sgn in (1, -1):
            d = (-sgn * float(a[1]), sgn * float(a[0]))
            if all(float(b[0]) * d[0] + float(b[1]) * d[1] >= -1e-12 for j, b in enumerate(walls) if j != k):
                e = fr.xy(fr.clip_ray(d))
                out.append(f'<line class="cone" x1="{o[0]}" y1="{o[1]}" x2="{e[0]}" y2="{e[1]}" '
                           f'stroke="#000" stroke-width="1.5"/>')
    return out


def _shape(pts: list[tuple], note: str | None, fr: _Frame, fill: str, eps) -> list[str]:
    label = format_rat(Fraction(eps))
    if note:
        return [f'<text x="{_f(SIZE / 2)}" y="{_f(SIZE - 12)}" text-anchor="middle" font-size="14">'
                f'eps={label}: {note}</text>']
    out = [f'<g class="snapshot" data-eps="{label}">']
    uniq = sorted(set(pts))
    if len(uniq) >= 3:
        poly = " ".join(",".join(fr.xy(p)) for p in _order(uniq))
        out.append(f'<polygon points="{poly}" fill="{fill}" stroke="#000" stroke-width="1"/>')
    elif len(uniq) == 2:
        a, b = fr.xy(uniq[0]), fr.xy(uniq[1])
        out.append(f'<line x1="{a[0]}" y1="{a[1]}" x2="{b[0]}" y2="{b[1]}" stroke="{fill}" stroke-width="3"/>')
    for p in uniq:
        x, y = fr.xy(p)
        out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="#000"/>')
    out.append("</g>")
    return out


def _svg(body: list[str], title: str) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
            f'viewBox="0 0 {SIZE} {SIZE}">')
    return "\n".join([head, f"<title>{title}</title>",
                      f'<rect width="{SIZE}" height="{SIZE}" fill="#fff"/>', *body, "</svg>"]) + "\n"


def render_family(f: Family, epsilons, ref=None) -> dict[str, str]:
    """Map file name -> SVG text: one file per eps plus composite.svg."""
    if f.space.weight_dim != 2:
        raise DimensionError("render supports 2D weight spaces only")
    epsilons = sorted({Fraction(e) for e in epsilons})
    shots = {e: snapshot_points(f, e) for e in epsilons}
    fr = _Frame([p for pts, _ in shots.values() for p in pts])
    bg = _background(f, fr)
    files, layers = {}, []
    for k, e in enumerate(epsilons):
        pts, note = shots[e]
        shape = _shape(pts, note, fr, _gray(e, ref), e)
        title = f"Q^eps for eps = {format_rat(e)}"
        files[f"eps_{format_rat(e).replace('/', '_')}.svg"] = _svg(bg + shape, title)
        if not note:
            layers += shape
    files["composite.svg"] = _svg(bg + layers, "Q^eps family")
    return files


def piece_samples(pieces, k: int, window) -> list[Fraction]:
    """k evenly spaced samples inside every piece (the point itself for point pieces)."""
    out = []
    for p in pieces:
        if p.is_point:
            out.append(p.lo)
            continue
        hi = p.hi if p.hi is not None else window
        if hi is None or hi <= p.lo:
            out.append(p.sample)
            continue
        out += [p.lo + (hi - p.lo) * Fraction(t + 1, k + 1) for t in range(k)]
    return out
