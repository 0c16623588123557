"""Combinatorial model of horospherical varieties.

A homogeneous space G/H is carried by :class:`SpaceData`: a weight space of
dimension d (coordinates in a basis of fundamental and central weights), the
colors with their coroot pairings and anticanonical weights a_alpha, the
lattice M, and the normals x_i of the G-stable divisors.  A polarized variety
is a :class:`MomentQuadruple`; everything downstream is linear algebra on the
rows ``gstable rows, then color rows`` of its pseudo-moment polytope.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DimensionError, NotQCartierError, ValidationError, InvariantError
from .exact import (
    LatticeBasis,
    Matrix,
    dot,
    format_rat,
    primitive_and_length,
    vadd,
    vec,
    vsub,
)
from .polytope import HPolytope


@dataclass(frozen=True)
class Color:
    name: str
    coroot_pairings: tuple  # ints, one per basis weight
    a: int  # a_alpha = <2 rho^P, alpha^vee>

    def __post_init__(self):
        object.__setattr__(self, "coroot_pairings", tuple(int(c) for c in self.coroot_pairings))


@dataclass(frozen=True)
class GStable:
    name: str
    x: tuple  # ints, coordinates in the dual basis of the chosen M-basis

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(int(c) for c in self.x))


@dataclass(frozen=True)
class SpaceData:
    weight_dim: int
    colors: tuple
    lattice_M: LatticeBasis
    gstable: tuple
    basis_labels: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(self.colors))
        object.__setattr__(self, "gstable", tuple(self.gstable))
        if self.basis_labels is not None:
            object.__setattr__(self, "basis_labels", tuple(self.basis_labels))
        if self.lattice_M.ambient_dim != self.weight_dim:
            raise DimensionError(
                f"lattice_M lives in Z^{self.lattice_M.ambient_dim}, weight space has dimension {self.weight_dim}")
        for c in self.colors:
            if len(c.coroot_pairings) != self.weight_dim:
                raise DimensionError(f"color {c.name}: {len(c.coroot_pairings)} coroot pairings, expected {self.weight_dim}")
        for g in self.gstable:
            if len(g.x) != self.n:
                raise DimensionError(f"gstable {g.name}: x has length {len(g.x)}, expected {self.n}")

    @property
    def n(self) -> int:
        return self.lattice_M.rank

    @property
    def r(self) -> int:
        return len(self.gstable)

    @property
    def s(self) -> int:
        return len(self.colors)

    def color_row(self, k: int) -> tuple:
        """Pairing of each M-basis vector with the coroot of color k."""
        cp = self.colors[k].coroot_pairings
        return tuple(Fraction(dot(m, cp)) for m in self.lattice_M.basis_rows)

    def rows(self) -> Matrix:
        gs = [vec(g.x) for g in self.gstable]
        cs = [self.color_row(k) for k in range(self.s)]
        return Matrix(gs + cs, self.n)

    def fundamental_weight(self, k: int) -> tuple:
        """varpi_alpha for color k: the basis weight its coroot pairs to 1."""
        cp = self.colors[k].coroot_pairings
        if sorted(cp) != [0] * (len(cp) - 1) + [1]:
            raise ValidationError(f"color {self.colors[k].name}: coroot pairings {cp} are not a unit vector")
        return tuple(Fraction(c) for c in cp)

    def embed(self, x: Sequence) -> tuple:
        """Weight coordinates of a point given in M-coordinates."""
        return self.lattice_M.embed(x)

    def pairing(self, k: int, weight: Sequence) -> Fraction:
        return dot(weight, self.colors[k].coroot_pairings)

    def with_gstable(self, idx: Sequence[int]) -> "SpaceData":
        return SpaceData(self.weight_dim, self.colors, self.lattice_M,
                         [self.gstable[i] for i in idx], self.basis_labels)

    def with_colors(self, idx: Sequence[int]) -> "SpaceData":
        return SpaceData(self.weight_dim, [self.colors[k] for k in idx], self.lattice_M,
                         self.gstable, self.basis_labels)

    def row_name(self, i: int) -> str:
        return self.gstable[i].name if i < self.r else self.colors[i - self.r].name


def validate_space(s: SpaceData) -> list[str]:
    """List of violations; empty means the space data is usable."""
    out = []
    if s.n > s.weight_dim:
        out.append(f"lattice_M has rank {s.n} > weight_dim {s.weight_dim}")
    names = [g.name for g in s.gstable] + [c.name for c in s.colors]
    seen = set()
    for nm in names:
        if nm in seen:
            out.append(f"duplicate name {nm!r}")
        seen.add(nm)
    xs = set()
    for g in s.gstable:
        if all(c == 0 for c in g.x):
            out.append(f"gstable {g.name}: x is zero")
        elif math.gcd(*g.x) != 1:
            out.append(f"gstable {g.name}: x not primitive")
        if g.x in xs:
            out.append(f"gstable {g.name}: duplicate x {list(g.x)}")
        xs.add(g.x)
    units = set()
    for k, c in enumerate(s.colors):
        if c.a < 1:
            out.append(f"color {c.name}: a must be a positive integer")
        try:
            w = s.fundamental_weight(k)
        except ValidationError as e:
            out.append(str(e))
            continue
        if w in units:
            out.append(f"color {c.name}: coroot pairings repeat another color's")
        units.add(w)
    return out


@dataclass(frozen=True)
class BStableDivisor:
    gstable: tuple
    colors: tuple

    def __post_init__(self):
        object.__setattr__(self, "gstable", vec(self.gstable))
        object.__setattr__(self, "colors", vec(self.colors))

    @classmethod
    def zero(cls, s: SpaceData) -> "BStableDivisor":
        return cls([0] * s.r, [0] * s.s)

    @classmethod
    def unit(cls, s: SpaceData, i: int) -> "BStableDivisor":
        """The prime divisor of row i (gstable rows first, then colors)."""
        c = [0] * (s.r + s.s)
        c[i] = 1
        return cls(c[: s.r], c[s.r:])

    def check(self, s: SpaceData) -> "BStableDivisor":
        if len(self.gstable) != s.r or len(self.colors) != s.s:
            raise DimensionError(
                f"divisor has {len(self.gstable)}+{len(self.colors)} coefficients, space has {s.r}+{s.s}")
        return self

    @property
    def coefficients(self) -> tuple:
        return self.gstable + self.colors

    def __add__(self, other):
        return BStableDivisor(vadd(self.gstable, other.gstable), vadd(self.colors, other.colors))

    def __sub__(self, other):
        return BStableDivisor(vsub(self.gstable, other.gstable), vsub(self.colors, other.colors))

    def __neg__(self):
        return BStableDivisor([-c for c in self.gstable], [-c for c in self.colors])

    def scale(self, c) -> "BStableDivisor":
        c = Fraction(c)
        return BStableDivisor([c * x for x in self.gstable], [c * x for x in self.colors])

    def restrict(self, idx: Sequence[int]) -> "BStableDivisor":
        return BStableDivisor([self.gstable[i] for i in idx], self.colors)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coefficients)

    def __repr__(self):
        g = ", ".join(map(format_rat, self.gstable))
        c = ", ".join(map(format_rat, self.colors))
        return f"BStableDivisor(gstable=[{g}], colors=[{c}])"


@dataclass(frozen=True)
class MomentQuadruple:
    space: SpaceData
    q_tilde: HPolytope = field(compare=False)
    translation_v: tuple

    def q_vertices(self) -> list[tuple]:
        """Vertices of Q in weight coordinates, in q_tilde order."""
        return [self.to_weight(v.point) for v in self.q_tilde.vertices()]

    def to_weight(self, x: Sequence) -> tuple:
        return vadd(self.translation_v, self.space.embed(x))

    def color_pairing(self, k: int, x: Sequence) -> Fraction:
        """<v + x, alpha_k^vee> for a point x of q_tilde."""
        return self.space.pairing(k, self.to_weight(x))

    def wall_touch(self) -> frozenset:
        r = self.space.r
        return frozenset(k for k in range(self.space.s)
                         if any(r + k in v.tight_rows for v in self.q_tilde.vertices()))


def _q_tilde(s: SpaceData, D: BStableDivisor) -> HPolytope:
    return HPolytope(s.rows(), [-c for c in D.coefficients])


def translation(s: SpaceData, color_coeffs: Sequence) -> tuple:
    v = tuple(Fraction(0) for _ in range(s.weight_dim))
    for k, c in enumerate(color_coeffs):
        if c:
            v = vadd(v, tuple(c * w for w in s.fundamental_weight(k)))
    return v


def build_quadruple(s: SpaceData, D: BStableDivisor, central: Sequence | None = None) -> MomentQuadruple:
    """Moment quadruple of (X, D); ``central`` is an extra translation pairing to zero with every color."""
    D.check(s)
    v = translation(s, D.colors)
    if central is not None:
        central = vec(central)
        if any(s.pairing(k, central) != 0 for k in range(s.s)):
            raise ValidationError("central translation pairs nontrivially with a color")
        v = vadd(v, central)
    p = _q_tilde(s, D)
    if not p.is_bounded():
        raise ValidationError("pseudo-moment polytope is unbounded")
    if p.dimension() != s.n:
        raise ValidationError(f"empty or lower-dimensional polytope (dimension {p.dimension()} < {s.n})")
    verts = p.vertices()
    r = s.r
    for k in range(s.s):
        if all(r + k in v.tight_rows for v in verts):
            raise ValidationError(f"Q contained in wall W_{s.colors[k].name}")
    facets = p.facet_rows()
    faces = {}
    for i in range(r):
        if i not in facets:
            raise ValidationError(f"gstable row {i} ({s.gstable[i].name}) not a facet")
        fv = p.face_vertices({i})
        for k in range(s.s):
            if all(r + k in v.tight_rows for v in fv):
                raise ValidationError(
                    f"gstable row {i} ({s.gstable[i].name}) has its facet in wall W_{s.colors[k].name}")
        key = frozenset(v.point for v in fv)
        if key in faces:
            raise ValidationError(f"duplicate gstable facets: rows {faces[key]} and {i}")
        faces[key] = i
    return MomentQuadruple(s, p, v)


def recover_divisor(q: MomentQuadruple) -> BStableDivisor:
    s = q.space
    colors = [s.pairing(k, q.translation_v) for k in range(s.s)]
    facets = q.q_tilde.facet_rows()
    gs = []
    for i in range(s.r):
        if i not in facets:
            raise ValidationError(f"cannot recover coefficient of row {i}: not a facet")
        v = q.q_tilde.face_vertices({i})[0].point
        gs.append(-dot(q.q_tilde.rows[i], v))
    return BStableDivisor(gs, colors)


def anticanonical(s: SpaceData) -> BStableDivisor:
    return BStableDivisor([1] * s.r, [c.a for c in s.colors])


SING_ORDER = ("klt", "lc_not_klt", "not_lc")


def classify_singularities(delta: BStableDivisor) -> str:
    cs = delta.coefficients
    if all(c < 1 for c in cs):
        return "klt"
    if all(c <= 1 for c in cs):
        return "lc_not_klt"
    return "not_lc"


# ----------------------------------------------------------------- curves

@dataclass(frozen=True)
class EdgeCurve:
    """C_mu for an edge mu of Q; endpoints are points of q_tilde (M-coordinates)."""
    ends: tuple
    rows: frozenset  # rows tight along the whole edge

    kind = "edge"


@dataclass(frozen=True)
class ColorVertexCurve:
    """C_{alpha,v} for a color and a vertex of Q off the wall of that color."""
    color: int
    vertex: tuple
    rows: frozenset  # rows tight at the vertex

    kind = "color_vertex"


def edge_length(q: MomentQuadruple, a: Sequence, b: Sequence) -> Fraction:
    return primitive_and_length(vsub(b, a), LatticeBasis.standard(q.space.n))[1]


def curves(q: MomentQuadruple) -> list[tuple]:
    """(curve, D.C) for every generator of NE(X), D the polarization of q."""
    out = []
    for a, b in q.q_tilde.edges():
        c = EdgeCurve((a.point, b.point), a.tight_rows & b.tight_rows)
        out.append((c, edge_length(q, a.point, b.point)))
    for k in range(q.space.s):
        for v in q.q_tilde.vertices():
            p = q.color_pairing(k, v.point)
            if p > 0:
                out.append((ColorVertexCurve(k, v.point, v.tight_rows), p))
    return out


def describe_curve(q: MomentQuadruple, c) -> dict:
    if isinstance(c, EdgeCurve):
        return {"kind": "edge", "ends": [[format_rat(x) for x in q.to_weight(e)] for e in c.ends]}
    return {"kind": "color_vertex", "color": q.space.colors[c.color].name,
            "vertex": [format_rat(x) for x in q.to_weight(c.vertex)]}


def _curve_value(q_at, c, pts: dict) -> Fraction:
    """D_t . C on the perturbed polytope, given the moved vertices."""
    if isinstance(c, EdgeCurve):
        a, b = (pts[e] for e in c.ends)
        return edge_length(q_at, a, b)
    return q_at.color_pairing(c.color, pts[c.vertex])


def intersect_divisor(q: MomentQuadruple, Dprime: BStableDivisor, c) -> Fraction:
    """Intersection number Dprime . C for a Q-Cartier Dprime."""
    from .family import build_family, is_q_cartier, first_positive_candidate, vertex_paths

    s = q.space
    D = recover_divisor(q)
    Dprime.check(s)
    if not is_q_cartier(s, D, Dprime):
        raise NotQCartierError("divisor is not Q-Cartier on this variety")
    f = build_family(s, D, Dprime)
    c1 = first_positive_candidate(f)
    t = c1 / 2 if c1 is not None else Fraction(1)
    paths = [p for p in vertex_paths(f) if p.lo == 0 and (p.hi is None or p.hi > 0)]
    base = c.ends if isinstance(c, EdgeCurve) else (c.vertex,)
    d0 = _curve_value(q, c, {e: e for e in base})
    vals = []
    for eps in (t, t / 2):
        pts = {}
        for e in base:
            moved = {p.at(eps) for p in paths if p.at(0) == e}
            if len(moved) != 1:
                raise InvariantError(f"vertex {e} splits or vanishes under a Q-Cartier perturbation")
            pts[e] = moved.pop()
        q_eps = MomentQuadruple(s, q.q_tilde, vadd(q.translation_v, translation(s, [eps * x for x in Dprime.colors])))
        vals.append((_curve_value(q_eps, c, pts) - d0) / eps)
    if vals[0] != vals[1]:
        raise InvariantError(f"intersection number depends on epsilon: {vals}")
    return vals[0]


def class_rank(q: MomentQuadruple) -> int:
    facets = q.q_tilde.facet_rows()
    r = sum(1 for i in range(q.space.r) if i in facets)
    return r + q.space.s - q.space.n


def klt_boundary(s: SpaceData, Dprime: BStableDivisor) -> tuple[int, BStableDivisor]:
    """Least m >= 1 with every coefficient of -K - m D' below 1."""
    Dprime.check(s)
    if any(c <= 0 for c in Dprime.coefficients):
        raise ValidationError("klt_boundary needs a strictly effective divisor")
    mK = anticanonical(s)
    m = 1
    for c, e in zip(mK.coefficients, Dprime.coefficients):
        # c - m e < 1  <=>  m > (c - 1) / e
        m = max(m, math.floor((c - 1) / e) + 1)
    return m, mK - Dprime.scale(m)
