"""Exact H-representation polyhedra {x : rows . x >= rhs}.

Vertices are found by exhaustive enumeration of n-subsets of rows, which is
plenty at the sizes this package deals with (a handful of rows, n <= 4).
Row indices are never renumbered: duplicate and redundant rows are kept, and
every result refers to rows by their original index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DimensionError, UnboundedError
from .exact import Matrix, dot, format_rat, rank, rref, vec, vsub


# The cached helpers take integer rows only (cheap to hash) and never see the
# right-hand side, so a parametric family reuses them for every eps.

def _lcm_den(xs) -> int:
    d = 1
    for x in xs:
        d = math.lcm(d, x.denominator)
    return d


def _integral_rows(rows) -> tuple:
    """Each row scaled by a positive integer to clear denominators: (scaled rows, scales)."""
    out, scales = [], []
    for r in rows:
        s = _lcm_den(r)
        out.append(tuple(x.numerator * (s // x.denominator) for x in r))
        scales.append(s)
    return tuple(out), tuple(scales)


def _idet(m: list) -> int:
    """Determinant of a small integer matrix (Bareiss)."""
    m = [list(r) for r in m]
    k = len(m)
    sign, prev = 1, 1
    for c in range(k - 1):
        p = next((i for i in range(c, k) if m[i][c]), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            sign = -sign
        for i in range(c + 1, k):
            for j in range(c + 1, k):
                m[i][j] = (m[i][j] * m[c][c] - m[i][c] * m[c][j]) // prev
        prev = m[c][c]
    return sign * m[k - 1][k - 1] if k else 1


@lru_cache(maxsize=4096)
def _inverses(rows: tuple, k: int) -> tuple:
    """(J, N, den) with rows[J]^-1 = N / den, N integral and den > 0, for every invertible k-subset J."""
    out = []
    for J in combinations(range(len(rows)), k):
        B = [rows[j] for j in J]
        det = _idet(B)
        if det == 0:
            continue
        sg = 1 if det > 0 else -1
        N = [[0] * k for _ in range(k)]
        for i in range(k):
            for j in range(k):
                minor = [[B[a][b] for b in range(k) if b != j] for a in range(k) if a != i]
                N[j][i] = sg * (-1) ** (i + j) * _idet(minor)
        out.append((J, tuple(map(tuple, N)), abs(det)))
    return tuple(out)


@lru_cache(maxsize=4096)
def _rays(rows: tuple, k: int) -> tuple:
    """Extreme rays of {y : rows . y >= 0} as primitive integer vectors, assuming full column rank k."""
    out = set()
    for J in combinations(range(len(rows)), k - 1):
        sub = [rows[j] for j in J]
        # generalized cross product spans the kernel when the rows are independent
        d = [(-1) ** c * _idet([[r[b] for b in range(k) if b != c] for r in sub]) for c in range(k)]
        g = math.gcd(*d)
        if g == 0:
            continue
        d = [x // g for x in d]
        for sgn in (1, -1):
            y = tuple(sgn * x for x in d)
            if all(sum(a * b for a, b in zip(r, y)) >= 0 for r in rows):
                out.add(y)
    return tuple(sorted(out))


@lru_cache(maxsize=4096)
def _pivots(rows: tuple, n: int) -> tuple:
    """Pivot columns of an integer matrix: a basis of its column space."""
    if not rows:
        return ()
    _, piv = rref(rows, n)
    return tuple(piv)


@dataclass(frozen=True)
class VertexRecord:
    point: tuple
    tight_rows: frozenset

    def __repr__(self):
        pt = ", ".join(format_rat(x) for x in self.point)
        return f"VertexRecord(({pt}), tight={sorted(self.tight_rows)})"


class HPolytope:
    """The polyhedron {x in Q^n : rows . x >= rhs}."""

    def __init__(self, rows: Matrix | Sequence[Sequence], rhs: Sequence, ncols: int | None = None):
        if not isinstance(rows, Matrix):
            rows = Matrix(rows, ncols)
        rhs = vec(rhs)
        if len(rhs) != rows.nrows:
            raise DimensionError(f"{rows.nrows} rows but {len(rhs)} right-hand sides")
        self.rows = rows
        self.rhs = rhs

    @property
    def n(self) -> int:
        return self.rows.ncols

    @property
    def m(self) -> int:
        return self.rows.nrows

    def __repr__(self):
        return f"HPolytope(n={self.n}, rows={[list(map(format_rat, r)) for r in self.rows]}, rhs={list(map(format_rat, self.rhs))})"

    def slack(self, i: int, x: Sequence) -> Fraction:
        return dot(self.rows[i], x) - self.rhs[i]

    def contains(self, x: Sequence) -> bool:
        return all(self.slack(i, x) >= 0 for i in range(self.m))

    def tight_at(self, x: Sequence) -> frozenset:
        return frozenset(i for i in range(self.m) if self.slack(i, x) == 0)

    def with_equalities(self, T: Iterable[int]) -> "HPolytope":
        """Same polyhedron intersected with the hyperplanes of rows in T."""
        T = sorted(T)
        rows = list(self.rows) + [tuple(-a for a in self.rows[i]) for i in T]
        rhs = list(self.rhs) + [-self.rhs[i] for i in T]
        return HPolytope(Matrix(rows, self.n), rhs)

    def restrict_rows(self, idx: Iterable[int]) -> "HPolytope":
        idx = list(idx)
        return HPolytope(self.rows.select(idx), [self.rhs[i] for i in idx])

    # -- internal enumeration -------------------------------------------------

    @cached_property
    def _rank(self) -> int:
        return rank(self.rows.rows, self.n) if self.m else 0

    @cached_property
    def _reduced(self) -> tuple[tuple, tuple, list[int]]:
        """Integer rows restricted to a basis of the column space, their scales, and the pivots."""
        irows, scales = _integral_rows(self.rows.rows)
        piv = _pivots(irows, self.n)
        return tuple(tuple(r[j] for j in piv) for r in irows), scales, list(piv)

    def _basic_points(self, rows: tuple, scales: tuple, k: int) -> list[tuple]:
        # integer arithmetic throughout; this loop dominates family scans.
        # row i reads rows[i] . x >= scales[i] * rhs[i]
        rhs = [s * h for s, h in zip(scales, self.rhs)]
        L = _lcm_den(rhs)
        b = [h.numerator * (L // h.denominator) for h in rhs]
        pts = {}
        for J, N, den in _inverses(rows, k):
            bJ = [b[j] for j in J]
            X = [sum(a * c for a, c in zip(r, bJ)) for r in N]
            tight = []
            for i, r in enumerate(rows):
                v = sum(a * c for a, c in zip(r, X)) - den * b[i]
                if v < 0:
                    break
                if v == 0:
                    tight.append(i)
            else:
                g = math.gcd(den * L, *X)
                key = (tuple(c // g for c in X), den * L // g)
                if key not in pts:
                    pts[key] = frozenset(tight)
        pts = {tuple(Fraction(c, q) for c in X): t for (X, q), t in pts.items()}
        self._tight = pts
        return sorted(pts)

    @cached_property
    def _structure(self):
        """(basic points, rays) of the reduced system plus the lineality dimension."""
        red, scales, piv = self._reduced
        k = len(piv)
        pts = self._basic_points(red, scales, k)
        rays = _rays(red, k) if pts and k > 0 else []
        return pts, rays, self.n - k

    def is_empty(self) -> bool:
        return not self._structure[0]

    def is_bounded(self) -> bool:
        pts, rays, lin = self._structure
        return not pts or (lin == 0 and not rays)

    @cached_property
    def _vertices(self) -> tuple:
        pts, rays, lin = self._structure
        if not pts:
            return ()
        if lin or rays:
            raise UnboundedError("unbounded polyhedron has no vertex description")
        return tuple(VertexRecord(p, self._tight[p]) for p in pts)

    def vertices(self) -> list[VertexRecord]:
        return list(self._vertices)

    @cached_property
    def _dimension(self) -> int:
        pts, rays, lin = self._structure
        if not pts:
            return -1
        p0 = pts[0]
        dirs = [vsub(p, p0) for p in pts[1:]] + list(rays)
        k = len(self._reduced[2])
        return (rank(dirs, k) if dirs else 0) + lin

    def dimension(self) -> int:
        return self._dimension

    def face_vertices(self, T: Iterable[int]) -> list[VertexRecord]:
        T = frozenset(T)
        return [v for v in self._vertices if T <= v.tight_rows]

    def face_dim(self, T: Iterable[int]) -> int:
        T = frozenset(T)
        if not T:
            return self.dimension()
        if self.is_bounded():
            return affine_dimension([v.point for v in self.face_vertices(T)], self.n)
        return self.with_equalities(T).dimension()

    @cached_property
    def _facet_rows(self) -> frozenset:
        d = self.dimension()
        if d < 1:
            return frozenset()
        return frozenset(i for i in range(self.m) if self.face_dim({i}) == d - 1)

    def facet_rows(self) -> frozenset:
        return self._facet_rows

    @cached_property
    def _edges(self) -> tuple:
        vs = self._vertices
        out = []
        for a, b in combinations(range(len(vs)), 2):
            T = vs[a].tight_rows & vs[b].tight_rows
            if all(not (T <= v.tight_rows) for i, v in enumerate(vs) if i not in (a, b)):
                out.append((vs[a], vs[b]))
        return tuple(out)

    def edges(self) -> list[tuple[VertexRecord, VertexRecord]]:
        if not self.is_bounded():
            raise UnboundedError("edges requested on an unbounded polyhedron")
        return list(self._edges)


def affine_dimension(points: Sequence[Sequence], n: int) -> int:
    if not points:
        return -1
    p0 = points[0]
    dirs = [vsub(p, p0) for p in points[1:]]
    return rank(dirs, n) if dirs else 0


# Function spellings of the polytope methods.

def vertices(p: HPolytope) -> list[VertexRecord]:
    return p.vertices()


def dimension(p: HPolytope) -> int:
    return p.dimension()


def facet_rows(p: HPolytope) -> frozenset:
    return p.facet_rows()


def face_dim(p: HPolytope, T: Iterable[int]) -> int:
    return p.face_dim(T)


def edges(p: HPolytope) -> list[tuple[VertexRecord, VertexRecord]]:
    return p.edges()
