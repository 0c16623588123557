"""The one-parameter family Q~^eps = {x : A x >= B~ + eps C~}, Q^eps = v^eps + Q~^eps.

Combinatorics only change at finitely many parameters: the endpoints of the
validity intervals of the parametric vertices v_J(eps) = A_J^{-1}(B~_J + eps C~_J).
Everything here samples the family at those endpoints and at one interior
point of every gap between them.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .errors import InvariantError, ValidationError
from .exact import Matrix, dot, format_rat, solve_linear, solve_square, vadd, vscale
from .model import BStableDivisor, SpaceData, build_quadruple, translation
from .polytope import HPolytope, affine_dimension


@dataclass(frozen=True)
class Family:
    space: SpaceData
    A: Matrix
    B_tilde: tuple
    C_tilde: tuple
    v0: tuple
    w: tuple
    D: BStableDivisor
    Dperturb: BStableDivisor

    def rhs(self, eps) -> tuple:
        return tuple(b + eps * c for b, c in zip(self.B_tilde, self.C_tilde))

    def v(self, eps) -> tuple:
        return vadd(self.v0, vscale(eps, self.w))

    def divisor_at(self, eps) -> BStableDivisor:
        """D + eps D', the divisor whose polytope is Q^eps."""
        return self.D + self.Dperturb.scale(eps)

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.A, self.B_tilde, self.C_tilde, self.v0, self.w))
            object.__setattr__(self, "_hash", h)
        return h


def build_family(s: SpaceData, D: BStableDivisor, Dperturb: BStableDivisor) -> Family:
    q = build_quadruple(s, D)
    Dperturb.check(s)
    C = tuple(-c for c in Dperturb.coefficients)
    return Family(s, q.q_tilde.rows, q.q_tilde.rhs, C, q.translation_v,
                  translation(s, Dperturb.colors), D, Dperturb)


@dataclass(frozen=True)
class Snapshot:
    eps: Fraction
    q_tilde: HPolytope
    v: tuple

    def q_vertices(self, space: SpaceData) -> list[tuple]:
        return [vadd(self.v, space.embed(x.point)) for x in self.q_tilde.vertices()]


@lru_cache(maxsize=4096)
def _polytope(A: Matrix, rhs: tuple) -> HPolytope:
    return HPolytope(A, rhs)


def polytope_at(f: Family, eps) -> Snapshot:
    eps = Fraction(eps)
    if eps < 0:
        raise ValueError("the family is only defined for eps >= 0")
    return Snapshot(eps, _polytope(f.A, f.rhs(eps)), f.v(eps))


@dataclass(frozen=True)
class VertexPath:
    J: tuple
    base: tuple
    slope: tuple
    lo: Fraction
    hi: Fraction | None  # None = +infinity

    def at(self, eps) -> tuple:
        return tuple(b + eps * s for b, s in zip(self.base, self.slope))

    def covers(self, eps) -> bool:
        return self.lo <= eps and (self.hi is None or eps <= self.hi)


@lru_cache(maxsize=512)
def _vertex_paths(f: Family) -> tuple:
    A, B, C = f.A, f.B_tilde, f.C_tilde
    n, m = A.ncols, A.nrows
    out = []
    for J in combinations(range(m), n):
        AJ = A.select(J)
        base = solve_square(AJ, [B[j] for j in J])
        if base is None:
            continue
        slope = solve_square(AJ, [C[j] for j in J])
        lo, hi = Fraction(0), None
        ok = True
        for i in range(m):
            # slack p + eps q >= 0
            p = dot(A[i], base) - B[i]
            q = dot(A[i], slope) - C[i]
            if q == 0:
                if p < 0:
                    ok = False
                    break
            elif q > 0:
                lo = max(lo, -p / q)
            else:
                hi = -p / q if hi is None else min(hi, -p / q)
        if ok and (hi is None or lo <= hi):
            out.append(VertexPath(J, base, slope, lo, hi))
    return tuple(out)


def vertex_paths(f: Family) -> list[VertexPath]:
    return list(_vertex_paths(f))


def candidates(f: Family) -> list[Fraction]:
    """Positive finite endpoints of all vertex paths, sorted."""
    pts = set()
    for p in _vertex_paths(f):
        for e in (p.lo, p.hi):
            if e is not None and e > 0:
                pts.add(e)
    return sorted(pts)


def first_positive_candidate(f: Family) -> Fraction | None:
    c = candidates(f)
    return c[0] if c else None


# ------------------------------------------------------------- predicates

def wall_touch(f: Family, eps) -> frozenset:
    """Colors (by index) whose row is tight at some vertex of Q~^eps."""
    p = polytope_at(f, eps).q_tilde
    r = f.space.r
    return frozenset(k for k in range(f.space.s) if any(r + k in v.tight_rows for v in p.vertices()))


def is_gh_polytope(f: Family, eps) -> tuple[bool, str]:
    p = polytope_at(f, eps).q_tilde
    n = f.space.n
    d = p.dimension()
    if d < 0:
        return False, "empty"
    reasons = []
    if d < n:
        reasons.append(f"dimension {d} < {n}")
    r = f.space.r
    verts = p.vertices()
    for k, c in enumerate(f.space.colors):
        if all(r + k in v.tight_rows for v in verts):
            reasons.append(f"contained in wall W_{c.name}")
    if reasons:
        return False, "; ".join(reasons)
    return True, "ok"


def signature(f: Family, eps) -> tuple:
    p = polytope_at(f, eps).q_tilde
    return (p.dimension(), tuple(sorted(p.facet_rows())), tuple(sorted(wall_touch(f, eps))), len(p.vertices()))


def _face_dims(p: HPolytope, F: tuple) -> dict:
    verts = p.vertices()
    memo = {}
    out = {}
    for k in range(len(F) + 1):
        for T in combinations(F, k):
            Ts = frozenset(T)
            key = frozenset(i for i, v in enumerate(verts) if Ts <= v.tight_rows)
            if key not in memo:
                memo[key] = affine_dimension([verts[i].point for i in sorted(key)], p.n)
            out[T] = memo[key]
    return out


def is_equivalent(f: Family, e1, e2) -> bool:
    e1, e2 = Fraction(e1), Fraction(e2)
    for e in (e1, e2):
        ok, why = is_gh_polytope(f, e)
        if not ok:
            raise ValidationError(f"Q^{format_rat(e)} is not a G/H-polytope ({why})")
    if e1 == e2:
        return True
    if wall_touch(f, e1) != wall_touch(f, e2):
        return False
    p1, p2 = polytope_at(f, e1).q_tilde, polytope_at(f, e2).q_tilde
    F = tuple(sorted(p1.facet_rows() & p2.facet_rows()))
    for p in (p1, p2):
        sub = p.restrict_rows(F)
        if not sub.is_bounded() or sub.is_empty():
            return False
        if [v.point for v in sub.vertices()] != [v.point for v in p.vertices()]:
            return False
    return _face_dims(p1, F) == _face_dims(p2, F)


# ---------------------------------------------------------- classification

@dataclass(frozen=True)
class Piece:
    """A maximal run of equivalent cells: (lo, hi) with closedness flags."""
    lo: Fraction
    hi: Fraction | None
    lo_closed: bool
    hi_closed: bool
    sample: Fraction
    signature: tuple

    @property
    def is_point(self) -> bool:
        return self.hi == self.lo and self.lo_closed and self.hi_closed

    def contains(self, eps) -> bool:
        if eps < self.lo or (eps == self.lo and not self.lo_closed):
            return False
        if self.hi is None:
            return True
        return eps < self.hi or (eps == self.hi and self.hi_closed)

    def fmt(self) -> str:
        hi = "+inf" if self.hi is None else format_rat(self.hi)
        if self.is_point:
            return "{" + format_rat(self.lo) + "}"
        return ("[" if self.lo_closed else "(") + format_rat(self.lo) + ", " + hi + ("]" if self.hi_closed else ")")


@dataclass(frozen=True)
class EpsilonClassification:
    breakpoints: tuple
    pieces: tuple
    eps_max: Fraction | None
    eps_max_reason: str | None
    candidates: tuple
    stable_signature: tuple | None
    window: Fraction | None
    truncated: bool
    anomalies: tuple

    @property
    def intervals(self) -> list[tuple]:
        return [(p.lo, p.hi, p.signature) for p in self.pieces]


def _cells(cands: Sequence[Fraction], tail: Fraction | None):
    """(sample, lo, hi, is_point) for {0}, the gaps and the candidate points."""
    cells = [(Fraction(0), Fraction(0), Fraction(0), True)]
    prev = Fraction(0)
    for c in cands:
        cells.append(((prev + c) / 2, prev, c, False))
        cells.append((c, c, c, True))
        prev = c
    cells.append((tail if tail is not None else prev + 1, prev, None, False))
    return cells


def breakpoints(f: Family, max_epsilon=None) -> EpsilonClassification:
    cands = candidates(f)
    window = None if max_epsilon is None else Fraction(max_epsilon)
    truncated = False
    tail = None
    if window is not None and cands and cands[-1] > window:
        kept = [c for c in cands if c <= window]
        nxt = cands[len(kept)]
        tail = ((kept[-1] if kept else Fraction(0)) + nxt) / 2
        cands_scan = kept
        truncated = True
    else:
        cands_scan = cands
    cells = _cells(cands_scan, tail)

    eps_max, reason = None, None
    anomalies = []
    scanned = []
    for cell in cells:
        sample, lo, hi, is_point = cell
        ok, why = is_gh_polytope(f, sample)
        if not ok:
            if is_point:
                eps_max = sample
            else:
                # G/H-polytopes form an open set, so a failing gap right after
                # a passing endpoint should not happen.
                eps_max = lo
                anomalies.append(f"gap ({format_rat(lo)}, ...) fails while its left endpoint passes")
            reason = why
            break
        scanned.append(cell)

    pieces = []
    cur = None  # [lo, hi, lo_closed, hi_closed, sample, sig, last_sample, rep_is_gap]
    for sample, lo, hi, is_point in scanned:
        if cur is not None and is_equivalent(f, cur[6], sample):
            cur[1] = hi
            cur[3] = is_point
            cur[6] = sample
            if not is_point and not cur[7]:
                cur[4], cur[7] = sample, True
            continue
        if cur is not None:
            pieces.append(cur)
        cur = [lo, hi, is_point, is_point, sample, None, sample, not is_point]
    if cur is not None:
        pieces.append(cur)
    out = []
    for lo, hi, lc, hc, sample, _, _, _ in pieces:
        out.append(Piece(lo, hi, lc, hc, sample, signature(f, sample)))
    if eps_max is not None and out and (out[-1].hi != eps_max or out[-1].hi_closed):
        raise InvariantError("last piece does not end at eps_max")
    bps = set()
    for p in out[:-1]:
        bps.add(p.hi)
    if eps_max is not None:
        bps.add(eps_max)
    stable = None
    if eps_max is None and out:
        stable = out[-1].signature
    return EpsilonClassification(tuple(sorted(bps)), tuple(out), eps_max, reason, tuple(cands),
                                 stable, window, truncated, tuple(anomalies))


def facet_interval(f: Family, row: int, eps_max=None, cls: EpsilonClassification | None = None):
    """{eps in [0, eps_max) : row is a facet of Q~^eps} as a Piece-like tuple, or None.

    Returns (lo, hi, lo_closed, hi_closed); hi None means unbounded.  Only
    full-dimensional members of the family are considered, so eps_max itself
    never belongs to the set.
    """
    if cls is None:
        cls = breakpoints(f)
    top = cls.eps_max if eps_max is None else Fraction(eps_max)
    cands = [c for c in cls.candidates if top is None or c < top]
    cells = _cells(cands, None)
    if top is not None:
        # the last gap ends at eps_max, not at +inf
        s, lo, _, _ = cells[-1]
        cells[-1] = ((lo + top) / 2, lo, top, False)
    hits = []
    for sample, lo, hi, is_point in cells:
        p = polytope_at(f, sample).q_tilde
        hits.append(p.dimension() == f.space.n and row in p.facet_rows())
    idx = [i for i, h in enumerate(hits) if h]
    if not idx:
        return None
    if idx != list(range(idx[0], idx[-1] + 1)):
        raise InvariantError(f"facet set of row {row} is not an interval")
    first, last = cells[idx[0]], cells[idx[-1]]
    lo = first[1]
    lo_closed = first[3]
    hi = last[2]
    hi_closed = last[3]
    return (lo, hi, lo_closed, hi_closed)


# ------------------------------------------------------- Cartier / factorial

def _small_eps_equivalent(f: Family) -> bool:
    c1 = first_positive_candidate(f)
    t = c1 / 2 if c1 is not None else Fraction(1)
    ok, _ = is_gh_polytope(f, t)
    return ok and is_equivalent(f, 0, t)


def is_q_cartier(s: SpaceData, D: BStableDivisor, Dprime: BStableDivisor) -> bool:
    plus = _small_eps_equivalent(build_family(s, D, Dprime))
    minus = _small_eps_equivalent(build_family(s, D, -Dprime))
    if plus != minus:
        raise InvariantError("Q-Cartier test disagrees between D' and -D'")
    return plus


def is_q_factorial(s: SpaceData, D: BStableDivisor) -> bool:
    return all(is_q_cartier(s, D, BStableDivisor.unit(s, i)) for i in range(s.r + s.s))


def general_position_witness(f: Family) -> tuple | None:
    """An (n+1)-subset of rows whose equalities have a common solution, if any."""
    n, m = f.A.ncols, f.A.nrows
    for I in combinations(range(m), n + 1):
        if solve_linear([f.A[i] for i in I], [f.B_tilde[i] for i in I], n) is not None:
            return I
    return None


def general_position(f: Family) -> bool:
    return general_position_witness(f) is None
