"""Randomized invariants over 200 seeded instances (n <= 3, at most 10 rows).

Each check returns a list of failure descriptions. Results are cached so the
property tests and the acceptance suite share one computation per session.
"""
import random
from fractions import Fraction as F
from functools import lru_cache

from horolmmp.family import breakpoints, facet_interval, is_equivalent, is_gh_polytope, polytope_at
from horolmmp.mmp import default_window
from horolmmp.model import build_quadruple, recover_divisor

from instances import instances
from oracles import brute_vertices

COUNT = 200


@lru_cache(maxsize=None)
def general():
    return tuple(instances(COUNT))


@lru_cache(maxsize=None)
def nonneg():
    return tuple(instances(COUNT, seed=7, nonneg_c=True))


@lru_cache(maxsize=None)
def classified():
    return tuple((inst, breakpoints(inst[3], default_window(inst[3]))) for inst in general())


def _grid(cls, top):
    pts = {F(0)} | set(cls.candidates)
    xs = sorted(p for p in pts if top is None or p <= top)
    grid = set(xs)
    for a, b in zip(xs, xs[1:]):
        grid |= {a + (b - a) * F(k, 8) for k in range(1, 8)}
    grid |= {xs[-1] + F(k, 4) for k in range(1, 5)}
    return sorted(e for e in grid if top is None or e < top)


@lru_cache(maxsize=None)
def vertex_enumeration():
    bad = []
    for k, ((space, D, Dp, f), cls) in enumerate(classified()):
        rows = [list(r) for r in f.A]
        for eps in {F(0), cls.pieces[-1].sample}:
            got = [v.point for v in polytope_at(f, eps).q_tilde.vertices()]
            if got != brute_vertices(rows, list(f.rhs(eps)), space.n):
                bad.append(f"instance {k}: vertices differ at eps={eps}")
    return bad


@lru_cache(maxsize=None)
def divisor_roundtrip():
    return [f"instance {k}" for k, (space, D, _, _) in enumerate(general())
            if recover_divisor(build_quadruple(space, D)) != D]


@lru_cache(maxsize=None)
def facet_interval_convexity():
    bad = []
    for k, ((space, D, Dp, f), cls) in enumerate(classified()):
        top = cls.eps_max if cls.eps_max is not None else cls.window
        grid = _grid(cls, top)
        # one polytope per grid point, shared by every row
        facets = []
        for e in grid:
            p = polytope_at(f, e).q_tilde
            facets.append(p.facet_rows() if p.dimension() == space.n else frozenset())
        for row in range(f.A.nrows):
            hits = [row in fr for fr in facets]
            on = [i for i, h in enumerate(hits) if h]
            if on and on != list(range(on[0], on[-1] + 1)):
                bad.append(f"instance {k} row {row}: sampled facet set is not one run")
                continue
            iv = facet_interval(f, row, cls=cls)
            if iv is None:
                if on:
                    bad.append(f"instance {k} row {row}: facet_interval is empty")
                continue
            lo, hi, lc, hc = iv
            for e, h in zip(grid, hits):
                inside = (lo < e or (lc and e == lo)) and (hi is None or e < hi or (hc and e == hi))
                if inside != h:
                    bad.append(f"instance {k} row {row}: mismatch at eps={e}")
                    break
    return bad


@lru_cache(maxsize=None)
def class_constancy():
    rng = random.Random(11)
    bad = []
    for k, ((space, D, Dp, f), cls) in enumerate(classified()):
        for piece in cls.pieces:
            if piece.is_point:
                continue
            hi = piece.hi if piece.hi is not None else piece.lo + 2 * (cls.window or 1)
            for _ in range(3):
                t = piece.lo + (hi - piece.lo) * F(rng.randint(1, 999), 1000)
                if not (is_gh_polytope(f, t)[0] and is_equivalent(f, piece.sample, t)):
                    bad.append(f"instance {k}: class changes inside {piece.fmt()} at {t}")
    return bad


@lru_cache(maxsize=None)
def finiteness():
    bad = []
    for k, (space, D, Dp, f) in enumerate(nonneg()):
        if not (all(c >= 0 for c in f.C_tilde) and any(c > 0 for c in f.C_tilde)):
            bad.append(f"instance {k}: C~ is not nonnegative and nonzero")
            continue
        cls = breakpoints(f)
        if cls.eps_max is None or cls.eps_max <= 0:
            bad.append(f"instance {k}: no finite positive eps_max")
            continue
        if polytope_at(f, cls.eps_max).q_tilde.is_empty() or is_gh_polytope(f, cls.eps_max)[0]:
            bad.append(f"instance {k}: Q^eps_max should be nonempty and not G/H")
        if not polytope_at(f, cls.eps_max + 1).q_tilde.is_empty():
            bad.append(f"instance {k}: Q^(eps_max+1) is not empty")
    return bad


ALL = {
    "facet-interval convexity": facet_interval_convexity,
    "class constancy": class_constancy,
    "divisor roundtrip": divisor_roundtrip,
    "finiteness": finiteness,
    "vertex enumeration": vertex_enumeration,
}
