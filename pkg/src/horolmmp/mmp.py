"""Log MMP runs read off the polytope family, plus the checks that go with them."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import (
    AnomalyError,
    InvariantError,
    LatticeError,
    PairNotCertifiedError,
    ValidationError,
    ZeroPerturbationError,
)
from .exact import (
    LatticeBasis,
    Matrix,
    dot,
    format_rat,
    lattice_intersect_subspace,
    primitive_integer,
    rank,
    solve_linear,
    solve_square,
    vadd,
    vsub,
)
from .family import (
    EpsilonClassification,
    Family,
    Piece,
    breakpoints,
    build_family,
    candidates,
    general_position_witness,
    is_gh_polytope,
    is_q_cartier,
    is_q_factorial,
    polytope_at,
    wall_touch,
)
from .model import (
    SING_ORDER,
    BStableDivisor,
    EdgeCurve,
    GStable,
    MomentQuadruple,
    SpaceData,
    anticanonical,
    build_quadruple,
    classify_singularities,
    curves,
    describe_curve,
    intersect_divisor,
    recover_divisor,
    translation,
)
from .polytope import HPolytope


@dataclass(frozen=True)
class HorosphericalPair:
    space: SpaceData
    D: BStableDivisor
    delta: BStableDivisor
    certified_pair: bool

    @property
    def log_canonical(self) -> BStableDivisor:
        """K + Delta."""
        return self.delta - anticanonical(self.space)


def make_pair(space: SpaceData, D: BStableDivisor, delta: BStableDivisor) -> HorosphericalPair:
    D.check(space)
    delta.check(space)
    build_quadruple(space, D)
    ok = is_q_cartier(space, D, delta - anticanonical(space))
    return HorosphericalPair(space, D, delta, ok)


@dataclass(frozen=True)
class MMPStep:
    label: str  # "X(i,j)" or "Y(i,j)"
    kind: str  # "X" or "Y"
    i: int
    j: int
    piece: Piece
    eps: Fraction  # representative parameter
    quadruple: MomentQuadruple
    surviving_gstable: tuple  # original row indices
    delta_push: BStableDivisor
    wall_touch: frozenset

    @property
    def log_canonical(self) -> BStableDivisor:
        return self.delta_push - anticanonical(self.quadruple.space)


@dataclass(frozen=True)
class FiberData:
    added_wall_colors: tuple  # color indices
    M1: LatticeBasis  # weight coordinates
    Z_quadruple: MomentQuadruple
    Z_gstable_rows: tuple  # rows of the family giving the G-stable divisors of Z
    fiber_polytope: HPolytope  # quotient coordinates
    fiber_rows: tuple  # family row behind each fiber_polytope row
    quotient_coords: tuple  # standard vectors completing M1 (M-coordinates)
    fiber_rank: int
    fiber_is_point: bool
    fiber_class_rank: int
    sample_eps: Fraction
    sample_v: tuple  # v^eps at the sample; Q = v + M-coordinates, taken modulo M1
    space: SpaceData

    def fiber_vertices(self) -> list[tuple]:
        """Vertices of the projected Q, as weights (representatives modulo M1)."""
        n = self.space.n
        out = []
        for v in self.fiber_polytope.vertices():
            x = [Fraction(0)] * n
            for c, e in zip(v.point, self.quotient_coords):
                x[e] = c
            out.append(vadd(self.sample_v, self.space.embed(x)))
        return out


@dataclass(frozen=True)
class BreakpointEvent:
    eps: Fraction | None
    kind: str  # divisorial | flip | fiber_type | stabilized
    left: str | None
    right: str | None = None
    contracted_rows: tuple = ()
    wall_touch: tuple = ()  # (before, at, after) for flips
    fiber: FiberData | None = None
    stable_signature: tuple | None = None
    truncated: bool = False


@dataclass
class MMPReport:
    pair: HorosphericalPair
    family: Family
    classification: EpsilonClassification
    steps: list = field(default_factory=list)
    events: list = field(default_factory=list)

    @property
    def eps_max(self):
        return self.classification.eps_max

    @property
    def breakpoints(self):
        return self.classification.breakpoints

    def step(self, label: str) -> MMPStep:
        return next(s for s in self.steps if s.label == label)

    def event_kinds(self) -> list[str]:
        return [e.kind for e in self.events]


# ------------------------------------------------------------------ steps

def surviving_gstable(f: Family, eps) -> tuple:
    """G-stable rows that still support a facet of Q~^eps lying in no wall."""
    p = polytope_at(f, eps).q_tilde
    r = f.space.r
    facets = p.facet_rows()
    out = []
    for i in range(r):
        if i not in facets:
            continue
        fv = p.face_vertices({i})
        if any(all(r + k in v.tight_rows for v in fv) for k in range(f.space.s)):
            continue
        out.append(i)
    return tuple(out)


def local_quadruple(f: Family, eps) -> tuple[MomentQuadruple, tuple]:
    """Quadruple of the variety whose polytope is Q^eps, and the surviving rows."""
    surv = surviving_gstable(f, eps)
    space = f.space.with_gstable(surv)
    rhs = f.rhs(eps)
    r = f.space.r
    D = BStableDivisor([-rhs[i] for i in surv], [-rhs[r + k] for k in range(f.space.s)])
    return build_quadruple(space, D), surv


def _make_step(f: Family, pair: HorosphericalPair, kind: str, i: int, j: int, piece: Piece) -> MMPStep:
    q, surv = local_quadruple(f, piece.sample)
    return MMPStep(f"{kind}({i},{j})", kind, i, j, piece, piece.sample, q, surv,
                   pair.delta.restrict(surv), wall_touch(f, piece.sample))


def run(pair: HorosphericalPair, max_epsilon=None) -> MMPReport:
    if not pair.certified_pair:
        raise PairNotCertifiedError("pair not certified: K+Delta is not Q-Cartier")
    Dp = pair.log_canonical
    f = build_family(pair.space, pair.D, Dp)
    if all(c == 0 for c in f.C_tilde) and all(c == 0 for c in f.w):
        raise ZeroPerturbationError("zero perturbation direction")
    if max_epsilon is None:
        max_epsilon = default_window(f)
    cls = breakpoints(f, max_epsilon)
    if cls.anomalies:
        raise AnomalyError("; ".join(cls.anomalies))
    rep = MMPReport(pair, f, cls)
    pieces = list(cls.pieces)
    i = j = 0
    rep.steps.append(_make_step(f, pair, "X", 0, 0, pieces[0]))
    k = 0
    while k + 1 < len(pieces):
        left, nxt = pieces[k], pieces[k + 1]
        eps = left.hi
        if left.hi_closed:
            raise AnomalyError(f"Q^{format_rat(eps)} is equivalent to the left class only")
        if nxt.is_point:
            if k + 2 >= len(pieces):
                raise AnomalyError(f"isolated class at {format_rat(eps)} is not followed by another class")
            right = pieces[k + 2]
            y = _make_step(f, pair, "Y", i, j + 1, nxt)
            x = _make_step(f, pair, "X", i, j + 1, right)
            before = rep.steps[-1]
            rep.events.append(BreakpointEvent(
                eps, "flip", before.label, x.label,
                wall_touch=(before.wall_touch, y.wall_touch, x.wall_touch)))
            rep.steps += [y, x]
            j += 1
            k += 2
        else:
            before = rep.steps[-1]
            x = _make_step(f, pair, "X", i + 1, 0, nxt)
            contracted = tuple(r for r in before.surviving_gstable if r not in x.surviving_gstable)
            if not contracted:
                raise AnomalyError(f"divisorial-type change at {format_rat(eps)} contracts no G-stable divisor")
            rep.events.append(BreakpointEvent(eps, "divisorial", before.label, x.label, contracted_rows=contracted))
            rep.steps.append(x)
            i, j = i + 1, 0
            k += 1
    last = rep.steps[-1]
    if cls.eps_max is not None:
        rep.events.append(BreakpointEvent(cls.eps_max, "fiber_type", last.label, "Z", fiber=fiber_data(f, cls)))
    else:
        rep.events.append(BreakpointEvent(None, "stabilized", last.label, stable_signature=cls.stable_signature,
                                          truncated=cls.truncated))
    return rep


def default_window(f: Family) -> Fraction:
    c = candidates(f)
    return 4 * c[-1] + 1 if c else Fraction(1)


def classify_breakpoint(report: MMPReport, eps) -> BreakpointEvent:
    eps = Fraction(eps)
    for e in report.events:
        if e.eps == eps:
            return e
    raise ValidationError(f"{format_rat(eps)} is not a breakpoint of this run")


# ------------------------------------------------------------------ fiber

def _gap_sample(cls: EpsilonClassification, eps, side: str) -> Fraction:
    """Midpoint of the candidate gap immediately left or right of eps."""
    pts = sorted(set([Fraction(0)] + list(cls.candidates)))
    if side == "left":
        lo = max(p for p in pts if p < eps)
        return (lo + eps) / 2
    higher = [p for p in pts if p > eps]
    return (eps + higher[0]) / 2 if higher else eps + 1


def _completion(U: Sequence[Sequence], n: int) -> list[int]:
    """Lexicographically first standard coordinates completing the rows U to a basis."""
    picked = []
    rows = [list(u) for u in U]
    for e in range(n):
        if len(rows) == n:
            break
        cand = rows + [[1 if t == e else 0 for t in range(n)]]
        if rank(cand, n) == len(cand):
            rows = cand
            picked.append(e)
    return picked


def _fourier_motzkin(rows: list[tuple], rhs: list, origin: list, elim: int) -> tuple[list, list, list]:
    """Eliminate the first ``elim`` coordinates of {x : rows.x >= rhs}."""
    for _ in range(elim):
        pos, neg, zero = [], [], []
        for r, b, o in zip(rows, rhs, origin):
            (pos if r[0] > 0 else neg if r[0] < 0 else zero).append((r, b, o))
        new = [(r[1:], b, o) for r, b, o in zero]
        for rp, bp, op in pos:
            for rn, bn, on in neg:
                a, c = rp[0], -rn[0]
                comb = tuple(c * x + a * y for x, y in zip(rp[1:], rn[1:]))
                new.append((comb, c * bp + a * bn, op + on))
        seen = {}
        for r, b, o in new:
            key = (r, b)
            if key not in seen:
                seen[key] = o
        rows = [k[0] for k in seen]
        rhs = [k[1] for k in seen]
        origin = list(seen.values())
    return rows, rhs, origin


def _project(f: Family, eps, U: list, E: list[int]):
    """Image of Q~^eps in the quotient by span(U), coordinates along E.

    Returns the projected polytope (facet rows only) and, per row, the family
    rows combined into it.
    """
    n = f.space.n
    basis = [tuple(u) for u in U] + [tuple(1 if t == e else 0 for t in range(n)) for e in E]
    rows = [tuple(dot(a, b) for b in basis) for a in f.A]
    origin = [(i,) for i in range(f.A.nrows)]
    rows, rhs, origin = _fourier_motzkin(rows, list(f.rhs(eps)), origin, len(U))
    kept = []
    for r_, b, o in zip(rows, rhs, origin):
        if any(x != 0 for x in r_):
            kept.append((r_, b, tuple(sorted(set(o)))))
        elif b > 0:
            raise InvariantError("projection of a nonempty polytope came out empty")
    p = HPolytope(Matrix([k[0] for k in kept], len(E)), [k[1] for k in kept])
    facets = sorted(p.facet_rows())
    return p.restrict_rows(facets), tuple(kept[i][2] for i in facets)


def _fiber_signature(f: Family, eps, U, E, added):
    """Projected polytope, row origins, and (dim, #facets, #facets in an added wall, #vertices)."""
    p, origin = _project(f, eps, U, E)
    r = f.space.r
    rhs = f.rhs(eps)
    walls = []
    for k in added:
        a = f.A[r + k]
        walls.append((tuple(a[e] for e in E), rhs[r + k]))
    in_wall = 0
    for i in range(p.m):
        fv = p.face_vertices({i})
        if any(all(dot(a, v.point) == b for v in fv) for a, b in walls):
            in_wall += 1
    return p, origin, (p.dimension(), p.m, in_wall, len(p.vertices()))


def fiber_data(f: Family, cls: EpsilonClassification) -> FiberData:
    eps_max = cls.eps_max
    if eps_max is None:
        raise ValidationError("fiber data needs a finite eps_max")
    space = f.space
    n, r = space.n, space.r
    P = polytope_at(f, eps_max).q_tilde
    verts = P.vertices()
    if not verts:
        raise ValidationError("Q^eps_max is empty")
    ok, _ = is_gh_polytope(f, eps_max)
    if ok:
        raise ValidationError("Q^eps_max is a G/H-polytope")
    p0 = verts[0].point
    direction = [vsub(v.point, p0) for v in verts[1:]]
    M1_std = lattice_intersect_subspace(LatticeBasis.standard(n), direction)
    U = [tuple(Fraction(x) for x in row) for row in M1_std.basis_rows]
    M1 = LatticeBasis(space.weight_dim, tuple(tuple(int(x) for x in space.embed(u)) for u in U))
    added = tuple(k for k in range(space.s) if all(r + k in v.tight_rows for v in verts))
    remaining = [k for k in range(space.s) if k not in added]

    # Z: Q^eps_max = varpi + (polytope in M1_Q) with varpi a character of P^1,
    # i.e. pairing to zero with every added color.  M1 columns go first so the
    # particular solution pushes as much of Q as possible into M1.
    q0 = vadd(f.v(eps_max), space.embed(p0))
    added_units = {space.fundamental_weight(k).index(1) for k in added}
    free = [t for t in range(space.weight_dim) if t not in added_units]
    cols = [tuple(Fraction(x) for x in row) for row in M1.basis_rows]
    cols += [tuple(Fraction(int(t == u)) for u in range(space.weight_dim)) for t in free]
    sol = solve_linear([[c[t] for c in cols] for t in range(space.weight_dim)], q0, len(cols))
    if sol is None:
        raise InvariantError("Q^eps_max is not a translate of a polytope in M1_Q by a character of P^1")
    varpi = [Fraction(0)] * space.weight_dim
    for c, t in zip(sol[len(U):], free):
        varpi[t] = c
    varpi = tuple(varpi)
    coeffs = [space.pairing(k, varpi) for k in remaining]
    central = vsub(varpi, translation(space.with_colors(remaining), coeffs))
    z0 = space.lattice_M.coordinates(vsub(varpi, f.v(eps_max)))
    if z0 is None:
        raise InvariantError("Z translation is not in v + M_Q")
    rhs = f.rhs(eps_max)
    facet_rows = P.facet_rows()
    gs, gd, grows = [], [], []
    seen = set()
    for i in sorted(facet_rows):
        fv = P.face_vertices({i})
        if any(all(r + k in v.tight_rows for v in fv) for k in remaining):
            continue
        g = tuple(dot(f.A[i], u) for u in U)
        if all(x == 0 for x in g):
            continue
        x = primitive_integer(g)
        lam = next(a / b for a, b in zip(g, x) if b != 0)
        key = (x, frozenset(v.point for v in fv))
        if key in seen:
            continue
        seen.add(key)
        gs.append(GStable(space.row_name(i), x))
        gd.append(-(rhs[i] - dot(f.A[i], z0)) / lam)
        grows.append(i)
    zspace = SpaceData(space.weight_dim, [space.colors[k] for k in remaining], M1, gs, space.basis_labels)
    Z = build_quadruple(zspace, BStableDivisor(gd, coeffs), central=central)

    E = _completion(U, n)
    t = _gap_sample(cls, eps_max, "left")
    fib, origin, sig = _fiber_signature(f, t, U, E, set(added))
    t2 = (t + eps_max) / 2
    if _fiber_signature(f, t2, U, E, set(added))[2] != sig:
        raise InvariantError("fiber polytope changes inside the last interval")
    fiber_rank = n - len(U)
    in_wall = sig[2]
    fcr = (fib.m - in_wall) + len(added) - fiber_rank
    return FiberData(added, M1, Z, tuple(grows), fib, origin, tuple(E), fiber_rank, fiber_rank == 0, fcr, t,
                     f.v(t), space)


# ------------------------------------------------------------ verification

@dataclass
class Check:
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)


@dataclass
class Verification:
    name: str
    checks: list = field(default_factory=list)
    applicable: bool = True
    reason: str | None = None

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def _vertex_at(f: Family, rows: frozenset, eps) -> tuple:
    """The vertex cut out by ``rows`` at parameter eps (unique by construction)."""
    n = f.space.n
    rhs = f.rhs(eps)
    for J in combinations(sorted(rows), n):
        x = solve_square(f.A.select(J), [rhs[j] for j in J])
        if x is not None:
            return x
    raise InvariantError(f"rows {sorted(rows)} do not cut out a vertex")


def contracted_curves(f: Family, eps_star, side: str):
    """Curves of the variety on one side of eps_star that collapse at eps_star.

    Returns (t, quadruple at t, surviving rows, [curve, ...]).
    """
    pts = [Fraction(0)] + candidates(f)
    if side == "left":
        t = (max(p for p in pts if p < eps_star) + eps_star) / 2
    else:
        higher = [p for p in pts if p > eps_star]
        t = (eps_star + higher[0]) / 2 if higher else eps_star + 1
    q, surv = local_quadruple(f, t)
    # rows of q are surviving gstable rows then all colors; map back to family rows
    back = list(surv) + [f.space.r + k for k in range(f.space.s)]
    verts = {v.point: frozenset(back[i] for i in v.tight_rows) for v in q.q_tilde.vertices()}
    out = []
    for c, _ in curves(q):
        if isinstance(c, EdgeCurve):
            a, b = (_vertex_at(f, verts[e], eps_star) for e in c.ends)
            if a == b:
                out.append(c)
        else:
            x = _vertex_at(f, verts[c.vertex], eps_star)
            w = vadd(f.v(eps_star), f.space.embed(x))
            if f.space.pairing(c.color, w) == 0:
                out.append(c)
    return t, q, surv, out


def _step_log_canonical(pair: HorosphericalPair, q: MomentQuadruple, surv) -> BStableDivisor:
    return pair.delta.restrict(surv) - anticanonical(q.space)


def verify_signs(report: MMPReport) -> Verification:
    out = Verification("signs")
    f, pair = report.family, report.pair
    for ev in report.events:
        if ev.kind == "stabilized":
            continue
        sides = [("left", -1)] + ([("right", 1)] if ev.kind == "flip" else [])
        for side, sign in sides:
            t, q, surv, cs = contracted_curves(f, ev.eps, side)
            name = f"{ev.kind}@{format_rat(ev.eps)}:{side}"
            if not cs:
                out.checks.append(Check(name, False, {"error": "no contracted curve found"}))
                continue
            Dp = _step_log_canonical(pair, q, surv)
            for c in cs:
                val = intersect_divisor(q, Dp, c)
                good = val < 0 if sign < 0 else val > 0
                out.checks.append(Check(name, good, {"curve": describe_curve(q, c), "K+Delta.C": format_rat(val),
                                                     "expected": "<0" if sign < 0 else ">0"}))
    return out


def verify_pair_chain(report: MMPReport) -> Verification:
    out = Verification("pair_chain")
    base = SING_ORDER.index(classify_singularities(report.pair.delta))
    for st in report.steps:
        D_rep = recover_divisor(st.quadruple)
        qc = is_q_cartier(st.quadruple.space, D_rep, st.log_canonical)
        sing = classify_singularities(st.delta_push)
        if st.kind == "X":
            ok = qc and SING_ORDER.index(sing) <= base
        else:
            ok = not qc
        out.checks.append(Check(st.label, ok, {"q_cartier": qc, "singularities": sing}))
    return out


def ray_check(report: MMPReport) -> Verification:
    out = Verification("ray_check")
    pair, f = report.pair, report.family
    if not is_q_factorial(pair.space, pair.D):
        out.applicable, out.reason = False, "not applicable: variety is not Q-factorial"
        return out
    I = general_position_witness(f)
    if I is not None:
        out.applicable = False
        out.reason = f"not applicable: rows {list(I)} are concurrent (B~ not in general position)"
        out.checks.append(Check("general_position", True, {"violating_rows": list(I)}))
        return out
    for ev in report.events:
        if ev.kind == "stabilized":
            continue
        sides = ["left"] + (["right"] if ev.kind == "flip" else [])
        for side in sides:
            t, q, surv, cs = contracted_curves(f, ev.eps, side)
            units = [BStableDivisor.unit(q.space, i) for i in range(q.space.r + q.space.s)]
            vecs = [tuple(intersect_divisor(q, u, c) for u in units) for c in cs]
            ok = bool(vecs) and all(_positive_multiple(a, b) for a, b in combinations(vecs, 2)) \
                and all(any(x != 0 for x in v) for v in vecs)
            out.checks.append(Check(f"{ev.kind}@{format_rat(ev.eps)}:{side}", ok,
                                    {"classes": [[format_rat(x) for x in v] for v in vecs]}))
    return out


def _positive_multiple(a, b) -> bool:
    if len(a) != len(b):
        return False
    lam = None
    for x, y in zip(a, b):
        if y == 0:
            if x != 0:
                return False
            continue
        if lam is None:
            lam = x / y
        elif x != lam * y:
            return False
    return lam is not None and lam > 0


# --------------------------------------------------------------- morphisms

@dataclass(frozen=True)
class OrbitMap:
    psi: dict  # facet row of q -> frozenset of vertex indices of q'
    target_vertices: tuple

    def image(self, rows) -> frozenset:
        out = frozenset(range(len(self.target_vertices)))
        for i in rows:
            out &= self.psi[i]
        return out


def morphism_exists(q: MomentQuadruple, q2: MomentQuadruple) -> OrbitMap | None:
    s, s2 = q.space, q2.space
    if s.weight_dim != s2.weight_dim:
        raise LatticeError("quadruples live in different weight spaces")
    coords = []
    for u in s2.lattice_M.basis_rows:
        c = s.lattice_M.coordinates(u)
        if c is None or any(x.denominator != 1 for x in c):
            raise LatticeError("M' is not contained in M")
        coords.append(c)
    names = {c.name: k for k, c in enumerate(s.colors)}
    for c in s2.colors:
        if c.name not in names:
            raise ValidationError(f"color {c.name} of the target is not a color of the source")
    P, P2 = q.q_tilde, q2.q_tilde
    tv = P2.vertices()
    allv = frozenset(range(len(tv)))
    psi = {}
    for i in sorted(P.facet_rows()):
        g = tuple(dot(P.rows[i], c) for c in coords)
        if all(x == 0 for x in g):
            psi[i] = allv
            continue
        vals = [dot(g, v.point) for v in tv]
        lo = min(vals)
        psi[i] = frozenset(k for k, x in enumerate(vals) if x == lo)
    om = OrbitMap(psi, tuple(v.point for v in tv))
    for v in P.vertices():
        through = [i for i in psi if i in v.tight_rows]
        if not om.image(through):
            return None
    touched = q.wall_touch()
    touched2 = q2.wall_touch()
    for k in touched:
        name = s.colors[k].name
        if name in {c.name for c in s2.colors}:
            k2 = next(t for t, c in enumerate(s2.colors) if c.name == name)
            if k2 not in touched2:
                return None
    return om
