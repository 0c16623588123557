"""Machine-readable run reports (schema horolmmp/1)."""
from __future__ import annotations

from . import __version__
from .exact import format_rat
from .family import Family, Piece
from .io import SCHEMA, InputDocument, divisor_json, document_json, opt_rat, rats
from .mmp import BreakpointEvent, FiberData, MMPReport, MMPStep, Verification
from .model import MomentQuadruple, class_rank, classify_singularities, curves, describe_curve


def piece_json(p: Piece) -> dict:
    return {"lo": format_rat(p.lo), "hi": opt_rat(p.hi), "lo_closed": p.lo_closed, "hi_closed": p.hi_closed,
            "text": p.fmt()}


def quadruple_json(q: MomentQuadruple) -> dict:
    s = q.space
    return {
        "gstable": [g.name for g in s.gstable],
        "colors": [c.name for c in s.colors],
        "lattice_M": [list(r) for r in s.lattice_M.basis_rows],
        "translation_v": rats(q.translation_v),
        "q_tilde_vertices": [rats(v.point) for v in q.q_tilde.vertices()],
        "q_vertices": [rats(v) for v in q.q_vertices()],
        "class_rank": class_rank(q),
    }


def family_json(f: Family) -> dict:
    return {
        "A": [rats(r) for r in f.A],
        "B_tilde": rats(f.B_tilde),
        "C_tilde": rats(f.C_tilde),
        "v0": rats(f.v0),
        "w": rats(f.w),
    }


def _names(f: Family, rows) -> list[str]:
    return [f.space.row_name(i) for i in rows]


def _colors(f: Family, ks) -> list[str]:
    return [f.space.colors[k].name for k in sorted(ks)]


def step_json(f: Family, st: MMPStep) -> dict:
    return {
        "label": st.label,
        "kind": st.kind,
        "interval": piece_json(st.piece),
        "representative_eps": format_rat(st.eps),
        "surviving_gstable": _names(f, st.surviving_gstable),
        "delta_pushforward": divisor_json(st.delta_push),
        "wall_touch": _colors(f, st.wall_touch),
        "quadruple": quadruple_json(st.quadruple),
    }


def fiber_json(f: Family, fd: FiberData) -> dict:
    return {
        "added_wall_colors": _colors(f, fd.added_wall_colors),
        "M1": [list(r) for r in fd.M1.basis_rows],
        "Z": quadruple_json(fd.Z_quadruple),
        "Z_divisor_rows": _names(f, fd.Z_gstable_rows),
        "quotient_coordinates": list(fd.quotient_coords),
        "fiber_polytope": {
            "rows": [rats(r) for r in fd.fiber_polytope.rows],
            "rhs": rats(fd.fiber_polytope.rhs),
            "from_rows": [_names(f, o) for o in fd.fiber_rows],
            "vertices": [rats(v) for v in fd.fiber_vertices()],
            "sample_eps": format_rat(fd.sample_eps),
        },
        "fiber_rank": fd.fiber_rank,
        "fiber_is_point": fd.fiber_is_point,
        "fiber_class_rank": fd.fiber_class_rank,
    }


def event_json(f: Family, ev: BreakpointEvent) -> dict:
    out = {"kind": ev.kind, "eps": opt_rat(ev.eps), "from": ev.left, "to": ev.right}
    if ev.kind == "divisorial":
        out["contracted"] = _names(f, ev.contracted_rows)
    elif ev.kind == "flip":
        before, at, after = ev.wall_touch
        out["wall_touch"] = {"before": _colors(f, before), "at": _colors(f, at), "after": _colors(f, after)}
    elif ev.kind == "fiber_type":
        out["fiber"] = fiber_json(f, ev.fiber)
    else:
        dim, facets, touch, nv = ev.stable_signature
        out["stable_class"] = {"dimension": dim, "facet_rows": _names(f, facets), "wall_touch": _colors(f, touch),
                               "vertices": nv}
        out["note"] = "family combinatorially stabilizes; the run does not terminate"
        out["truncated"] = ev.truncated
    return out


def verification_json(v: Verification) -> dict:
    out = {"name": v.name, "applicable": v.applicable, "ok": v.ok}
    if v.reason:
        out["reason"] = v.reason
    out["checks"] = [{"name": c.name, "ok": c.ok, **c.detail} for c in v.checks]
    return out


def report_json(doc: InputDocument, rep: MMPReport, verifications: list[Verification]) -> dict:
    f, cls = rep.family, rep.classification
    return {
        "schema": SCHEMA,
        "input": document_json(doc),
        "pair": {"certified": rep.pair.certified_pair,
                 "singularities": classify_singularities(rep.pair.delta),
                 "K_plus_delta": divisor_json(rep.pair.log_canonical)},
        "family": family_json(f),
        "candidates": rats(cls.candidates),
        "scan_window": opt_rat(cls.window),
        "breakpoints": rats(cls.breakpoints),
        "eps_max": opt_rat(cls.eps_max),
        "eps_max_reason": cls.eps_max_reason,
        "intervals": [{"interval": piece_json(p), "sample": format_rat(p.sample)} for p in cls.pieces],
        "steps": [step_json(f, s) for s in rep.steps],
        "events": [event_json(f, e) for e in rep.events],
        "verifications": [verification_json(v) for v in verifications],
        "provenance": {"tool": "horolmmp", "version": __version__, "seed": None},
    }


def curves_json(q: MomentQuadruple) -> list[dict]:
    return [{**describe_curve(q, c), "D.C": format_rat(v)} for c, v in curves(q)]
