"""Command line entry point: horolmmp {validate,run,render,query}."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import DimensionError, HorolmmpError, ParseError, PairNotCertifiedError
from .exact import parse_rat
from .family import breakpoints, build_family, is_q_cartier, is_q_factorial
from .io import divisor_argument, divisor_json, dumps, parse_input, rats, validate_document, write_atomic
from .mmp import default_window, make_pair, morphism_exists, ray_check, run, verify_pair_chain, verify_signs
from .model import anticanonical, build_quadruple, class_rank, classify_singularities, klt_boundary
from .render import piece_samples, render_family
from .report import curves_json, report_json


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj))


def _rat_arg(text: str) -> Fraction:
    try:
        return parse_rat(text)
    except ParseError as e:
        raise UsageError(f"bad rational {text!r}: {e}") from None


# ---------------------------------------------------------------- commands

def cmd_validate(args) -> int:
    doc = parse_input(args.file, args.lenient)
    warnings = list(doc.warnings) + validate_document(doc)
    q = build_quadruple(doc.space, doc.D)
    pair = make_pair(doc.space, doc.D, doc.delta)
    _emit({
        "valid": True,
        "warnings": warnings,
        "n": doc.space.n,
        "q_vertices": [rats(v) for v in q.q_vertices()],
        "class_rank": class_rank(q),
        "pair_certified": pair.certified_pair,
        "singularities": classify_singularities(doc.delta),
    })
    return 0


def cmd_run(args) -> int:
    doc = parse_input(args.file, args.lenient)
    pair = make_pair(doc.space, doc.D, doc.delta)
    if not pair.certified_pair:
        raise PairNotCertifiedError("pair not certified: K+Delta is not Q-Cartier")
    rep = run(pair, args.max_epsilon)
    checks = [verify_signs(rep), verify_pair_chain(rep), ray_check(rep)]
    text = dumps(report_json(doc, rep, checks))
    if args.report:
        write_atomic(args.report, text)
    else:
        sys.stdout.write(text)
    if args.svg:
        cls = rep.classification
        eps = piece_samples(cls.pieces, args.samples, cls.window)
        if cls.eps_max is not None:
            eps.append(cls.eps_max)
        ref = cls.eps_max if cls.eps_max is not None else cls.window
        _write_svgs(rep.family, eps, ref, args.svg)
    return 0


def _write_svgs(f, eps, ref, out) -> None:
    files = render_family(f, eps, ref)
    for name in sorted(files):
        write_atomic(Path(out) / name, files[name])


def cmd_render(args) -> int:
    doc = parse_input(args.file, args.lenient)
    if doc.space.weight_dim != 2:
        raise DimensionError("render supports 2D weight spaces only")
    try:
        eps = [parse_rat(t.strip()) for t in args.epsilons.split(",") if t.strip()]
    except ParseError as e:
        raise UsageError(f"bad --epsilons: {e}") from None
    if not eps or any(e < 0 for e in eps):
        raise UsageError("--epsilons needs a comma separated list of rationals >= 0")
    f = build_family(doc.space, doc.D, doc.delta - anticanonical(doc.space))
    ref = max(eps)
    if is_q_cartier(doc.space, doc.D, f.Dperturb):
        try:
            cls = breakpoints(f, default_window(f))
            ref = cls.eps_max if cls.eps_max is not None else max(ref, cls.window)
        except HorolmmpError:
            pass
    _write_svgs(f, eps, ref, args.out)
    _emit({"written": sorted(render_family(f, eps, ref))})
    return 0


def cmd_query(args) -> int:
    doc = parse_input(args.file, args.lenient)
    s = doc.space
    sub = args.subcommand
    if sub == "curves":
        _emit(curves_json(build_quadruple(s, doc.D)))
    elif sub == "singularities":
        _emit({"delta": divisor_json(doc.delta), "class": classify_singularities(doc.delta)})
    elif sub == "qcartier":
        D2 = divisor_argument(doc, _need(args.divisor, "--divisor"))
        _emit(is_q_cartier(s, doc.D, D2))
    elif sub == "qfactorial":
        _emit(is_q_factorial(s, doc.D))
    elif sub == "morphism":
        other = parse_input(_need(args.other, "OTHER"), args.lenient)
        q, q2 = build_quadruple(s, doc.D), build_quadruple(other.space, other.D)
        om = morphism_exists(q, q2)
        if om is None:
            _emit({"exists": False})
        else:
            _emit({"exists": True,
                   "psi": {s.row_name(i): sorted(v) for i, v in sorted(om.psi.items())},
                   "target_vertices": [rats(v) for v in om.target_vertices]})
    elif sub == "klt-boundary":
        m, delta = klt_boundary(s, divisor_argument(doc, _need(args.divisor, "--divisor")))
        _emit({"m": m, "delta": divisor_json(delta), "class": classify_singularities(delta)})
    else:
        raise UsageError(f"unknown query subcommand {sub!r}")
    return 0


def _need(v, what):
    if v is None:
        raise UsageError(f"this query needs {what}")
    return v


QUERIES = ("curves", "singularities", "qcartier", "qfactorial", "morphism", "klt-boundary")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="horolmmp", description="Log MMP of projective horospherical pairs via moment polytopes.")
    p.add_argument("--version", action="version", version=f"horolmmp {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("file", help="input JSON document")
        sp.add_argument("--lenient", action="store_true", help="warn on unknown fields instead of failing")

    v = sub.add_parser("validate", help="parse and validate an input document")
    common(v)
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("run", help="run the Log MMP and write a report")
    common(r)
    r.add_argument("--report", metavar="OUT", help="report path (default: stdout)")
    r.add_argument("--svg", metavar="DIR", help="write SVG snapshots of every interval here")
    r.add_argument("--samples", type=int, default=3, metavar="K", help="snapshots per interval (default 3)")
    r.add_argument("--max-epsilon", type=_rat_arg, metavar="Q", help="scan window for the stabilization check")
    r.set_defaults(func=cmd_run)

    d = sub.add_parser("render", help="SVG snapshots of Q^eps")
    common(d)
    d.add_argument("--epsilons", required=True, help="comma separated rationals, e.g. 0,1/2,1")
    d.add_argument("--out", required=True, metavar="DIR")
    d.set_defaults(func=cmd_render)

    q = sub.add_parser("query", help="single model or family computations")
    common(q)
    q.add_argument("subcommand", help=", ".join(QUERIES))
    q.add_argument("other", nargs="?", help="second input for `morphism`")
    q.add_argument("--divisor", help="K, -K, D, Delta, K+Delta or inline JSON")
    q.set_defaults(func=cmd_query)
    return p


def _error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": {"kind": kind, "message": message}}) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "samples", 1) < 1:
            raise UsageError("--samples must be at least 1")
        return args.func(args)
    except UsageError as e:
        _error("usage", str(e))
        return 2
    except HorolmmpError as e:
        _error(e.kind, str(e))
        return 1
    except OSError as e:
        _error("io", f"{e.strerror}: {e.filename}")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
