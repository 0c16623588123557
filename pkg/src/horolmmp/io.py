"""JSON input documents and report serialization."""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import ParseError
from .exact import LatticeBasis, format_rat, parse_rat
from .model import BStableDivisor, Color, GStable, SpaceData, anticanonical, validate_space

SCHEMA = "horolmmp/1"

_TOP = {"space", "gstable", "divisor_D", "delta", "description"}
_SPACE = {"weight_dim", "basis_labels", "colors", "lattice_M"}
_COLOR = {"name", "coroot_pairings", "a"}
_GSTABLE = {"name", "x"}
_DIVISOR = {"gstable", "colors"}


@dataclass
class InputDocument:
    space: SpaceData
    D: BStableDivisor
    delta: BStableDivisor
    description: str | None = None
    warnings: list = field(default_factory=list)
    source: str | None = None


class _Reader:
    def __init__(self, lenient: bool):
        self.lenient = lenient
        self.warnings = []

    def keys(self, obj, allowed, path, required=()):
        if not isinstance(obj, dict):
            raise ParseError("expected an object", path)
        for k in obj:
            if k not in allowed:
                if self.lenient:
                    self.warnings.append(f"ignoring unknown field {path}.{k}")
                else:
                    raise ParseError(f"unknown field {k!r}", path)
        for k in required:
            if k not in obj:
                raise ParseError(f"missing field {k!r}", path)

    def integer(self, v, path):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ParseError(f"expected an integer, got {json.dumps(v)}", path)
        return v

    def rational(self, v, path) -> Fraction:
        if isinstance(v, bool):
            raise ParseError("expected a rational string", path)
        if isinstance(v, int):
            return Fraction(v)
        if isinstance(v, float):
            raise ParseError(f"decimal number {v!r} is not exact; write it as a \"p/q\" string", path)
        if not isinstance(v, str):
            raise ParseError("expected a rational string", path)
        try:
            return parse_rat(v)
        except ParseError as e:
            raise ParseError(str(e), path) from None

    def array(self, v, path, length=None):
        if not isinstance(v, list):
            raise ParseError("expected an array", path)
        if length is not None and len(v) != length:
            raise ParseError(f"length mismatch: expected {length} entries, got {len(v)}", path)
        return v

    def string(self, v, path):
        if not isinstance(v, str):
            raise ParseError("expected a string", path)
        return v


def load_json(path) -> object:
    data = Path(path).read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError("file is not valid UTF-8", None, e.start) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        offset = len(text[: e.pos].encode("utf-8"))
        raise ParseError(f"malformed JSON: {e.msg}", None, offset) from None


def parse_input(path, lenient: bool = False) -> InputDocument:
    doc = parse_document(load_json(path), lenient)
    doc.source = str(path)
    return doc


def parse_document(obj, lenient: bool = False) -> InputDocument:
    rd = _Reader(lenient)
    rd.keys(obj, _TOP, "$", required=("space", "gstable", "divisor_D"))
    sp = obj["space"]
    rd.keys(sp, _SPACE, "$.space", required=("weight_dim", "colors", "lattice_M"))
    d = rd.integer(sp["weight_dim"], "$.space.weight_dim")
    if d < 0:
        raise ParseError("weight_dim must be non-negative", "$.space.weight_dim")
    labels = None
    if "basis_labels" in sp:
        labels = [rd.string(x, f"$.space.basis_labels[{i}]")
                  for i, x in enumerate(rd.array(sp["basis_labels"], "$.space.basis_labels", d))]
    colors = []
    for k, c in enumerate(rd.array(sp["colors"], "$.space.colors")):
        p = f"$.space.colors[{k}]"
        rd.keys(c, _COLOR, p, required=("name", "coroot_pairings", "a"))
        cp = [rd.integer(x, f"{p}.coroot_pairings[{t}]")
              for t, x in enumerate(rd.array(c["coroot_pairings"], f"{p}.coroot_pairings", d))]
        colors.append(Color(rd.string(c["name"], f"{p}.name"), cp, rd.integer(c["a"], f"{p}.a")))
    rows = []
    for k, row in enumerate(rd.array(sp["lattice_M"], "$.space.lattice_M")):
        p = f"$.space.lattice_M[{k}]"
        rows.append(tuple(rd.integer(x, f"{p}[{t}]") for t, x in enumerate(rd.array(row, p, d))))
    try:
        M = LatticeBasis(d, tuple(rows))
    except ValueError as e:
        raise ParseError(str(e), "$.space.lattice_M") from None
    n = M.rank
    gs = []
    for k, g in enumerate(rd.array(obj["gstable"], "$.gstable")):
        p = f"$.gstable[{k}]"
        rd.keys(g, _GSTABLE, p, required=("name", "x"))
        x = [rd.integer(v, f"{p}.x[{t}]") for t, v in enumerate(rd.array(g["x"], f"{p}.x", n))]
        gs.append(GStable(rd.string(g["name"], f"{p}.name"), x))
    space = SpaceData(d, colors, M, gs, labels)

    def divisor(v, p):
        rd.keys(v, _DIVISOR, p, required=("gstable", "colors"))
        g = [rd.rational(x, f"{p}.gstable[{i}]") for i, x in enumerate(rd.array(v["gstable"], f"{p}.gstable", len(gs)))]
        c = [rd.rational(x, f"{p}.colors[{i}]") for i, x in enumerate(rd.array(v["colors"], f"{p}.colors", len(colors)))]
        return BStableDivisor(g, c)

    D = divisor(obj["divisor_D"], "$.divisor_D")
    delta = divisor(obj["delta"], "$.delta") if "delta" in obj else BStableDivisor.zero(space)
    desc = rd.string(obj["description"], "$.description") if "description" in obj else None
    return InputDocument(space, D, delta, desc, rd.warnings)


def divisor_argument(doc: InputDocument, text: str) -> BStableDivisor:
    """Named divisor (K, -K, D, Delta, K+Delta) or inline JSON {"gstable": [...], "colors": [...]}."""
    s = doc.space
    K = -anticanonical(s)
    named = {"K": K, "-K": -K, "D": doc.D, "Delta": doc.delta, "K+Delta": K + doc.delta}
    if text in named:
        return named[text]
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        raise ParseError(f"unknown divisor {text!r}; use K, -K, D, Delta, K+Delta or inline JSON") from None
    rd = _Reader(False)
    rd.keys(obj, _DIVISOR, "divisor", required=("gstable", "colors"))
    g = [rd.rational(x, f"divisor.gstable[{i}]") for i, x in enumerate(rd.array(obj["gstable"], "divisor.gstable", s.r))]
    c = [rd.rational(x, f"divisor.colors[{i}]") for i, x in enumerate(rd.array(obj["colors"], "divisor.colors", s.s))]
    return BStableDivisor(g, c)


# ----------------------------------------------------------------- output

def rats(xs) -> list[str]:
    return [format_rat(x) for x in xs]


def opt_rat(x) -> str:
    return "+inf" if x is None else format_rat(x)


def space_json(s: SpaceData) -> dict:
    out = {"weight_dim": s.weight_dim}
    if s.basis_labels is not None:
        out["basis_labels"] = list(s.basis_labels)
    out["colors"] = [{"name": c.name, "coroot_pairings": list(c.coroot_pairings), "a": c.a} for c in s.colors]
    out["lattice_M"] = [list(r) for r in s.lattice_M.basis_rows]
    return out


def divisor_json(D: BStableDivisor) -> dict:
    return {"gstable": rats(D.gstable), "colors": rats(D.colors)}


def document_json(doc: InputDocument) -> dict:
    out = {}
    if doc.description is not None:
        out["description"] = doc.description
    out["space"] = space_json(doc.space)
    out["gstable"] = [{"name": g.name, "x": list(g.x)} for g in doc.space.gstable]
    out["divisor_D"] = divisor_json(doc.D)
    out["delta"] = divisor_json(doc.delta)
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def validate_document(doc: InputDocument) -> list[str]:
    return validate_space(doc.space)
