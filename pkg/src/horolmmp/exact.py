"""Exact rational linear algebra and small lattice utilities.

Scalars are :class:`fractions.Fraction` (arbitrary precision, always reduced).
Vectors are plain tuples of ``Fraction``; matrices are :class:`Matrix`, an
immutable row-major container that carries its column count explicitly so
that ``0 x n`` matrices are representable.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionError, LatticeError, ParseError

Rat = Fraction
Vec = tuple  # tuple[Fraction, ...]

_RAT_RE = re.compile(r"^-?[0-9]+(/[0-9]+)?$")


def rat(x) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction. Floats are refused."""
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rat(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def parse_rat(s: str) -> Fraction:
    if not isinstance(s, str) or not _RAT_RE.match(s):
        raise ParseError(f"malformed rational {s!r}")
    if "/" in s:
        p, q = s.split("/")
        if int(q) == 0:
            raise ParseError(f"zero denominator in {s!r}")
        return Fraction(int(p), int(q))
    return Fraction(int(s))


def format_rat(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def vec(xs: Iterable) -> tuple:
    return tuple(rat(x) for x in xs)


def dot(u: Sequence, v: Sequence) -> Fraction:
    if len(u) != len(v):
        raise DimensionError(f"dot of lengths {len(u)} and {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def vadd(u, v):
    if len(u) != len(v):
        raise DimensionError(f"add of lengths {len(u)} and {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v):
    if len(u) != len(v):
        raise DimensionError(f"sub of lengths {len(u)} and {len(v)}")
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, u):
    return tuple(c * a for a in u)


class Matrix:
    """Immutable rational matrix, row-major."""

    __slots__ = ("rows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        rows = tuple(vec(r) for r in rows)
        if ncols is None:
            if not rows:
                raise DimensionError("empty matrix needs an explicit column count")
            ncols = len(rows[0])
        for i, r in enumerate(rows):
            if len(r) != ncols:
                raise DimensionError(f"row {i} has length {len(r)}, expected {ncols}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    def __getitem__(self, i):
        return self.rows[i]

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.ncols == other.ncols and self.rows == other.rows

    def __hash__(self):
        # Fraction hashing is slow and matrices are used as cache keys a lot
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.rows, self.ncols)))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(format_rat(x) for x in r) for r in self.rows)
        return f"Matrix({self.nrows}x{self.ncols}: [{body}])"

    def select(self, idx: Iterable[int]) -> "Matrix":
        return Matrix([self.rows[i] for i in idx], self.ncols)

    def transpose(self) -> "Matrix":
        return Matrix([[r[j] for r in self.rows] for j in range(self.ncols)], self.nrows)

    def apply(self, x: Sequence) -> tuple:
        if len(x) != self.ncols:
            raise DimensionError(f"matrix with {self.ncols} columns applied to vector of length {len(x)}")
        return tuple(dot(r, x) for r in self.rows)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.transpose().rows
        return Matrix([[dot(r, c) for c in cols] for r in self.rows], other.ncols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)


def rref(rows: Sequence[Sequence], ncols: int):
    """Reduced row echelon form. Returns (rows, pivot_columns)."""
    m = [list(map(Fraction, r)) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    rows = list(rows)
    if not rows:
        return 0
    if ncols is None:
        ncols = len(rows[0])
    # clear denominators, then eliminate over the integers (much cheaper than Fractions)
    m = []
    for r in rows:
        d = math.lcm(*(x.denominator for x in r)) if r else 1
        m.append([x.numerator * (d // x.denominator) for x in r])
    rk = 0
    for c in range(ncols):
        p = next((i for i in range(rk, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[rk], m[p] = m[p], m[rk]
        a = m[rk][c]
        for i in range(rk + 1, len(m)):
            b = m[i][c]
            if b:
                row = [a * x - b * y for x, y in zip(m[i], m[rk])]
                g = math.gcd(*row)
                m[i] = [x // g for x in row] if g > 1 else row
        rk += 1
        if rk == len(m):
            break
    return rk


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple]:
    """Basis of {x : M x = 0} (one vector per free column)."""
    r, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, pc in enumerate(piv):
            x[pc] = -r[i][f]
        basis.append(tuple(x))
    return basis


def solve_linear(rows: Sequence[Sequence], b: Sequence, ncols: int) -> tuple | None:
    """One solution of M x = b (free variables set to zero) or None if inconsistent."""
    if len(rows) != len(b):
        raise DimensionError(f"{len(rows)} equations but {len(b)} right-hand sides")
    aug = [list(r) + [rhs] for r, rhs in zip(rows, b)]
    r, piv = rref(aug, ncols + 1)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for i, pc in enumerate(piv):
        x[pc] = r[i][ncols]
    return tuple(x)


def solve_square(A: Matrix, b: Sequence) -> tuple | None:
    """Solve A x = b for square A; None when A is singular."""
    n = A.nrows
    if A.ncols != n:
        raise DimensionError(f"solve_square needs a square matrix, got {A.shape}")
    if len(b) != n:
        raise DimensionError(f"right-hand side has length {len(b)}, expected {n}")
    m = [list(r) + [Fraction(x)] for r, x in zip(A.rows, b)]
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return None
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / piv
                m[i] = [a - f * b_ for a, b_ in zip(m[i], m[c])]
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = m[i][n] - sum((m[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        x[i] = s / m[i][i]
    return tuple(x)


def inverse(A: Matrix) -> Matrix | None:
    """Inverse of a square matrix, None when singular."""
    n = A.nrows
    cols = []
    for j in range(n):
        x = solve_square(A, [1 if i == j else 0 for i in range(n)])
        if x is None:
            return None
        cols.append(x)
    return Matrix(cols, n).transpose() if n else Matrix([], 0)


# ---------------------------------------------------------------- integers

def clear_denominators(v: Sequence) -> tuple[tuple[int, ...], int]:
    """Return (k, L) with k integral and v = k / L, L the lcm of denominators."""
    L = 1
    for x in v:
        L = L * Fraction(x).denominator // math.gcd(L, Fraction(x).denominator)
    return tuple(int(Fraction(x) * L) for x in v), L


def primitive_integer(v: Sequence) -> tuple[int, ...]:
    """Primitive integer vector on the ray of a nonzero rational vector."""
    k, _ = clear_denominators(v)
    g = math.gcd(*k) if k else 0
    if g == 0:
        raise LatticeError("zero vector")
    return tuple(x // g for x in k)


def _column_reduce(rows: list[list[int]], ncols: int):
    """Unimodular column operations bringing ``rows`` to column echelon form.

    Returns (reduced rows, U, rank) with reduced = rows @ U.
    """
    m = [list(r) for r in rows]
    U = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]

    def colop(j, k, a, b, c, d):
        # (col_j, col_k) <- (a col_j + b col_k, c col_j + d col_k)
        for M in (m, U):
            for r in M:
                x, y = r[j], r[k]
                r[j], r[k] = a * x + b * y, c * x + d * y

    piv = 0
    for i in range(len(m)):
        if piv == ncols:
            break
        for k in range(piv + 1, ncols):
            if m[i][k] == 0:
                continue
            x, y = m[i][piv], m[i][k]
            g, s, t = _xgcd(x, y)
            # [s t; -y/g x/g] has determinant 1
            colop(piv, k, s, t, -y // g, x // g)
        if m[i][piv] != 0:
            piv += 1
    return m, U, piv


def _xgcd(a: int, b: int):
    """g = gcd(a, b) >= 0 and s, t with s a + t b = g."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """A Z-basis of {z in Z^ncols : M z = 0}; the result is saturated by construction."""
    if not rows:
        return [tuple(1 if i == j else 0 for i in range(ncols)) for j in range(ncols)]
    _, U, r = _column_reduce([list(map(int, row)) for row in rows], ncols)
    return [tuple(U[i][j] for i in range(ncols)) for j in range(r, ncols)]


def hnf_rows(rows: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """Row Hermite normal form of a full-row-rank integer matrix (zero rows dropped)."""
    m = [list(map(int, r)) for r in rows]
    out = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        # gcd-combine column c over rows r.. into row r
        for i in range(r + 1, len(m)):
            if m[i][c] == 0:
                continue
            a, b = m[r][c], m[i][c]
            g, s, t = _xgcd(a, b)
            ra, rb = m[r], m[i]
            m[r] = [s * x + t * y for x, y in zip(ra, rb)]
            m[i] = [(-b // g) * x + (a // g) * y for x, y in zip(ra, rb)]
        if m[r][c] == 0:
            continue
        if m[r][c] < 0:
            m[r] = [-x for x in m[r]]
        for i in range(r):
            q = m[i][c] // m[r][c]
            if q:
                m[i] = [x - q * y for x, y in zip(m[i], m[r])]
        r += 1
    for row in m[:r]:
        out.append(tuple(row))
    return out


@dataclass(frozen=True)
class LatticeBasis:
    """A sublattice of Z^ambient_dim given by linearly independent integer rows."""

    ambient_dim: int
    basis_rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.basis_rows)
        for r in rows:
            if len(r) != self.ambient_dim:
                raise DimensionError(f"lattice row {r} not of length {self.ambient_dim}")
        if rank(rows, self.ambient_dim) != len(rows):
            raise LatticeError("lattice basis rows are linearly dependent")
        object.__setattr__(self, "basis_rows", rows)

    @property
    def rank(self) -> int:
        return len(self.basis_rows)

    @classmethod
    def standard(cls, n: int) -> "LatticeBasis":
        return cls(n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def embed(self, coords: Sequence) -> tuple:
        """Ambient vector with the given coordinates in this basis."""
        if len(coords) != self.rank:
            raise DimensionError(f"{len(coords)} coordinates for a rank {self.rank} lattice")
        out = [Fraction(0)] * self.ambient_dim
        for c, row in zip(coords, self.basis_rows):
            if c:
                for j, x in enumerate(row):
                    out[j] += c * x
        return tuple(out)

    def coordinates(self, v: Sequence) -> tuple | None:
        """Rational coordinates of v in this basis, or None if v is outside the span."""
        if len(v) != self.ambient_dim:
            raise DimensionError(f"vector of length {len(v)} in ambient dimension {self.ambient_dim}")
        cols = [[row[j] for row in self.basis_rows] for j in range(self.ambient_dim)]
        return solve_linear(cols, vec(v), self.rank)

    def contains(self, v: Sequence) -> bool:
        c = self.coordinates(v)
        return c is not None and all(x.denominator == 1 for x in c)


def primitive_and_length(v: Sequence, lattice: LatticeBasis) -> tuple[tuple, Fraction]:
    """Write v = length * primitive with primitive a primitive vector of the lattice."""
    v = vec(v)
    if all(x == 0 for x in v):
        raise LatticeError("zero vector")
    c = lattice.coordinates(v)
    if c is None:
        raise LatticeError(f"vector {tuple(map(format_rat, v))} is outside the lattice span")
    k, L = clear_denominators(c)
    g = math.gcd(*k)
    prim_coords = tuple(x // g for x in k)
    return tuple(int(x) for x in lattice.embed(prim_coords)), Fraction(g, L)


def lattice_intersect_subspace(lattice: LatticeBasis, subspace_basis: Sequence[Sequence]) -> LatticeBasis:
    """Basis (in row HNF) of span(subspace_basis) intersected with the lattice."""
    k = lattice.rank
    coords = []
    for s in subspace_basis:
        c = lattice.coordinates(vec(s))
        if c is None:
            raise LatticeError("subspace is not inside the rational span of the lattice")
        coords.append(c)
    if not coords or rank(coords, k) == 0:
        return LatticeBasis(lattice.ambient_dim, ())
    # Integer points of the span = integer kernel of the span's annihilator.
    ann = nullspace(coords, k)
    ann_int = [clear_denominators(a)[0] for a in ann]
    ker = integer_kernel(ann_int, k)
    ker = hnf_rows(ker, k)
    rows = [tuple(int(x) for x in lattice.embed(z)) for z in ker]
    return LatticeBasis(lattice.ambient_dim, tuple(hnf_rows(rows, lattice.ambient_dim)))
