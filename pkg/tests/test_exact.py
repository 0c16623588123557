from fractions import Fraction as F
import itertools

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from horolmmp.errors import DimensionError, LatticeError, ParseError
from horolmmp.exact import (
    LatticeBasis,
    Matrix,
    format_rat,
    hnf_rows,
    integer_kernel,
    lattice_intersect_subspace,
    nullspace,
    parse_rat,
    primitive_and_length,
    rank,
    rat,
    solve_linear,
    solve_square,
)

small = st.integers(-6, 6)
rats = st.fractions(min_value=-10, max_value=10, max_denominator=7)


def test_parse_and_format():
    assert parse_rat("-3/6") == F(-1, 2)
    assert format_rat(F(4, 2)) == "2"
    assert format_rat(F(-1, 2)) == "-1/2"
    for bad in ["1.5", " 1", "1/", "a", "1/-2", ""]:
        with pytest.raises(ParseError):
            parse_rat(bad)
    with pytest.raises(ParseError, match="zero denominator"):
        parse_rat("1/0")


def test_rat_refuses_floats():
    with pytest.raises(TypeError):
        rat(0.5)
    assert rat("2/4") == F(1, 2)


@given(rats, rats)
def test_rational_arithmetic_is_exact(a, b):
    assert (a + b) - b == a
    assert parse_rat(format_rat(a)) == a


def test_matrix_shapes():
    m = Matrix([], 3)
    assert m.shape == (0, 3)
    with pytest.raises(DimensionError):
        Matrix([[1, 2], [3]])
    with pytest.raises(DimensionError):
        Matrix([[1, 2]]).apply((1, 2, 3))
    assert Matrix([[1, 2], [3, 4]]).transpose().rows == ((1, 3), (2, 4))


def test_solve_square_examples():
    assert solve_square(Matrix.identity(2), (3, F(-1, 2))) == (3, F(-1, 2))
    assert solve_square(Matrix([[1, -1], [2, 1]]), (-3, 3)) == (0, 3)
    assert solve_square(Matrix([[1, 2], [2, 4]]), (1, 5)) is None
    with pytest.raises(DimensionError):
        solve_square(Matrix([[1, 2]]), (1,))


@settings(max_examples=60)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n),
    st.lists(rats, min_size=n, max_size=n))))
def test_solve_square_against_sympy(data):
    A, b = data
    x = solve_square(Matrix(A), b)
    S = sympy.Matrix(A)
    if S.det() == 0:
        assert x is None
    else:
        assert Matrix(A).apply(x) == tuple(b)
        expect = S.LUsolve(sympy.Matrix([sympy.Rational(v.numerator, v.denominator) for v in b]))
        assert [F(int(e.p), int(e.q)) for e in expect] == list(x)


@settings(max_examples=60)
@given(st.integers(1, 4), st.integers(0, 5), st.data())
def test_rank_nullspace_against_sympy(n, m, data):
    rows = data.draw(st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m))
    S = sympy.Matrix(rows) if rows else sympy.zeros(0, n)
    assert rank(rows, n) == S.rank()
    ker = nullspace(rows, n)
    assert len(ker) == n - S.rank()
    for v in ker:
        assert all(sum(a * x for a, x in zip(r, v)) == 0 for r in rows)


def test_solve_linear_inconsistent():
    assert solve_linear([[1, 1], [1, 1]], (1, 2), 2) is None
    x = solve_linear([[1, 1]], (3,), 2)
    assert x[0] + x[1] == 3


def test_primitive_and_length():
    assert primitive_and_length((2,), LatticeBasis.standard(1)) == ((1,), 2)
    assert primitive_and_length((4, 8), LatticeBasis(2, ((1, 2),))) == ((1, 2), 4)
    # edge [-1, 1] of the SL3 pseudo-moment polytope, M-coordinates
    assert primitive_and_length((2,), LatticeBasis(1, ((1,),)))[1] == 2
    assert primitive_and_length((F(1, 2), 1), LatticeBasis(2, ((1, 2),))) == ((1, 2), F(1, 2))
    with pytest.raises(LatticeError, match="zero vector"):
        primitive_and_length((0, 0), LatticeBasis.standard(2))
    with pytest.raises(LatticeError):
        primitive_and_length((1, 0), LatticeBasis(2, ((1, 2),)))


@given(st.lists(small, min_size=2, max_size=2).filter(any))
def test_primitive_length_property(v):
    L = LatticeBasis(2, ((2, 1), (0, 3)))
    p, ell = primitive_and_length(v, L)
    assert ell > 0 and tuple(ell * x for x in p) == tuple(v)
    c = L.coordinates(p)
    assert all(x.denominator == 1 for x in c)
    import math
    assert math.gcd(*[int(x) for x in c]) == 1


def test_lattice_intersect_examples():
    Z2 = LatticeBasis.standard(2)
    assert lattice_intersect_subspace(Z2, [(1, 0)]).basis_rows == ((1, 0),)
    assert lattice_intersect_subspace(Z2, [(1, 1)]).basis_rows == ((1, 1),)
    assert lattice_intersect_subspace(Z2, [(F(1, 3), F(2, 3))]).basis_rows == ((1, 2),)
    L = lattice_intersect_subspace(LatticeBasis(2, ((1, 2),)), [])
    assert L.rank == 0
    with pytest.raises(LatticeError):
        lattice_intersect_subspace(LatticeBasis(2, ((1, 2),)), [(1, 0)])


@settings(max_examples=40)
@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=2))
def test_lattice_intersect_is_saturated(span):
    L = LatticeBasis(3, ((1, 0, 0), (1, 2, 0), (0, 1, 3)))
    sub = lattice_intersect_subspace(L, span)
    assert sub.rank == rank(span, 3)
    # brute force: every lattice point in the span is an integer combination of the result
    for c in itertools.product(range(-2, 3), repeat=3):
        p = L.embed(c)
        if rank(list(span) + [p], 3) == rank(span, 3):
            assert sub.contains(p)
    for b in sub.basis_rows:
        assert L.contains(b) and rank(list(span) + [b], 3) == rank(span, 3)


def test_integer_kernel_and_hnf():
    ker = integer_kernel([[2, 4, 6]], 3)
    assert len(ker) == 2
    assert all(2 * a + 4 * b + 6 * c == 0 for a, b, c in ker)
    # saturated: together with (1,0,0) the kernel basis is unimodular
    S = sympy.Matrix(ker + [(1, 0, 0)])
    assert abs(S.det()) == 1
    assert hnf_rows([(2, 4), (1, 2)], 2) == [(1, 2)]
