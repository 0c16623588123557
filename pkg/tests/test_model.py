from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from horolmmp.errors import NotQCartierError, ValidationError
from horolmmp.exact import LatticeBasis
from horolmmp.model import (
    BStableDivisor,
    Color,
    EdgeCurve,
    GStable,
    SpaceData,
    anticanonical,
    build_quadruple,
    class_rank,
    classify_singularities,
    curves,
    intersect_divisor,
    klt_boundary,
    recover_divisor,
    validate_space,
)

from conftest import SL3_D, div, ex_D, ex_space, sl3_space


def square_space():
    return SpaceData(2, [], LatticeBasis.standard(2),
                     [GStable(f"X{i + 1}", x) for i, x in enumerate([(1, 0), (-1, 0), (0, 1), (0, -1)])])


def test_validate_space(sl3, ex):
    assert validate_space(sl3) == []
    assert validate_space(ex) == []
    bad = sl3_space(((("X1", (2,)), ("X2", (-1,)))))
    assert any("x not primitive" in v for v in validate_space(bad))
    dup = sl3_space(((("X1", (1,)), ("X1", (-1,)))))
    assert any("duplicate name" in v for v in validate_space(dup))
    zero = SpaceData(1, [], LatticeBasis.standard(1), [GStable("X", (0,))])
    assert any("zero" in v for v in validate_space(zero))


def test_validate_flags_color_data():
    s = SpaceData(2, [Color("alpha", (1, 1), 2)], LatticeBasis.standard(2), [])
    assert validate_space(s)
    s = SpaceData(2, [Color("alpha", (1, 0), 0)], LatticeBasis.standard(2), [])
    assert any("positive" in v for v in validate_space(s))


def test_build_quadruple_sl3(sl3):
    q = build_quadruple(sl3, SL3_D)
    assert [v.point for v in q.q_tilde.vertices()] == [(-1,), (1,)]
    assert q.translation_v == (4, 4)
    assert q.q_vertices() == [(3, 2), (5, 6)]
    assert q.q_tilde.rhs == (-1, -1, -4, -4)
    assert q.q_tilde.rows.rows == ((1,), (-1,), (1,), (2,))


def test_build_quadruple_ex1(ex):
    q = build_quadruple(ex, ex_D(3, -3, 2))
    assert [v.point for v in q.q_tilde.vertices()] == [(0, 3), (2, -1), (2, 5)]
    assert q.translation_v == (0, 0)


def test_build_quadruple_errors(sl3, ex):
    # without a color part X1 only bounds [0, 1] at the wall of alpha
    with pytest.raises(ValidationError, match="row 0 .X1. not a facet"):
        build_quadruple(sl3, div([1, 1], [0, 0]))
    point = SpaceData(2, [Color("alpha", (1, 0), 2), Color("beta", (0, 1), 2)], LatticeBasis(2, ()), [])
    with pytest.raises(ValidationError, match="Q contained in wall W_alpha"):
        build_quadruple(point, div([], [0, 2]))
    with pytest.raises(ValidationError, match="lower-dimensional"):
        build_quadruple(sl3, div([0, 0], [4, 4]))
    two = SpaceData(1, [], LatticeBasis.standard(1), [GStable("X1", (1,)), GStable("X2", (-1,)), GStable("X3", (1,))])
    with pytest.raises(ValidationError, match="duplicate gstable facets"):
        build_quadruple(two, div([1, 1, 1]))
    with pytest.raises(ValidationError, match="unbounded"):
        build_quadruple(SpaceData(1, [], LatticeBasis.standard(1), [GStable("X1", (1,))]), div([1]))


def test_recover_divisor(sl3, ex):
    assert recover_divisor(build_quadruple(sl3, SL3_D)) == SL3_D
    assert recover_divisor(build_quadruple(ex, ex_D(3, -3, 2))) == ex_D(3, -3, 2)
    q = build_quadruple(sl3, SL3_D)
    assert recover_divisor(q).gstable[0] == 1


def test_anticanonical(sl3, ex):
    assert anticanonical(ex) == div([1, 1, 1], [2])
    assert anticanonical(sl3) == div([1, 1], [2, 2])
    assert anticanonical(square_space()) == div([1, 1, 1, 1])


def test_classify_singularities():
    assert classify_singularities(div([0, 0, 0], [0])) == "klt"
    assert classify_singularities(div([-1, 0, 0], [1])) == "lc_not_klt"
    assert classify_singularities(div([1, 1, 0], [2])) == "not_lc"


@given(st.lists(st.fractions(-3, 3, max_denominator=4), min_size=4, max_size=4), st.integers(0, 3),
       st.fractions(0, 2, max_denominator=4))
def test_singularity_class_monotone(cs, k, drop):
    from horolmmp.model import SING_ORDER
    before = div(cs[:3], cs[3:])
    after_cs = list(cs)
    after_cs[k] -= drop
    after = div(after_cs[:3], after_cs[3:])
    assert SING_ORDER.index(classify_singularities(after)) <= SING_ORDER.index(classify_singularities(before))


def test_curves_sl3(sl3):
    q = build_quadruple(sl3, SL3_D)
    cs = curves(q)
    vals = [(c.kind, v) for c, v in cs]
    assert vals == [("edge", 2), ("color_vertex", 3), ("color_vertex", 5), ("color_vertex", 2), ("color_vertex", 6)]
    assert [q.to_weight(c.vertex) for c, _ in cs[1:]] == [(3, 2), (5, 6), (3, 2), (5, 6)]
    assert all(v > 0 for _, v in cs)


def test_curves_point_and_unit_edge():
    # SL3 at eps = 1 with Delta = 0 degenerates; use a space where Q is a point only via a rank 0 lattice
    s0 = SpaceData(2, [Color("alpha", (1, 0), 2), Color("beta", (0, 1), 2)], LatticeBasis(2, ()), [])
    q = build_quadruple(s0, div([], [1, 2]))
    assert [c.kind for c, _ in curves(q)] == ["color_vertex", "color_vertex"]
    t = SpaceData(1, [], LatticeBasis.standard(1), [GStable("X1", (1,)), GStable("X2", (-1,))])
    assert [v for _, v in curves(build_quadruple(t, div([0, 1])))] == [1]


def test_intersect_divisor(sl3):
    q = build_quadruple(sl3, SL3_D)
    K = -anticanonical(sl3)
    edge = curves(q)[0][0]
    assert isinstance(edge, EdgeCurve)
    assert intersect_divisor(q, K, edge) == -2
    for c, v in curves(q):
        assert intersect_divisor(q, SL3_D, c) == v
        assert intersect_divisor(q, BStableDivisor.zero(sl3), c) == 0


def test_intersect_divisor_is_linear(ex):
    D = ex_D(3, -4, 2)
    q = build_quadruple(ex, D)
    units = [BStableDivisor.unit(ex, i) for i in range(4)]
    combo = units[0].scale(2) + units[3].scale(F(-1, 3))
    for c, _ in curves(q):
        lhs = intersect_divisor(q, combo, c)
        assert lhs == 2 * intersect_divisor(q, units[0], c) - F(1, 3) * intersect_divisor(q, units[3], c)


def test_intersect_divisor_not_q_cartier(ex):
    q = build_quadruple(ex, ex_D(3, -3, 2))
    with pytest.raises(NotQCartierError):
        intersect_divisor(q, -anticanonical(ex), curves(q)[0][0])


def test_class_rank(sl3, ex):
    assert class_rank(build_quadruple(sl3, SL3_D)) == 3
    assert class_rank(build_quadruple(ex, ex_D(3, -3, 2))) == 2
    t = SpaceData(1, [], LatticeBasis.standard(1), [GStable("X1", (1,)), GStable("X2", (-1,))])
    assert class_rank(build_quadruple(t, div([0, 1]))) == 1


def test_klt_boundary(ex):
    m, delta = klt_boundary(ex, div([1, 1, 1], [1]))
    assert m == 2 and delta == div([-1, -1, -1], [0])
    m, delta = klt_boundary(ex, div([3, 3, 3], [3]))
    assert m == 1
    m, delta = klt_boundary(square_space(), div([1, 1, 1, 1]))
    assert m == 1 and delta == div([0, 0, 0, 0])
    with pytest.raises(ValidationError):
        klt_boundary(ex, div([1, 0, 1], [1]))


def test_divisor_arithmetic(ex):
    a, b = div([1, 2, 3], [4]), div([0, F(1, 2), 0], [1])
    assert a - b + b == a
    assert (-a).scale(-1) == a
    assert a.restrict([0, 2]) == div([1, 3], [4])
    assert BStableDivisor.zero(ex).is_zero()
    with pytest.raises(Exception):
        div([1, 2], [0]).check(ex)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 6), st.integers(-8, -1), st.integers(1, 6), st.fractions(0, 3, max_denominator=3))
def test_roundtrip_ex_space(b1, b2, b3, c):
    s = ex_space()
    D = div([b1, b2, b3], [c])
    try:
        q = build_quadruple(s, D)
    except ValidationError:
        return
    assert recover_divisor(q) == D
