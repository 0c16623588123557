"""Randomized invariants; the checks live in properties.py."""
import properties as P


def test_instance_mix():
    ns = {inst[0].n for inst in P.general()}
    assert ns == {1, 2, 3}
    assert len(P.general()) == len(P.nonneg()) == 200
    assert all(inst[0].r + inst[0].s <= 10 for inst in P.general())


def test_vertex_enumeration_matches_oracle():
    assert P.vertex_enumeration() == []


def test_divisor_roundtrip():
    assert P.divisor_roundtrip() == []


def test_facet_interval_convexity():
    assert P.facet_interval_convexity() == []


def test_classes_constant_on_intervals():
    assert P.class_constancy() == []


def test_finiteness_when_c_nonnegative():
    assert P.finiteness() == []
