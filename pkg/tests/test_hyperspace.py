import pytest
from hypothesis import given, strategies as st

from conftest import hyperspaces
from superext.enumeration import sample_mls
from superext.errors import SpecError
from superext.groups import make_cyclic
from superext.hyperspace import (
    InclusionHyperspace,
    MaximalLinkedSystem,
    NotMaximalLinkedError,
    at_least,
    embed_on_subgroup,
    is_H_invariant,
    is_invariant,
    is_linked,
    is_maximal_linked,
    majority_on,
    member,
    parse,
    render,
    translate,
    transversal,
    upper,
)
from superext.oracles import members_of, transversal_by_scan


def test_member():
    f = upper(4, [{0, 1}])
    assert member(f, {0, 1, 2})
    assert not member(f, {2, 3})
    assert member(MaximalLinkedSystem.majority(3), {0, 2})


def test_antichain_is_canonical():
    f = InclusionHyperspace(3, [{0, 1}, {0}, {1, 2}])
    assert f.minimal == (0b001, 0b110)
    with pytest.raises(SpecError):
        InclusionHyperspace(3, [])
    with pytest.raises(SpecError):
        InclusionHyperspace(3, [0])


def test_transversal_examples():
    assert transversal(upper(4, [0b1111])).minimal == (1, 2, 4, 8)
    p = MaximalLinkedSystem.principal(4, 0)
    assert transversal(p) == p
    assert transversal(at_least(4, 3)) == at_least(4, 2)


def test_linked_examples():
    assert not is_linked(upper(4, [{0, 1}, {2, 3}]))
    assert is_maximal_linked(MaximalLinkedSystem.majority(3))
    l0 = at_least(4, 3)
    assert is_linked(l0) and not is_maximal_linked(l0)
    assert l0 < transversal(l0)


def test_mls_validation():
    with pytest.raises(NotMaximalLinkedError):
        MaximalLinkedSystem(4, [{0, 1, 2}, {1, 2, 3}, {0, 2, 3}, {0, 1, 3}])


def test_translate_examples():
    g4 = make_cyclic(4)
    f = upper(4, [{0, 1}])
    assert translate(0, f, g4) == f
    assert translate(2, f, g4).minimal == (0b1100,)
    g3 = make_cyclic(3)
    maj = MaximalLinkedSystem.majority(3)
    assert all(translate(x, maj, g3) == maj for x in g3.elements)


def test_invariance_examples():
    assert is_invariant(MaximalLinkedSystem.majority(3), make_cyclic(3))
    assert not is_invariant(MaximalLinkedSystem.principal(2, 0), make_cyclic(2))
    assert is_invariant(at_least(4, 3), make_cyclic(4))


def test_embedded_family_on_subgroup():
    g = make_cyclic(6)
    h = {0, 2, 4}
    a = majority_on(h, 6)
    assert a.minimal == (0b000101, 0b010001, 0b010100)
    assert is_H_invariant(a, g, h) and not is_invariant(a, g)
    # every set meeting all three pairs contains two of {0,2,4}
    assert is_maximal_linked(a)
    assert embed_on_subgroup(MaximalLinkedSystem.principal(3, 1), [0, 2, 4], 6).minimal == (0b100,)


def test_parse_errors():
    with pytest.raises(SpecError):
        parse("not json")
    with pytest.raises(SpecError):
        parse({"n": 3})
    with pytest.raises(SpecError):
        parse({"n": 3, "min": ["0x3", "0x1"]}, strict=True)
    assert parse({"n": 3, "min": ["0x3", "0x1"]}).minimal == (1,)
    with pytest.raises(SpecError):
        parse({"n": 3, "min": ["0x3"]}, cls=MaximalLinkedSystem)


@given(hyperspaces())
def test_transversal_is_involutive(f):
    assert transversal(transversal(f)) == f


@given(hyperspaces())
def test_transversal_matches_scan(f):
    members = set(f)
    assert members == members_of(f.minimal, f.n)
    assert set(transversal(f)) == transversal_by_scan(members, f.n)


@given(hyperspaces())
def test_linked_routes_agree(f):
    assert is_linked(f, "pairwise") == is_linked(f, "transversal")
    assert is_maximal_linked(f, "transversal") == is_maximal_linked(f, "partition")


@given(hyperspaces())
def test_render_parse_round_trip(f):
    assert parse(render(f), strict=True) == f


@given(st.integers(1, 7), st.integers(0, 1000))
def test_sampled_systems_are_maximal_linked(n, seed):
    for f in sample_mls(n, 3, seed=seed):
        assert is_maximal_linked(f, "transversal") and is_maximal_linked(f, "partition")
        assert transversal(f) == f


@given(hyperspaces(max_n=8), st.data())
def test_translate_composes(f, data):
    g = make_cyclic(f.n)
    x = data.draw(st.integers(0, f.n - 1))
    y = data.draw(st.integers(0, f.n - 1))
    assert translate(x, translate(y, f, g), g) == translate(g.mul(x, y), f, g)
    assert translate(g.inverse(x), translate(x, f, g), g) == f


def test_inclusion_order_across_classes():
    l0 = at_least(4, 3)
    f = MaximalLinkedSystem(4, [{0, 1}, {0, 2}, {1, 2}])
    assert l0 <= f and l0 < f and f >= l0 and f > l0
    assert not f <= l0 and not l0 >= f
