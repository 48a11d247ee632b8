import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import hyperspaces
from superext.enumeration import enumerate_maximal_invariant_linked, enumerate_mls, sample_mls
from superext.errors import CapacityError, SpecError
from superext.groups import direct_product, make_cyclic
from superext.hyperspace import InclusionHyperspace, MaximalLinkedSystem, at_least, is_linked, upper
from superext.oracles import is_left_ideal, members_of, product_by_unions
from superext.semigroup import (
    check_associativity,
    check_narist,
    check_rectangular_invariant,
    check_stideal,
    check_structure,
    check_trace_vs_brute,
    check_upset_left_ideal,
    idempotents,
    minimal_left_ideals,
    principal_left_ideal,
    product,
    right_zeros,
    superextension,
)

P = MaximalLinkedSystem.principal
MAJ3 = MaximalLinkedSystem.majority(3)


def test_principal_products_follow_the_group():
    g = make_cyclic(4)
    for x in g.elements:
        for y in g.elements:
            assert product(P(4, x), P(4, y), g) == P(4, g.mul(x, y))
    assert product(P(2, 1), P(2, 1), make_cyclic(2)) == P(2, 0)


def test_majority_is_right_zero_on_c3():
    g = make_cyclic(3)
    for f in enumerate_mls(g):
        assert product(f, MAJ3, g) == MAJ3


def test_ground_mismatch():
    with pytest.raises(SpecError):
        product(P(3, 0), P(4, 0), make_cyclic(4))


@given(st.integers(1, 3), st.data())
def test_product_matches_union_formula(n, data):
    g = make_cyclic(n)
    sets = st.lists(st.integers(1, (1 << n) - 1), min_size=1, max_size=4)
    a = InclusionHyperspace(n, data.draw(sets))
    b = InclusionHyperspace(n, data.draw(sets))
    assert set(product(a, b, g)) == product_by_unions(set(a), set(b), g)


def test_product_matches_union_formula_klein():
    k = direct_product(make_cyclic(2), make_cyclic(2))
    fams = enumerate_mls(k)
    for a in fams[::3]:
        for b in fams[::2]:
            assert set(product(a, b, k)) == product_by_unions(set(a), set(b), k)


@given(hyperspaces(min_n=2, max_n=6), st.data())
def test_linked_times_linked_is_linked(a, data):
    g = make_cyclic(a.n)
    b = InclusionHyperspace(a.n, data.draw(st.lists(st.integers(1, (1 << a.n) - 1), min_size=1, max_size=4)))
    if is_linked(a) and is_linked(b):
        assert is_linked(product(a, b, g))


@given(st.integers(2, 8), st.integers(0, 10_000))
def test_random_triples_associate(n, seed):
    g = make_cyclic(n)
    a, b, c = sample_mls(g, 3, seed=seed)
    assert product(product(a, b, g), c, g) == product(a, product(b, c, g), g)


def test_table_matches_direct_products():
    g = make_cyclic(4)
    sx = superextension(g)
    for i, a in enumerate(sx.elements):
        for j, b in enumerate(sx.elements):
            assert sx.elements[sx.table[i, j]] == product(a, b, g)


def test_associativity_exhaustive_c4():
    rep = check_associativity(make_cyclic(4))
    assert rep["ok"] and rep["triples"] == 1728 and rep["exhaustive"]


def test_principal_ideal_examples():
    assert principal_left_ideal(MAJ3, make_cyclic(3)).members == (MAJ3,)
    g4 = make_cyclic(4)
    ideal = principal_left_ideal(P(4, 0), g4, "brute")
    # L * <e> = L, so the ideal is all of lambda(C_4)
    assert len(ideal) == 12
    assert principal_left_ideal(P(4, 0), g4, "trace") == ideal
    g6 = make_cyclic(6)
    for l0 in enumerate_maximal_invariant_linked(g6):
        from superext.enumeration import complete_one

        b = complete_one(l0)
        assert principal_left_ideal(b, g6, "trace").members == principal_left_ideal(b, g6, "brute").members


def test_trace_vs_brute_report():
    rep = check_trace_vs_brute(make_cyclic(4), samples=10)
    assert rep["ok"] and rep["samples"] == 10


def test_minimal_left_ideals_examples():
    (c3,) = minimal_left_ideals(make_cyclic(3))
    assert c3.members == (MAJ3,)
    (c2,) = minimal_left_ideals(make_cyclic(2))
    assert len(c2) == 2
    c6 = minimal_left_ideals(make_cyclic(6))
    assert len(c6) == 9 and {len(i) for i in c6} == {2}
    (c4,) = minimal_left_ideals(make_cyclic(4))
    assert len(c4) == 8


def test_minimal_ideals_are_left_ideals_by_oracle():
    g = make_cyclic(5)
    sx = superextension(g)
    table = sx.table.tolist()
    for ideal in minimal_left_ideals(g):
        idx = {sx.index_of(f) for f in ideal}
        assert is_left_ideal(idx, table, range(len(sx)))


def test_seeded_matches_brute():
    for n in (3, 4, 5, 6):
        g = make_cyclic(n)
        brute = {i.members for i in minimal_left_ideals(g, "brute")}
        seeded = minimal_left_ideals(g, "seeded")
        assert all(i.seeded for i in seeded)
        assert {i.members for i in seeded} <= brute
        if n % 2:
            assert {i.members for i in seeded} == brute


def test_right_zeros_and_idempotents():
    assert right_zeros(make_cyclic(3)) == [MAJ3]
    assert right_zeros(make_cyclic(4)) == []
    assert len(right_zeros(make_cyclic(1))) == 1
    assert len(right_zeros(make_cyclic(7))) == 3
    assert len(idempotents(make_cyclic(3))) == 2
    assert len(idempotents(make_cyclic(5))) == 5
    with pytest.raises(CapacityError):
        idempotents(make_cyclic(7))


def test_narist_examples():
    g = make_cyclic(4)
    rep = check_narist(at_least(4, 3), g)
    witnesses = {w["A"]: w["witness"] for w in rep["witnesses"]}
    assert rep["ok"] and rep["gap_size"] == 6
    assert witnesses[hex(0b0011)] == 2
    assert witnesses[hex(0b0101)] == 1
    rep3 = check_narist(MAJ3, make_cyclic(3))
    assert rep3["ok"] and rep3["gap_size"] == 0


def test_narist_preconditions():
    with pytest.raises(SpecError):
        check_narist(upper(4, [0b1111]), make_cyclic(4))


def test_rectangularity():
    for g in (make_cyclic(2), make_cyclic(3), make_cyclic(4)):
        rep = check_rectangular_invariant(g)
        assert rep["ok"]
    g3 = make_cyclic(3)
    top = upper(3, [0b111])
    assert product(MAJ3, top, g3) == top
    assert product(top, top, g3) == top


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_upset_is_left_ideal(n):
    g = make_cyclic(n)
    for l0 in enumerate_maximal_invariant_linked(g):
        rep = check_upset_left_ideal(l0, g)
        assert rep["ok"] and rep["brute_closed"]


def test_upset_on_c4_has_eight():
    rep = check_upset_left_ideal(at_least(4, 3), make_cyclic(4))
    assert rep["upset_size"] == 8


def test_upset_certificate_detects_non_ideal():
    # not invariant: the up-set of {0,1} on C_4 holds 4 systems but is not a left ideal
    g = make_cyclic(4)
    rep = check_upset_left_ideal(upper(4, [0b0011]), g)
    assert not rep["ok"] and rep["certificate_failures"] and not rep["brute_closed"]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7])
def test_stideal(n):
    rep = check_stideal(make_cyclic(n))
    assert rep["ok"]
    assert rep["odd"] == (n % 2 == 1)
    if n % 2:
        assert rep["ideal_sizes"] == [1] and rep["majority_is_right_zero"]
    else:
        assert rep["invariant_mls"] == [] and 1 not in rep["ideal_sizes"]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_structure(n):
    rep = check_structure(make_cyclic(n))
    assert rep["ok"]


def test_structure_c6_numbers():
    rep = check_structure(make_cyclic(6))
    assert (rep["minimal_left_ideals"], rep["ideal_size"], rep["K_size"]) == (9, 2, 18)


def test_superextension_index_round_trip():
    sx = superextension(make_cyclic(5))
    assert all(sx.index_of(f) == i for i, f in enumerate(sx.elements))
    dense = np.stack([f.as_array() for f in sx.elements])
    assert dense.shape == (81, 32)
    assert all(set(f) == members_of(f.minimal, 5) for f in sx.elements)
