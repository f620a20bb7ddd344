from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amtypec.groups import ResourceLimit, matrix_group, perm_group
from amtypec.numeric import GF


def s4():
    return perm_group(4, [[1, 2, 3, 0], [1, 0, 2, 3]], name="S4").enumerate()


def sl2(q):
    F = GF(q)
    a = F.mat_from_codes(np.array([[1, 1], [0, 1]]))
    b = F.mat_from_codes(np.array([[1, 0], [1, 1]]))
    return matrix_group(F, [a, b], name="SL2").enumerate()


def test_s4_basics():
    G = s4()
    assert G.order == 24
    assert G.num_classes == 5
    assert sorted(G.class_sizes.tolist()) == [1, 3, 6, 6, 8]
    assert G.exponent == 12
    assert not G.is_abelian()


def test_sl2_3_basics():
    G = sl2(3)
    assert G.order == 24
    assert G.num_classes == 7
    assert sorted(set(G.element_orders.tolist())) == [1, 2, 3, 4, 6]


def test_inverse_and_index():
    G = s4()
    n = G.order
    idx = np.arange(n)
    assert (G.mul_idx(idx, G.inverse) == 0).all()
    assert (G.index(G.elems(idx)) == idx).all()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 23), st.integers(0, 23), st.integers(0, 23))
def test_multiplication_associative(a, b, c):
    G = s4()
    ab_c = G.mul_idx(G.mul_idx(a, b), c)
    a_bc = G.mul_idx(a, G.mul_idx(b, c))
    assert ab_c == a_bc


def test_classes_are_conjugation_orbits():
    G = sl2(3)
    for g in range(G.order):
        perm = G.conj_perm(G.element(g))
        assert (G.class_of[perm] == G.class_of).all()
    assert G.class_sizes.sum() == G.order


def test_power_map_consistent_with_orders():
    G = sl2(5)
    orders = G.element_orders[G.class_reps]
    for k in (2, 3, 5):
        pm = G.power_map(k)
        for c, img in enumerate(pm):
            assert orders[img] == orders[c] // np.gcd(orders[c], k)


def test_budget_is_enforced():
    with pytest.raises(ResourceLimit):
        perm_group(6, [[1, 2, 3, 4, 5, 0], [1, 0, 2, 3, 4, 5]], budget=100).enumerate()


def test_cayley_table_is_latin_square():
    tab = s4().cayley_table()
    assert all(len(set(r)) == 24 for r in tab)
    assert all(len(set(c)) == 24 for c in tab.T)
