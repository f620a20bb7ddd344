from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amtypec.amcore import torus_setup
from amtypec.chartab import (
    CharacterTable,
    brauer_map,
    central_characters,
    ell_blocks,
    equivariant_extension_map,
    extension_search,
    fusion,
    induce,
    induce_restrict,
    is_normal,
    restrict,
)
from amtypec.groups import matrix_group, perm_group
from amtypec.numeric import GF, InvalidArgument


def cyclic(n):
    return perm_group(n, [np.roll(np.arange(n), 1)], name=f"C{n}").enumerate()


def dihedral(n):
    r = np.roll(np.arange(n), 1)
    s = (-np.arange(n)) % n
    return perm_group(n, [r, s], name=f"D{2 * n}").enumerate()


def symmetric(n):
    return perm_group(n, [np.roll(np.arange(n), 1), [1, 0] + list(range(2, n))], name=f"S{n}").enumerate()


def sl2(q):
    F = GF(q)
    a = F.mat_from_codes(np.array([[1, 1], [0, 1]]))
    b = F.mat_from_codes(np.array([[1, 0], [1, 1]]))
    return matrix_group(F, [a, b], name="SL2").enumerate()


def degrees(G):
    return sorted(CharacterTable(G).degrees.tolist())


# -- tables ---------------------------------------------------------------


def test_small_degree_multisets():
    assert degrees(cyclic(2)) == [1, 1]
    assert degrees(symmetric(3)) == [1, 1, 2]
    assert degrees(dihedral(4)) == [1, 1, 1, 1, 2]
    assert degrees(sl2(3)) == [1, 1, 1, 2, 2, 2, 3]
    assert degrees(symmetric(4)) == [1, 1, 2, 3, 3]
    assert degrees(sl2(5)) == [1, 2, 2, 3, 3, 4, 4, 5, 6]


@settings(max_examples=12, deadline=None)
@given(st.sampled_from(["C", "D", "S"]), st.integers(2, 9))
def test_table_invariants(family, n):
    if family == "S" and n > 5:
        n = 5
    G = {"C": cyclic, "D": dihedral, "S": symmetric}[family](max(n, 3) if family != "C" else n)
    t = CharacterTable(G)
    cert = t.verify()
    assert cert["sum_of_squares"] and cert["row_orthogonality"] and cert["column_orthogonality"]
    X = t.complex_table()
    h = t.classes.sizes
    gram = (X * h) @ X.conj().T / G.order
    assert np.allclose(gram, np.eye(len(t)), atol=1e-8)
    assert int((t.degrees**2).sum()) == G.order
    assert all(G.order % int(d) == 0 for d in t.degrees)


def test_table_is_deterministic():
    a = CharacterTable(sl2(5)).to_dict()
    b = CharacterTable(sl2(5)).to_dict()
    assert a == b


def test_class_function_arithmetic():
    t = CharacterTable(symmetric(3))
    terms = [c * t.class_function([c.degree] * t.classes.count) for c in t.characters()]
    reg = terms[0]
    for f in terms[1:]:
        reg = reg + f
    # the regular character vanishes off the identity
    vals = reg.complex()
    assert np.isclose(vals[0], 6)
    assert np.allclose(vals[1:], 0)


# -- induction and restriction -------------------------------------------


def test_induce_trivial_of_c2():
    G = symmetric(3)
    H = G.subgroup([[1, 0, 2]], name="C2").enumerate()
    Ht, Gt = CharacterTable(H), CharacterTable(G)
    res = induce_restrict(Ht.character(Ht.trivial_index), Gt, "induce")
    assert res.function.degree == 3
    assert sorted(Gt.degrees[i] for i, m in res.constituents() for _ in range(m)) == [1, 2]


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10), st.integers(0, 10))
def test_frobenius_reciprocity(i, j):
    G = symmetric(4)
    H = G.subgroup([[1, 2, 0, 3], [1, 0, 2, 3]], name="S3").enumerate()
    Gt, Ht = CharacterTable(G), CharacterTable(H)
    fus = fusion(Ht, Gt)
    psi = Ht.character(i % len(Ht))
    chi = Gt.character(j % len(Gt))
    lhs = Gt.inner(induce(psi, Gt, fus), chi)
    rhs = Ht.inner(psi, restrict(chi, Ht, fus))
    assert lhs == rhs


def test_induce_restrict_direction_checked():
    t = CharacterTable(cyclic(3))
    with pytest.raises(InvalidArgument):
        induce_restrict(t.character(0), t, "sideways")


def test_induction_from_torus_with_trivial_stabilizer():
    setup = torus_setup(2, 7)
    lam = setup.torus_character((1, 2))
    assert len(setup.ext.stabilizer_indices(lam)) == setup.T.order
    ind = induce(setup.Tt.character(lam), setup.Nt, setup.fus_TN)
    dec = setup.Nt.decompose(ind)
    assert dec.sum() == 1
    assert ind.degree == setup.N.order // setup.T.order


# -- blocks ---------------------------------------------------------------


def test_blocks_cyclic_10():
    bp = ell_blocks(CharacterTable(cyclic(10)), 5)
    assert bp.count == 2
    assert sorted(len(b) for b in bp.blocks) == [5, 5]
    assert bp.root_choice_invariant


def test_blocks_s3_at_3():
    t = CharacterTable(symmetric(3))
    bp = ell_blocks(t, 3)
    assert bp.count == 1
    assert bp.defects[bp.principal] == 1
    bp2 = ell_blocks(t, 2)
    assert bp2.count == 2


def test_blocks_sl2_5():
    bp = ell_blocks(CharacterTable(sl2(5)), 5)
    # the Steinberg character sits alone in a block of defect zero
    assert sorted(len(b) for b in bp.blocks) == [1, 4, 4]
    assert sorted(bp.defects) == [0, 1, 1]


def test_central_characters_integral():
    t = CharacterTable(sl2(5))
    om = central_characters(t)
    assert om.shape[:2] == (len(t), t.classes.count)


def test_brauer_map_principal_to_principal():
    G = symmetric(4)
    H = G.subgroup([[1, 2, 0, 3], [1, 0, 2, 3]], name="S3").enumerate()
    Gt, Ht = CharacterTable(G), CharacterTable(H)
    bH, bG = ell_blocks(Ht, 3), ell_blocks(Gt, 3)
    assert brauer_map(bH.principal, bH, bG) == bG.principal
    # at 2 the centralizer of the defect group leaves S3, and the induced
    # central character matches no block of S4
    bH, bG = ell_blocks(Ht, 2), ell_blocks(Gt, 2)
    assert brauer_map(bH.principal, bH, bG) is None


def test_brauer_map_transitive():
    G = symmetric(4)
    K = G.subgroup([[1, 0, 3, 2], [2, 3, 0, 1]], name="V").enumerate()
    H = G.subgroup([[1, 2, 3, 0], [2, 1, 0, 3]], name="D8").enumerate()
    Gt, Ht, Kt = (CharacterTable(X) for X in (G, H, K))
    bG, bH, bK = (ell_blocks(t, 2) for t in (Gt, Ht, Kt))
    for b in range(bK.count):
        mid = brauer_map(b, bK, bH)
        direct = brauer_map(b, bK, bG)
        if mid is not None and direct is not None:
            assert brauer_map(mid, bH, bG) == direct


# -- extensions -----------------------------------------------------------


def test_central_character_of_d8_does_not_extend():
    G = dihedral(4)
    Z = G.subgroup([[2, 3, 0, 1]], name="Z").enumerate()
    assert is_normal(Z, G)
    Zt = CharacterTable(Z)
    lam = 1 - Zt.trivial_index
    rec = extension_search(Z, G, lam, Zt)
    assert rec.orbit_size == 1
    assert not rec.extendible
    triv = extension_search(Z, G, Zt.trivial_index, Zt)
    assert triv.extendible and triv.gallagher_ok


def test_extensions_from_normal_c3_in_s3():
    G = symmetric(3)
    K = G.subgroup([[1, 2, 0]], name="C3").enumerate()
    Kt = CharacterTable(K)
    for lam in range(len(Kt)):
        rec = extension_search(K, G, lam, Kt)
        assert rec.extendible
    res = equivariant_extension_map(K, G, K_table=Kt)
    assert res.ok


def test_not_normal_rejected():
    G = symmetric(3)
    K = G.subgroup([[1, 0, 2]], name="C2").enumerate()
    assert not is_normal(K, G)
