from __future__ import annotations

import itertools
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from amtypec.numeric import InvalidArgument
from amtypec.rootsys import (
    Root,
    SignedPerm,
    build_root_system,
    levi_decompose,
    normalizer_quotient,
    parse_delta,
    phi_prime_components_bruteforce,
    reflection,
    simple_roots,
    subgroup_stabilizer,
    weyl_group,
)


def signed_perms(l):
    return st.permutations(range(1, l + 1)).flatmap(
        lambda p: st.lists(st.sampled_from([1, -1]), min_size=l, max_size=l).map(
            lambda s: SignedPerm(tuple(a * b for a, b in zip(s, p)))
        )
    )


@pytest.mark.parametrize("l", [1, 2, 3, 4, 5])
def test_root_system_counts(l):
    rs = build_root_system(l)
    assert len(rs.roots) == 2 * l * l
    assert len(rs.positive) == l * l
    assert len(rs.long_roots()) == 2 * l
    assert len(simple_roots(l)) == l
    for r in rs.roots:
        c = rs.simple_coords(r)
        assert all(x >= 0 for x in c) or all(x <= 0 for x in c)


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_weyl_group_order_and_root_action(l):
    W = weyl_group(l)
    assert W.order == 2**l * factorial(l)
    roots = set(build_root_system(l).roots)
    for w in W.simple_reflections():
        assert {w.act_root(r) for r in roots} == roots
        assert (w * w).is_identity()


def test_reflection_formula():
    l = 3
    for r in build_root_system(l).roots:
        s = reflection(r)
        assert s.act_root(r) == -r
        for x in build_root_system(l).roots:
            if x.dot(r) == 0:
                assert s.act_root(x) == x


@given(signed_perms(4), signed_perms(4), signed_perms(4))
def test_signed_perm_group_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert (a * a.inverse()).is_identity()
    for x in range(1, 5):
        assert a(-x) == -a(x)


def test_root_parse_roundtrip():
    for r in build_root_system(3).roots:
        assert Root.parse(str(r), 3) == r
    with pytest.raises(InvalidArgument):
        Root((1, 1, 1))


def test_parse_delta():
    assert parse_delta("3,1", 4) == (1, 3)
    assert parse_delta("none", 4) == ()
    with pytest.raises(InvalidArgument):
        parse_delta("5", 4)


def all_deltas(l):
    for k in range(l + 1):
        yield from itertools.combinations(range(1, l + 1), k)


@pytest.mark.parametrize("l", [2, 3, 4])
def test_levi_components_match_bruteforce(l):
    for dp in all_deltas(l):
        datum = levi_decompose(l, dp)
        comps = phi_prime_components_bruteforce(datum)
        assert len(comps) == len(datum.components)
        # J partitions the index set
        cover = sorted(i for d, v in datum.J.items() for i in v)
        assert cover == list(range(1, l + 1))
        assert sum(d * a for d, a in datum.a.items()) + len(datum.J[-1]) == l


def test_levi_shapes():
    assert levi_decompose(2, ()).shape() == "GL_1 x GL_1"
    assert levi_decompose(3, (1, 3)).shape() == "Sp_2 x GL_2"
    assert levi_decompose(4, (2, 3)).shape() == "GL_1 x GL_3"


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_normalizer_quotient_all_levis(l):
    for dp in all_deltas(l):
        datum = levi_decompose(l, dp)
        qp = normalizer_quotient(datum)
        target = 1
        for _, a in qp.factors:
            target *= 2**a * factorial(a)
        assert qp.quotient_order == target
        assert qp.normalizer_order == qp.quotient_order * qp.levi_weyl_order
        for d, info in qp.stabilizers.items():
            assert info["formula_matches"]


def test_orbit_stabilizer_on_labels():
    W = weyl_group(2)
    res = subgroup_stabilizer(W.elements, (5, 0), lambda w, lam: w.act_label(lam, 10))
    assert len(res.stabilizer) == 4
    assert len(res.orbit) == 2
