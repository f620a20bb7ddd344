from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amtypec.numeric import (
    GF,
    Cyclotomic,
    InvalidArgument,
    cyclo_reduce_mod_ell,
    factorize,
    ff_arith,
    field_for_order,
    is_prime,
    lpart,
    multiplicative_order,
    primitive_root,
)
from amtypec.numeric.arith import ell_part, valuation

FIELDS = [(2, 1), (3, 1), (5, 1), (2, 3), (3, 2), (11, 1)]


# -- integers -------------------------------------------------------------


def test_is_prime_small():
    primes = [n for n in range(60) if is_prime(n)]
    assert primes == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]


@given(st.integers(1, 10**6), st.sampled_from([2, 3, 5, 7, 11]))
def test_lpart_splits(n, ell):
    r = lpart(n, ell)
    assert r.ell_part * r.ell_prime_part == n
    assert r.ell_prime_part % ell != 0
    assert r.ell_part == ell**r.valuation


def test_lpart_rejects_bad_input():
    with pytest.raises(InvalidArgument):
        lpart(0, 5)
    with pytest.raises(InvalidArgument):
        lpart(10, 4)


def test_lpart_known_values():
    assert lpart(11**5 - 1, 5).ell_part == 25
    assert lpart(10, 5).ell_part == 5
    assert lpart(29**7 - 1, 7).ell_part == 49
    assert valuation(800, 5) == 2
    assert ell_part(13200, 5) == 25


@given(st.integers(2, 10**5))
def test_factorize_roundtrip(n):
    f = factorize(n)
    assert math.prod(p**k for p, k in f.items()) == n
    assert all(is_prime(p) for p in f)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 29])
def test_primitive_root(p):
    g = primitive_root(p)
    assert multiplicative_order(g, p) == p - 1


# -- finite fields --------------------------------------------------------


@pytest.mark.parametrize("p,m", FIELDS)
def test_field_axioms_exhaustive(p, m):
    F = GF(p, m)
    a = np.arange(F.q)[:, None]
    b = np.arange(F.q)[None, :]
    add = F.add(a, b)
    mul = F.mul(a, b)
    assert (add == add.T).all() and (mul == mul.T).all()
    # every row of the addition table is a permutation, likewise for nonzero mult
    assert all(len(set(row)) == F.q for row in add)
    assert all(len(set(row[1:])) == F.q - 1 for row in mul[1:])
    nz = np.arange(1, F.q)
    assert (F.mul(nz, F.inv(nz)) == 1).all()
    # distributivity on a sample
    for x, y, z in [(1, 2 % F.q, F.q - 1), (F.q - 1, F.q - 1, 1)]:
        assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))


@pytest.mark.parametrize("p,m", FIELDS)
def test_frobenius_is_additive_and_multiplicative(p, m):
    F = GF(p, m)
    a = np.arange(F.q)[:, None]
    b = np.arange(F.q)[None, :]
    assert (F.frob(F.add(a, b)) == F.add(F.frob(a), F.frob(b))).all()
    assert (F.frob(F.mul(a, b)) == F.mul(F.frob(a), F.frob(b))).all()
    x = np.arange(F.q)
    for _ in range(m):
        x = F.frob(x)
    assert (x == np.arange(F.q)).all()


def test_field_element_api():
    F = field_for_order(9)
    g = F.gen()
    assert (g ** 8).code == 1 and (g ** 4).code != 1
    assert ff_arith(g, g.inv(), "mul").code == 1
    assert ff_arith(g, None, "frob") == g**3
    with pytest.raises(InvalidArgument):
        ff_arith(g, GF(3).elem(1), "add")
    with pytest.raises(InvalidArgument):
        field_for_order(12)


@settings(max_examples=50)
@given(st.sampled_from(FIELDS), st.data())
def test_matrix_inverse(pm, data):
    F = GF(*pm)
    n = 3
    codes = data.draw(st.lists(st.integers(0, F.q - 1), min_size=n * n, max_size=n * n))
    A = F.mat_from_codes(np.array(codes).reshape(n, n))
    try:
        Ai = F.mat_inv(A)
    except (ZeroDivisionError, ArithmeticError, np.linalg.LinAlgError, ValueError):
        return
    assert (F.mat_to_codes(F.mat_mul(A, Ai)) == np.eye(n, dtype=int)).all()


# -- cyclotomics ----------------------------------------------------------


def _cx(x: Cyclotomic) -> complex:
    return complex(x)


@given(
    st.sampled_from([1, 3, 4, 5, 8, 10, 12, 20]),
    st.lists(st.integers(-5, 5), min_size=1, max_size=12),
    st.lists(st.integers(-5, 5), min_size=1, max_size=12),
)
def test_cyclotomic_ring_ops_match_complex(e, a, b):
    x, y = Cyclotomic(e, a), Cyclotomic(e, b)
    assert cmath.isclose(_cx(x + y), _cx(x) + _cx(y), abs_tol=1e-7)
    assert cmath.isclose(_cx(x * y), _cx(x) * _cx(y), abs_tol=1e-6)
    assert cmath.isclose(_cx(x.conj()), _cx(x).conjugate(), abs_tol=1e-7)


def test_cyclotomic_identities():
    acc = Cyclotomic.from_int(5, 0)
    for k in range(5):
        acc = acc + Cyclotomic.root(5, k)
    assert acc == Cyclotomic.from_int(5, 0)
    # mixed conductors lift to the lcm
    i = Cyclotomic.root(4)
    w = Cyclotomic.root(3)
    assert cmath.isclose(_cx(i * w), 1j * cmath.exp(2j * cmath.pi / 3), abs_tol=1e-9)
    assert (i * i) == Cyclotomic.from_int(4, -1)
    assert Cyclotomic.from_int(7, 3).is_integer()
    assert not Cyclotomic.root(7).is_rational()


def test_galois_action():
    z = Cyclotomic.root(8)
    for k in (1, 3, 5, 7):
        assert cmath.isclose(_cx(z.galois(k)), cmath.exp(2j * cmath.pi * k / 8), abs_tol=1e-9)


def test_reduction_mod_ell_is_a_ring_hom():
    e, ell = 10, 11
    rng = np.random.default_rng(1)
    for _ in range(20):
        a = Cyclotomic(e, rng.integers(-4, 5, 4))
        b = Cyclotomic(e, rng.integers(-4, 5, 4))
        ra, rb = cyclo_reduce_mod_ell(a, ell), cyclo_reduce_mod_ell(b, ell)
        assert cyclo_reduce_mod_ell(a + b, ell) == ra + rb
        assert cyclo_reduce_mod_ell(a * b, ell) == ra * rb


def test_reduction_rejects_non_integral():
    with pytest.raises(InvalidArgument):
        cyclo_reduce_mod_ell(Cyclotomic(5, [1], 5), 5)
