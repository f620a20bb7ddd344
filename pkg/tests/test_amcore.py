from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from amtypec.amcore import (
    Refused,
    all_labels,
    check_hypotheses,
    compute_delta,
    compute_R_lambda,
    count_global_hz,
    count_local_hz,
    ell_prime_part,
    find_block,
    label_stabilizer,
    omega_table,
    orbit_representatives,
    parse_label,
    relative_weyl,
    torus_automorphisms,
    torus_blocks,
    torus_setup,
)
from amtypec.numeric import InvalidArgument
from amtypec.rootsys import weyl_group


@pytest.mark.parametrize(
    "l,q,ell",
    [(2, 11, 3), (2, 11, 11), (2, 11, 7), (2, 3, 5), (2, 11, 4)],
)
def test_hypotheses_refused(l, q, ell):
    with pytest.raises(Refused):
        check_hypotheses(l, q, ell)


def test_hypotheses_bad_field():
    with pytest.raises(InvalidArgument):
        check_hypotheses(2, 12, 5)
    with pytest.raises(InvalidArgument):
        check_hypotheses(2, 8, 7)
    check_hypotheses(2, 11, 5)
    check_hypotheses(1, 29, 7)


def test_parse_label():
    assert parse_label("(5,12)", 2, 10) == (5, 2)
    assert parse_label([1, 2], 2, 10) == (1, 2)
    with pytest.raises(InvalidArgument):
        parse_label("1", 2, 10)


@given(st.tuples(st.integers(0, 9), st.integers(0, 9)), st.integers(0, 7))
def test_ell_prime_part_properties(lam, k):
    q, ell, m = 11, 5, 10
    lp = ell_prime_part(lam, q, ell)
    assert ell_prime_part(lp, q, ell) == lp
    # lam - lp has ell-power order, lp has ell'-order
    diff = tuple((a - b) % m for a, b in zip(lam, lp))
    assert all((5 * x) % m == 0 for x in diff)
    assert all((2 * x) % m == 0 for x in lp)
    w = weyl_group(2).elements[k]
    assert ell_prime_part(w.act_label(lam, m), q, ell) == w.act_label(lp, m)


def test_torus_blocks_partition_labels():
    blocks = torus_blocks(2, 11, 5)
    assert [b.ell_prime_label for b in blocks] == [(0, 0), (0, 5), (5, 0), (5, 5)]
    members = sorted(x for b in blocks for x in b.members)
    assert members == all_labels(2, 10)
    assert all(b.size == 25 for b in blocks)
    assert find_block(2, 11, 5, "(4,2)").is_principal
    assert find_block(2, 11, 5, "(3,2)").ell_prime_label == (5, 0)


def test_label_stabilizers_and_orbits():
    assert len(label_stabilizer((0, 0), 2, 10)) == 8
    assert len(label_stabilizer((5, 0), 2, 10)) == 4
    assert len(label_stabilizer((1, 2), 2, 10)) == 1
    block = find_block(2, 11, 5, (0, 0))
    reps = orbit_representatives(block)
    assert sum(n for _, n in reps) == block.size


def test_relative_weyl_is_label_stabilizer():
    rw = relative_weyl((5, 0), 2, 11, 5)
    assert rw.order == 4
    assert sorted(rw.table.degrees.tolist()) == [1, 1, 1, 1]


def test_rank_one_counts_agree():
    g = count_global_hz(1, 11, 5, (0,))
    loc = count_local_hz(1, 11, 5, (0,))
    assert g.count == loc.count == loc.bruteforce == 4
    assert g.degree_consistent
    assert loc.report.passed


def test_torus_labels_match_characters():
    setup = torus_setup(1, 11)
    assert len(setup.label_of) == 10
    assert setup.torus_character((0,)) == setup.Tt.trivial_index


def test_R_lambda_rank_one():
    triv = compute_R_lambda((0,), 1, 11)
    assert len(triv.R) == len(triv.w_lambda) == 2
    quad = compute_R_lambda((5,), 1, 11)
    # the quadratic character: s in W(lambda) but constituents have equal degree
    assert len(quad.w_lambda) == 2 and len(quad.R) == 1
    assert quad.contained


def test_delta_rank_one():
    for lam in all_labels(1, 10):
        for sigma in torus_automorphisms(1, 11):
            res = compute_delta(lam, sigma, 1, 11)
            assert res.linear and res.kernel_ok


def test_omega_rank_one():
    om = omega_table(1, 11, 5, (0,))
    assert om.report.passed, [c.check_id for c in om.report.failed]
    assert len(om.rows) == 4
    for r in om.rows:
        assert math.gcd(r.local_degree, 5) == 1 or not r.height_zero
