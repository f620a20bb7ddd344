from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amtypec.chevalley import (
    build_subgroups,
    centralizer_of_torus_ellpart,
    conformal_torus_action,
    frobenius_action,
    gl_order,
    is_conformal,
    sp_model,
    sp_order,
    verify_steinberg,
    verify_structure,
)
from amtypec.numeric import InvalidArgument
from amtypec.rootsys import build_root_system, levi_decompose, reflection


def test_orders():
    assert sp_order(1, 11) == 1320
    assert sp_order(2, 11) == 11**4 * (11**2 - 1) * (11**4 - 1)
    assert gl_order(2, 11) == 13200


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5, 9]), st.data())
def test_root_elements_are_symplectic_and_additive(q, data):
    S = sp_model(2, q)
    roots = build_root_system(2).roots
    a = data.draw(st.sampled_from(roots))
    s = data.draw(st.integers(0, q - 1))
    t = data.draw(st.integers(0, q - 1))
    xs, xt = S.x(a, s), S.x(a, t)
    assert S.is_symplectic(xs)
    st_code = int(S.F.add(s, t))
    assert S.eq(S.mul(xs, xt), S.x(a, st_code))


def test_weyl_image_of_n_alpha():
    S = sp_model(3, 3)
    for a in build_root_system(3).roots:
        assert S.weyl_image(S.nn(a, 1)) == reflection(a)


def test_steinberg_relations_small():
    rep = verify_steinberg(2, 3)
    assert rep.passed, [c.check_id for c in rep.failed]
    with pytest.raises(InvalidArgument):
        verify_steinberg(1, 5)


def test_odd_characteristic_required():
    with pytest.raises(InvalidArgument):
        sp_model(2, 4)


def test_levi_subgroups_orders():
    datum = levi_decompose(2, (2,))
    sub = build_subgroups(datum, 3)
    assert sub.L.order == gl_order(2, 3)
    rep = verify_structure(datum, 3, sub)
    assert rep.passed, [c.check_id for c in rep.failed]


def test_frobenius_and_conformal_actions():
    frob = frobenius_action(2, 9)
    S = frob.S
    M = S.x(build_root_system(2).roots[0], S.F.generator_code)
    assert S.is_symplectic(frob.apply(M))
    assert frob.act_label((1, 2), 8) == (3, 6)
    reps = conformal_torus_action(2, 11)
    assert len(reps) == 2
    sigma = reps[1]
    assert is_conformal(sigma.S, sigma.matrix, sigma.data["mu"])
    assert not sigma.S.F.is_square(sigma.data["mu"])
    # conjugation by the conformal element preserves Sp
    X = sigma.S.x(build_root_system(2).roots[1], 3)
    assert sigma.S.is_symplectic(sigma.apply(X))


def test_centralizer_of_central_ell_part():
    rep = centralizer_of_torus_ellpart(levi_decompose(2, ()), 11, 5)
    assert rep.passed
    assert rep.data["ell_part_of_q_minus_1"] == 5
    with pytest.raises(InvalidArgument):
        centralizer_of_torus_ellpart(levi_decompose(2, ()), 5, 5)


def test_torus_diagonal():
    S = sp_model(2, 11)
    t = S.torus([2, 3])
    d = np.diag(S.codes(t))
    assert d[0] == 2 and d[1] == 3
    assert S.F.mul(int(d[0]), int(d[3])) == 1
