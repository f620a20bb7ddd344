"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

from __future__ import annotations

import itertools
import time
from collections import Counter

import numpy as np
from conftest import criterion

from amtypec.amcore import (
    all_labels,
    compute_delta,
    compute_R_lambda,
    count_global_hz,
    count_local_hz,
    signed_perm_group,
    torus_extension_map,
    torus_setup,
)
from amtypec.chartab import CharacterTable, ell_blocks, equivariant_extension_map
from amtypec.chartab.table import _TABLE_CACHE
from amtypec.chevalley import build_subgroups, conformal_torus_action, sp_model, verify_steinberg, verify_structure
from amtypec.cli import RunConfig, dispatch
from amtypec.groups import matrix_group, perm_group
from amtypec.numeric import lpart
from amtypec.rootsys import Root, levi_decompose, normalizer_quotient, reflection, two_e, weyl_group


def deltas(l):
    for k in range(l + 1):
        yield from itertools.combinations(range(1, l + 1), k)


def test_criterion_01_steinberg_relations():
    with criterion(1, "Steinberg relations for (2,3), (2,5), (2,9), (3,3) under 60 s"):
        t0 = time.perf_counter()
        for l, q in [(2, 3), (2, 5), (2, 9), (3, 3)]:
            rep = verify_steinberg(l, q)
            assert rep.passed, (l, q, [c.check_id for c in rep.failed])
            assert len(rep.checks) > 0
        assert time.perf_counter() - t0 < 60


def test_criterion_02_structure_suite():
    with criterion(2, "Levi structure for every subset at l = 2,3,4, q = 3, and [F_0, V] = 1 at q = 9"):
        t0 = time.perf_counter()
        statuses: Counter = Counter()
        for l in (2, 3, 4):
            for dp in deltas(l):
                rep = verify_structure(levi_decompose(l, dp), 3)
                statuses.update(c.status for c in rep.checks)
                assert not rep.failed, (l, dp, [c.check_id for c in rep.failed])
        assert statuses["fail"] == 0
        print(f"  structure checks: {dict(statuses)}")
        for l in (2, 3, 4):
            for dp in deltas(l):
                sub = build_subgroups(levi_decompose(l, dp), 9, enumerate=False)
                S = sub.S
                assert all(S.eq(S.frob(v), v) for v in sub.V.gens), (l, dp)
        assert time.perf_counter() - t0 < 600


def test_criterion_03_normalizer_quotient():
    with criterion(3, "normalizer quotient is a product of W(C_a) and the stabilizer formula holds, l <= 4"):
        for l in (1, 2, 3, 4):
            for dp in deltas(l):
                qp = normalizer_quotient(levi_decompose(l, dp))
                assert qp.certificate["kernel_equals_levi_weyl"]
                assert qp.certificate["image_order"] == qp.certificate["target_order"] == qp.quotient_order
                assert all(v["formula_matches"] for v in qp.stabilizers.values())


def test_criterion_05_block_engine():
    with criterion(5, "C_10 at 5 has two blocks of 5; S_3 at 3 has a principal block of defect 1; root choice invariance"):
        c10 = perm_group(10, [np.roll(np.arange(10), 1)], name="C10")
        bp = ell_blocks(CharacterTable(c10), 5)
        assert bp.count == 2 and sorted(len(b) for b in bp.blocks) == [5, 5]
        s3 = perm_group(3, [[1, 2, 0], [1, 0, 2]], name="S3")
        bs = ell_blocks(CharacterTable(s3), 3)
        assert bs.defects[bs.principal] == 1
        setup = torus_setup(2, 11)
        partitions = [bp, bs, ell_blocks(setup.Tt, 5), ell_blocks(setup.Nt, 5)]
        assert all(p.root_choice_invariant for p in partitions)


def test_criterion_06_extensions():
    with criterion(6, "every character of H extends to its stabilizer in V, l <= 4, q in {3, 9}; equivariant map for T in N"):
        empty = []
        records = 0
        for q in (3, 9):
            for l in (1, 2, 3, 4):
                for dp in deltas(l):
                    delta = ",".join(map(str, dp)) or "none"
                    out, code = dispatch(RunConfig(verb="extensions", rank=l, q=q, delta=delta))
                    assert code == 0, (q, l, dp, out["checks"][:1])
                    for row in out["data"]["records"]:
                        records += 1
                        if row["extensions"] == 0:
                            empty.append((q, l, dp, row["lambda"]))
        print(f"  extension records: {records}, empty: {len(empty)}")
        assert not empty
        setup = torus_setup(2, 11)
        res = equivariant_extension_map(setup.T, setup.N, K_table=setup.Tt)
        assert res.ok, res.reason
        assert len(res.mapping) == len(setup.Tt)
        outer = torus_extension_map(2, 11)
        assert outer.ok, outer.reason


def test_criterion_07_height_zero_triangle():
    with criterion(7, "Sp_4(11), ell = 5: global, local and brute-force counts 14 and 16"):
        t0 = time.perf_counter()
        setup = torus_setup(2, 11)
        assert setup.N.order == 800
        for block, target in [((0, 0), 14), ((5, 0), 16)]:
            g = count_global_hz(2, 11, 5, block)
            loc = count_local_hz(2, 11, 5, block, bruteforce=True)
            assert g.degree_consistent
            assert loc.report.passed, [c.check_id for c in loc.report.failed]
            assert loc.report.status_of("unique-covering-block") == "pass"
            print(f"  block {block}: global {g.count}, local {loc.count}, brute force {loc.bruteforce}")
            assert g.count == loc.count == loc.bruteforce == target
        assert time.perf_counter() - t0 < 900


def test_criterion_08_cyclic_defect():
    with criterion(8, "SL_2(11), ell = 5, principal block: all three counts equal 4"):
        g = count_global_hz(1, 11, 5, (0,))
        loc = count_local_hz(1, 11, 5, (0,), bruteforce=True)
        assert torus_setup(1, 11).N.order == 20
        assert g.count == loc.count == loc.bruteforce == 4


def test_criterion_09_delta_and_R():
    with criterion(9, "delta is linear with R(sigma lambda) in its kernel for all lambda, sigma at l = 2, q = 11"):
        t0 = time.perf_counter()
        l, q = 2, 11
        emap = torus_extension_map(l, q)
        sigmas = conformal_torus_action(l, q)
        checked = 0
        for lam in all_labels(l, q - 1):
            for sigma in sigmas:
                res = compute_delta(lam, sigma, l, q, emap=emap)
                assert res.linear, (lam, sigma.kind)
                assert res.kernel_ok, (lam, sigma.kind)
                checked += 1
        assert checked == 100 * len(sigmas)
        triv = compute_R_lambda((0, 0), l, q)
        assert len(triv.R) == weyl_group(l).order
        witnesses = []
        for lam in all_labels(l, q - 1):
            rd = compute_R_lambda(lam, l, q)
            assert rd.contained
            R = set(rd.R)
            for root, degs in rd.evidence.items():
                if degs[0] == degs[1] and reflection(Root.parse(root, l)) not in R:
                    witnesses.append((lam, root, degs))
        print(f"  delta pairs checked: {checked}; equal-degree reflections: {len(witnesses)}, e.g. {witnesses[:1]}")
        assert witnesses
        assert time.perf_counter() - t0 < 1800


def test_criterion_10_lpart_identity():
    with criterion(10, "(q^ell - 1)_ell = ell (q - 1)_ell for (11, 5) and (29, 7)"):
        for q, ell in [(11, 5), (29, 7)]:
            assert lpart(q**ell - 1, ell).ell_part == ell * lpart(q - 1, ell).ell_part
            # iterated: (q^(ell^k) - 1)_ell = ell^k (q - 1)_ell
            for k in range(1, 4):
                assert lpart(q ** (ell**k) - 1, ell).ell_part == ell**k * lpart(q - 1, ell).ell_part
        assert lpart(11**5 - 1, 5).ell_part == 25
        assert lpart(29**7 - 1, 7).ell_part == 49


def test_criterion_04_character_tables():
    # runs last so that every table built by the other criteria is certified too
    with criterion(4, "exact orthogonality for every table; SL_2(3) and W(C_2) degrees; bit-identical reruns"):
        S = sp_model(1, 3)
        a = two_e(1, 1)
        sl23 = matrix_group(S.F, [S.x(a, 1), S.x(-a, 1)], name="SL2(3)")
        t = CharacterTable(sl23)
        assert sorted(t.degrees.tolist()) == [1, 1, 1, 2, 2, 2, 3]
        wc2 = signed_perm_group(weyl_group(2).elements, 2, name="W")
        tw = CharacterTable(wc2)
        assert sorted(tw.degrees.tolist()) == [1, 1, 1, 1, 2]
        assert CharacterTable(sl23).to_dict() == t.to_dict()
        assert CharacterTable(wc2).to_dict() == tw.to_dict()
        setup = torus_setup(2, 11)
        assert CharacterTable(setup.N).to_dict() == setup.Nt.to_dict()
        tables = [t, tw] + [x for x in _TABLE_CACHE.values()]
        for tab in tables:
            cert = tab.verify()
            assert cert["row_orthogonality"] and cert["column_orthogonality"]
            assert int((tab.degrees.astype(object) ** 2).sum()) == tab.order
        print(f"  certified tables: {len(tables)}")
