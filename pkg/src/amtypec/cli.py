"""Command-line front end: each verb runs a pipeline and emits a JSON report.

Exit codes: 0 pass, 1 verification failure, 2 invalid input or refused
hypotheses, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .groups import ResourceLimit, perm_group
from .numeric.arith import InvalidArgument, ell_part, is_prime, lpart
from .report import VerificationReport, to_jsonable
from .rootsys import (
    VerificationFailure,
    build_root_system,
    levi_decompose,
    normalizer_quotient,
    parse_delta,
    phi_prime_components_bruteforce,
)

EXIT_PASS, EXIT_FAIL, EXIT_INVALID, EXIT_RESOURCE = 0, 1, 2, 3


@dataclass
class RunConfig:
    verb: str
    action: str | None = None
    rank: int = 2
    q: int = 3
    ell: int | None = None
    delta: str = "none"
    block: str | None = None
    group: str = "N"
    label: str | None = None
    pair: str = "H-V"
    budget: int | None = None
    output: str | None = None
    seed: int = 0
    timing: bool = False

    def validate(self) -> None:
        from .amcore import check_field

        if self.rank < 1:
            raise InvalidArgument("--rank must be positive")
        check_field(self.q)
        if self.ell is not None and not is_prime(self.ell):
            raise InvalidArgument("--ell must be prime")
        if self.budget is not None and self.budget <= 0:
            raise InvalidArgument("--budget must be positive")

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("output")
        d.pop("timing")
        return d


# -- pipelines ---------------------------------------------------------------------------


def _datum(cfg: RunConfig):
    return levi_decompose(cfg.rank, parse_delta(cfg.delta, cfg.rank))


def run_roots(cfg: RunConfig) -> VerificationReport:
    l = cfg.rank
    rs = build_root_system(l)
    rep = VerificationReport("roots", {"l": l})
    pos = list(rs.positive)
    rep.add("root-count", "root-system", len(pos) == l * l, len(pos))
    rep.add("simple-coordinates", "root-system", all(min(rs.simple_coords(r)) >= 0 for r in pos))
    rep.add("long-roots", "root-system", sum(r.is_long() for r in pos) == l)
    rep.data = {"simple": [str(r) for r in rs.simple], "positive": [str(r) for r in pos]}
    return rep


def run_levi(cfg: RunConfig) -> VerificationReport:
    datum = _datum(cfg)
    rep = VerificationReport("levi", {"l": cfg.rank, "delta": list(datum.delta_prime)})
    brute = phi_prime_components_bruteforce(datum)
    union = set().union(*brute) if brute else set()
    rep.add("phi-prime-closure", "levi-root-subsystem", union == set(datum.phi_prime), len(union))
    rep.add("component-count", "levi-root-subsystem", len(brute) == len(datum.components), len(brute))
    rep.data = datum.describe()
    return rep


def run_weyl(cfg: RunConfig) -> VerificationReport:
    datum = _datum(cfg)
    rep = VerificationReport("weyl", {"l": cfg.rank, "delta": list(datum.delta_prime)})
    try:
        quo = normalizer_quotient(datum)
    except VerificationFailure as exc:
        rep.add("normalizer-quotient", "normalizer-quotient", False, {"message": str(exc), "witness": exc.witness})
        return rep
    rep.add("normalizer-quotient", "normalizer-quotient", True, quo.certificate)
    for d, st in quo.stabilizers.items():
        rep.add(f"stabilizer-formula[{d}]", "stabilizer-formula", st["formula_matches"], st)
    rep.data = {
        "descriptor": quo.descriptor,
        "normalizer_order": quo.normalizer_order,
        "levi_weyl_order": quo.levi_weyl_order,
        "quotient_order": quo.quotient_order,
        "generators": [list(w.img) for w in quo.generators],
    }
    return rep


def run_group(cfg: RunConfig) -> VerificationReport:
    from .chevalley import build_subgroups, verify_steinberg, verify_structure

    action = cfg.action or "build"
    if action == "verify-steinberg":
        return verify_steinberg(cfg.rank, cfg.q)
    datum = _datum(cfg)
    if action == "verify-structure":
        return verify_structure(datum, cfg.q)
    if action == "build":
        sub = build_subgroups(datum, cfg.q)
        rep = VerificationReport("group-build", {"l": cfg.rank, "q": cfg.q, "delta": list(datum.delta_prime)})
        summary = sub.summary()
        rep.add("enumerated", "plumbing", all(v is not None for v in summary.values()), summary)
        rep.data = {"orders": summary, "field": repr(sub.S.F), "generators": {
            name: [g.tolist() for g in grp.gens] for name, grp in sub.all_groups()
        }}
        return rep
    raise InvalidArgument(f"unknown group action {action!r}")


def _named_group(cfg: RunConfig):
    from .amcore import signed_perm_group
    from .chevalley import build_subgroups, sp_model
    from .groups import matrix_group
    from .rootsys import weyl_group

    name = cfg.group
    if name == "W":
        return signed_perm_group(weyl_group(cfg.rank).elements, cfg.rank, name="W")
    if name == "SL2":
        S = sp_model(1, cfg.q)
        from .rootsys import two_e

        a = two_e(1, 1)
        gens = [S.x(a, 1), S.x(-a, 1)]
        return matrix_group(S.F, gens, name="SL2")
    if name.startswith("S") and name[1:].isdigit():
        n = int(name[1:])
        return perm_group(n, [np.roll(np.arange(n), 1), np.r_[[1, 0], np.arange(2, n)]], name=name)
    if name.startswith("C") and name[1:].isdigit():
        n = int(name[1:])
        return perm_group(n, [np.roll(np.arange(n), 1)], name=name)
    sub = build_subgroups(_datum(cfg), cfg.q, enumerate=False)
    groups = dict(sub.all_groups())
    if name not in groups:
        raise InvalidArgument(f"unknown group {name!r}; choose from {sorted(groups)} or W, SL2, Sn, Cn")
    return groups[name]


def run_chartable(cfg: RunConfig) -> VerificationReport:
    from .chartab import CharacterTable

    G = _named_group(cfg)
    G.enumerate()
    tab = CharacterTable(G, seed=cfg.seed)
    rep = VerificationReport("chartable", {"group": cfg.group, "l": cfg.rank, "q": cfg.q, "order": G.order})
    for key in ("sum_of_squares", "degrees_divide_order", "galois_consistent", "row_orthogonality", "column_orthogonality"):
        rep.add(key.replace("_", "-"), "character-table", tab.certificate[key])
    rep.data = tab.to_dict()
    rep.data["field"] = G.kind.describe()
    return rep


def run_blocks(cfg: RunConfig) -> VerificationReport:
    from .chartab import CharacterTable, ell_blocks
    from .numeric.arith import valuation

    if cfg.ell is None:
        raise InvalidArgument("--ell is required")
    G = _named_group(cfg)
    tab = CharacterTable(G, seed=cfg.seed)
    part = ell_blocks(tab, cfg.ell)
    rep = VerificationReport("blocks", {"group": cfg.group, "l": cfg.rank, "q": cfg.q, "ell": cfg.ell})
    members = sorted(i for b in part.blocks for i in b)
    rep.add("partition", "blocks", members == list(range(len(tab))))
    rep.add("root-choice-invariance", "blocks", part.root_choice_invariant)
    rep.add("height-zero-nonempty", "heights", all(part.height_zero(b) for b in range(part.count)))
    a = valuation(G.order, cfg.ell)
    rep.add(
        "height-formula",
        "heights",
        all(
            (part.heights[i] == 0) == (ell_part(int(tab.degrees[i]), cfg.ell) == cfg.ell ** (a - part.defects[b]))
            for b, blk in enumerate(part.blocks)
            for i in blk
        ),
    )
    rep.data = part.to_dict()
    rep.data["degrees"] = tab.degrees.tolist()
    return rep


def run_brauer(cfg: RunConfig) -> VerificationReport:
    from .amcore import find_block, torus_setup
    from .chartab import brauer_map

    if cfg.ell is None:
        raise InvalidArgument("--ell is required")
    setup = torus_setup(cfg.rank, cfg.q)
    blk = find_block(cfg.rank, cfg.q, cfg.ell, cfg.block)
    bT, bN = setup.blocks(cfg.ell)
    b = bT.block_of[setup.torus_character(blk.ell_prime_label)]
    bt = brauer_map(b, bT, bN, setup.fus_TN)
    rep = VerificationReport("brauer", {"l": cfg.rank, "q": cfg.q, "ell": cfg.ell, "block": list(blk.ell_prime_label)})
    rep.add("defined", "brauer-correspondent", bt is not None, bt)
    rep.add("identity-on-N", "brauer-correspondent", all(brauer_map(k, bN, bN) == k for k in range(bN.count)))
    if bt is not None:
        principal = brauer_map(bT.principal, bT, bN, setup.fus_TN) == bN.principal
        rep.add("third-main-theorem", "brauer-correspondent", principal)
        rep.data = {"T_block": list(bT.blocks[b]), "N_block": list(bN.blocks[bt]), "N_defect": bN.defects[bt]}
    return rep


def run_extensions(cfg: RunConfig) -> VerificationReport:
    from .chevalley import build_subgroups

    datum = _datum(cfg)
    rep = VerificationReport("extensions", {"l": cfg.rank, "q": cfg.q, "delta": list(datum.delta_prime), "pair": cfg.pair})
    if cfg.pair == "H-V":
        from .chartab import ExtensionContext

        from .groups import matrix_group

        # only H and V are needed; L may be far too large to enumerate
        sub = build_subgroups(datum, cfg.q, enumerate=False)
        # H_{-1} lies outside V (V_{-1} is trivial) but is central in L and commutes with V
        M = sub.V
        if not sub.V.contains(np.stack(sub.H.gens)).all():
            M = matrix_group(sub.S.F, list(sub.H.gens) + list(sub.V.gens), name="HV")
        ctx = ExtensionContext(sub.H, M)
        rows = []
        for lam in range(len(ctx.Kt)):
            rec = ctx.search(lam)
            rows.append({"lambda": lam, "stabilizer_order": rec.stabilizer.order, "extensions": len(rec.extensions),
                         "gallagher": rec.gallagher_count})
            rep.add(f"extends[{lam}]", "extends-to-stabilizer", rec.extendible, {"stabilizer_order": rec.stabilizer.order})
            rep.add(f"gallagher[{lam}]", "gallagher", rec.gallagher_ok)
        rep.data = {"H_order": sub.H.order, "V_order": sub.V.order, "ambient": M.name, "ambient_order": M.order,
                    "records": rows}
        return rep
    if cfg.pair == "T-N":
        from .amcore import torus_extension_map, torus_setup

        if datum.delta_prime:
            raise InvalidArgument("the T-N pair needs the torus Levi (--delta none)")
        setup = torus_setup(cfg.rank, cfg.q)
        emap = torus_extension_map(cfg.rank, cfg.q)
        rep.add("equivariant-map", "equivariant-extension-map", emap.ok, emap.to_dict() if not emap.ok else emap.checks)
        rep.data = {"orbits": len(emap.orbits), "mapping": {str(setup.label_of[k]): v for k, v in emap.mapping.items()}}
        return rep
    raise InvalidArgument("--pair must be H-V or T-N")


def _hypotheses(cfg: RunConfig):
    from .amcore import check_hypotheses

    if cfg.ell is None:
        raise InvalidArgument("--ell is required")
    if parse_delta(cfg.delta, cfg.rank):
        raise InvalidArgument("height-zero counting is implemented for the torus Levi only (--delta none)")
    check_hypotheses(cfg.rank, cfg.q, cfg.ell)


def _count_checks(rep: VerificationReport, l, q, ell, block) -> dict:
    from .amcore import count_global_hz, count_local_hz

    g = count_global_hz(l, q, ell, block)
    loc = count_local_hz(l, q, ell, block)
    tag = ",".join(map(str, g.block.ell_prime_label))
    rep.add(f"global-degree-consistency[{tag}]", "global-height-zero", g.degree_consistent)
    rep.merge(loc.report, prefix=f"[{tag}]")
    rep.add(
        f"triangle[{tag}]",
        "height-zero-bijection",
        g.count == loc.count == loc.bruteforce,
        {"global": g.count, "local": loc.count, "bruteforce": loc.bruteforce},
    )
    return {"block": g.block.to_dict(), "global": g.count, "local": loc.count, "bruteforce": loc.bruteforce,
            "records": [r.to_dict() for r in g.records]}


def run_am_count(cfg: RunConfig) -> VerificationReport:
    from .amcore import find_block

    _hypotheses(cfg)
    rep = VerificationReport("am-count", {"l": cfg.rank, "q": cfg.q, "ell": cfg.ell, "block": cfg.block})
    blk = find_block(cfg.rank, cfg.q, cfg.ell, cfg.block)
    rep.data = _count_checks(rep, cfg.rank, cfg.q, cfg.ell, blk)
    return rep


def run_omega(cfg: RunConfig) -> VerificationReport:
    from .amcore import omega_table

    _hypotheses(cfg)
    om = omega_table(cfg.rank, cfg.q, cfg.ell, cfg.block)
    rep = VerificationReport("omega", {"l": cfg.rank, "q": cfg.q, "ell": cfg.ell, "block": cfg.block})
    rep.merge(om.report)
    rep.data = {"block": om.block.to_dict(), "rows": [r.to_dict() for r in om.rows]}
    return rep


def _labels(cfg: RunConfig):
    from .amcore import all_labels, parse_label

    if cfg.label is not None:
        return [parse_label(cfg.label, cfg.rank, cfg.q - 1)]
    return all_labels(cfg.rank, cfg.q - 1)


def run_r_lambda(cfg: RunConfig) -> VerificationReport:
    from .amcore import compute_R_lambda
    from .rootsys import weyl_group

    rep = VerificationReport("r-lambda", {"l": cfg.rank, "q": cfg.q, "label": cfg.label})
    out = []
    for lam in _labels(cfg):
        R = compute_R_lambda(lam, cfg.rank, cfg.q)
        tag = ",".join(map(str, lam))
        rep.add(f"R-in-W[{tag}]", "reflection-subgroup", R.contained)
        if not any(lam):
            rep.add("R-of-trivial-is-W", "reflection-subgroup", len(R.R) == weyl_group(cfg.rank).order)
        out.append(R.to_dict())
    rep.data = {"labels": out}
    return rep


def run_delta(cfg: RunConfig) -> VerificationReport:
    from .amcore import compute_R_lambda, compute_delta, torus_automorphisms

    rep = VerificationReport("delta-check", {"l": cfg.rank, "q": cfg.q, "label": cfg.label})
    rows, witness = [], None
    for lam in _labels(cfg):
        R = compute_R_lambda(lam, cfg.rank, cfg.q)
        if witness is None and len(R.R) < len(R.w_lambda):
            witness = R.to_dict()
        for sigma in torus_automorphisms(cfg.rank, cfg.q):
            d = compute_delta(lam, sigma, cfg.rank, cfg.q)
            tag = f"{','.join(map(str, lam))}:{sigma.kind}"
            rep.add(f"delta-linear[{tag}]", "delta-linear", d.linear)
            rep.add(f"R-in-kernel[{tag}]", "R-in-kernel", d.kernel_ok)
            if sigma.kind == "inner":
                rep.add(f"inner-trivial[{tag}]", "delta-linear", d.trivial)
            rows.append({"lambda": list(lam), "sigma": sigma.kind, "trivial": d.trivial, "R_order": d.R_order})
    rep.data = {"rows": rows, "reflection_not_in_R": witness}
    return rep


def run_checklist(cfg: RunConfig) -> VerificationReport:
    from .amcore import check_hypotheses, torus_blocks
    from .chevalley import verify_structure

    datum = _datum(cfg)
    rep = VerificationReport("checklist", {"l": cfg.rank, "q": cfg.q, "ell": cfg.ell, "delta": list(datum.delta_prime)})
    rep.merge(verify_structure(datum, cfg.q), prefix="structure:")
    rep.merge(run_weyl(cfg), prefix="weyl:")
    rep.merge(run_extensions(RunConfig(**{**asdict(cfg), "pair": "H-V"})), prefix="extensions:")
    if datum.delta_prime:
        rep.add("torus-pipeline", "plumbing", "skipped", "mixed Levi: structural and extension checks only")
        return rep
    if cfg.ell is None:
        raise InvalidArgument("--ell is required for the torus checklist")
    check_hypotheses(cfg.rank, cfg.q, cfg.ell)
    rep.merge(run_extensions(RunConfig(**{**asdict(cfg), "pair": "T-N"})), prefix="extensions:")
    rep.merge(run_delta(cfg), prefix="delta:")
    counts = []
    for blk in torus_blocks(cfg.rank, cfg.q, cfg.ell):
        counts.append(_count_checks(rep, cfg.rank, cfg.q, cfg.ell, blk))
    rep.data = {"counts": [{k: c[k] for k in ("block", "global", "local", "bruteforce")} for c in counts]}
    return rep


PIPELINES = {
    "roots": run_roots,
    "levi": run_levi,
    "weyl": run_weyl,
    "group": run_group,
    "chartable": run_chartable,
    "blocks": run_blocks,
    "brauer": run_brauer,
    "extensions": run_extensions,
    "am-count": run_am_count,
    "omega": run_omega,
    "r-lambda": run_r_lambda,
    "delta-check": run_delta,
    "checklist": run_checklist,
}


# -- dispatch -------------------------------------------------------------------------------


def dispatch(cfg: RunConfig) -> tuple[dict, int]:
    """Run the verb; return the JSON-ready report and the exit code."""
    t0 = time.perf_counter()
    saved = os.environ.get("AMTYPEC_BUDGET")
    if cfg.budget is not None:
        os.environ["AMTYPEC_BUDGET"] = str(cfg.budget)
    try:
        out, code = _run(cfg)
    finally:
        if saved is None:
            os.environ.pop("AMTYPEC_BUDGET", None)
        else:
            os.environ["AMTYPEC_BUDGET"] = saved
    out["version"] = __version__
    out["config"] = cfg.echo()
    if cfg.timing:
        out["wall_time"] = round(time.perf_counter() - t0, 3)
    return out, code


def _run(cfg: RunConfig) -> tuple[dict, int]:
    from .amcore import Refused

    try:
        cfg.validate()
        rep = PIPELINES[cfg.verb](cfg)
        code = EXIT_PASS if rep.passed else EXIT_FAIL
    except Refused as exc:
        rep = VerificationReport(cfg.verb, cfg.echo())
        rep.add("hypotheses", "hypothesis-gate", "refused", str(exc))
        code = EXIT_INVALID
    except ResourceLimit as exc:
        rep = VerificationReport(cfg.verb, cfg.echo())
        rep.add("resource-limit", "plumbing", "skipped", {"what": exc.what, "budget": exc.budget})
        code = EXIT_RESOURCE
    except VerificationFailure as exc:
        rep = VerificationReport(cfg.verb, cfg.echo())
        rep.add("verification", "plumbing", False, {"message": str(exc), "witness": to_jsonable(exc.witness)})
        code = EXIT_FAIL
    return rep.to_dict(timing=cfg.timing), code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rank", "-l", type=int, default=2, help="rank l of Sp_2l")
    common.add_argument("--q", type=int, default=3, help="field order (odd prime power)")
    common.add_argument("--ell", type=int, default=None, help="the prime ell")
    common.add_argument("--delta", default="none", help="Levi simple-root indices, e.g. 1,3 or none")
    common.add_argument("--block", default=None, help="torus block given by a label, e.g. 5,0")
    common.add_argument("--label", "--lambda", dest="label", default=None, help="torus character label")
    common.add_argument("--group", default="N", help="T, L, H, V, N, G_{..}, W, SL2, Sn or Cn")
    common.add_argument("--pair", default="H-V", choices=["H-V", "T-N"])
    common.add_argument("--budget", type=int, default=None, help="element ceiling (overrides AMTYPEC_BUDGET)")
    common.add_argument("--output", "-o", default=None, help="write the JSON report here")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--timing", action="store_true", help="include wall times (breaks byte-identity)")

    parser = argparse.ArgumentParser(prog="amtypec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in PIPELINES:
        p = sub.add_parser(verb, parents=[common])
        if verb == "group":
            p.add_argument("action", choices=["build", "verify-steinberg", "verify-structure"])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(
        verb=args.verb,
        action=getattr(args, "action", None),
        rank=args.rank,
        q=args.q,
        ell=args.ell,
        delta=args.delta,
        block=args.block,
        group=args.group,
        label=args.label,
        pair=args.pair,
        budget=args.budget,
        output=args.output,
        seed=args.seed,
        timing=args.timing,
    )
    try:
        out, code = dispatch(cfg)
    except InvalidArgument as exc:
        parser.print_usage(sys.stderr)
        print(f"amtypec: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = json.dumps(out, indent=2)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
