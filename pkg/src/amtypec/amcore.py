"""Height-zero machinery for torus Levi subgroups of Sp_2l(q).

Torus characters are labels in (Z/(q-1))^l: the label a sends the torus
element with diagonal (g^k_1, .., g^k_l, ..) to zeta_{q-1}^(a.k), g the fixed
generator of F_q^x.  The Weyl group acts by signed coordinate permutations.
Global counts are combinatorial in these labels; the local side is checked
against the exact character table of N = N_G(T).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .chartab import (
    ClassFunction,
    ExtensionContext,
    brauer_map,
    character_table,
    ell_blocks,
    equivariant_extension_map,
    fusion,
    induce,
    restrict,
)
from .chartab.table import lift_matrix, power_basis
from .chevalley import (
    AutAction,
    additive_basis,
    build_subgroups,
    conformal_torus_action,
    frobenius_action,
    sp_model,
    sp_order,
)
from .groups import matrix_group, perm_group
from .numeric.arith import InvalidArgument, ell_part, factorize, is_prime, lpart, valuation
from .numeric.ffield import field_for_order
from .report import VerificationReport
from .rootsys import (
    LeviDatum,
    Root,
    SignedPerm,
    VerificationFailure,
    build_root_system,
    closure,
    levi_decompose,
    reflection,
    weyl_group,
)

Label = tuple[int, ...]


class Refused(InvalidArgument):
    """Parameters outside the hypotheses of the height-zero statements."""


def check_field(q: int) -> int:
    fac = factorize(q) if q > 1 else {}
    if len(fac) != 1 or 2 in fac:
        raise InvalidArgument(f"q={q} is not an odd prime power")
    return next(iter(fac))


def check_hypotheses(l: int, q: int, ell: int) -> None:
    """Gate: ell prime, ell >= 5, ell != p, ell | q - 1."""
    p = check_field(q)
    if l < 1:
        raise InvalidArgument("rank must be positive")
    if not is_prime(ell):
        raise Refused(f"ell={ell} is not prime")
    if ell == p:
        raise Refused(f"ell={ell} equals the defining characteristic")
    if ell < 5:
        raise Refused(f"ell={ell} < 5 is excluded")
    if (q - 1) % ell:
        raise Refused(f"ell={ell} does not divide q-1={q - 1}")


def parse_label(text, l: int, modulus: int) -> Label:
    if isinstance(text, str):
        parts = [x for x in text.replace("(", "").replace(")", "").split(",") if x.strip()]
        vals = [int(x) for x in parts]
    else:
        vals = [int(x) for x in text]
    if len(vals) != l:
        raise InvalidArgument(f"label {text!r} must have {l} entries")
    return tuple(v % modulus for v in vals)


def all_labels(l: int, modulus: int) -> list[Label]:
    return [tuple(int(x) for x in v) for v in np.ndindex(*([modulus] * l))]


def ell_prime_part(lam: Label, q: int, ell: int) -> Label:
    """Component of lam of order prime to ell (CRT in each coordinate)."""
    lp = lpart(q - 1, ell)
    a, b = lp.ell_part, lp.ell_prime_part
    # x = 0 mod a and x = lam mod b
    u = a * pow(a, -1, b) if b > 1 else 0
    return tuple((x * u) % (q - 1) for x in lam)


def label_stabilizer(lam: Label, l: int, modulus: int) -> list[SignedPerm]:
    return [w for w in weyl_group(l).elements if w.act_label(lam, modulus) == tuple(lam)]


# -- torus blocks ------------------------------------------------------------------


@dataclass(frozen=True)
class BlockLabel:
    l: int
    q: int
    ell: int
    ell_prime_label: Label
    members: tuple[Label, ...]
    stabilizer: tuple[SignedPerm, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def is_principal(self) -> bool:
        return not any(self.ell_prime_label)

    def to_dict(self) -> dict:
        return {
            "l": self.l,
            "q": self.q,
            "ell": self.ell,
            "ell_prime_label": list(self.ell_prime_label),
            "size": self.size,
            "stabilizer_order": len(self.stabilizer),
            "stabilizer": [list(w.img) for w in self.stabilizer],
        }


def _block(l: int, q: int, ell: int, lam0: Label) -> BlockLabel:
    m = q - 1
    b = lpart(m, ell).ell_prime_part
    shifts = np.ndindex(*([m // b] * l))
    members = tuple(sorted(tuple((x + b * s) % m for x, s in zip(lam0, shift)) for shift in shifts))
    return BlockLabel(l, q, ell, lam0, members, tuple(label_stabilizer(lam0, l, m)))


def torus_blocks(l: int, q: int, ell: int) -> list[BlockLabel]:
    """ell-blocks of T: one per ell'-label, members = ell'-label + ell-power-order labels."""
    p = check_field(q)
    if not is_prime(ell) or ell == p:
        raise InvalidArgument(f"ell={ell} must be a prime different from p={p}")
    m = q - 1
    a = lpart(m, ell).ell_part
    ell_prime = [tuple(int(x) * a for x in v) for v in np.ndindex(*([m // a] * l))]
    return [_block(l, q, ell, lam0) for lam0 in sorted(ell_prime)]


def find_block(l: int, q: int, ell: int, label) -> BlockLabel:
    """Block containing ``label`` (any member, in particular its ell'-label)."""
    lam = parse_label(label, l, q - 1) if label is not None else (0,) * l
    return _block(l, q, ell, ell_prime_part(lam, q, ell))


def _resolve_block(l, q, ell, block) -> BlockLabel:
    if isinstance(block, BlockLabel):
        return block
    return find_block(l, q, ell, block)


# -- relative Weyl groups --------------------------------------------------------------


def signed_perm_group(elements, l: int, name: str = "W"):
    gens = [w.to_perm() for w in elements if not w.is_identity()]
    if not gens:
        gens = [np.arange(2 * l)]
    G = perm_group(2 * l, gens, name=name)
    G.enumerate()
    if G.order != len(elements):
        raise VerificationFailure("signed permutations do not form a group", len(elements))
    return G


@dataclass
class RelativeWeyl:
    psi: Label
    elements: list[SignedPerm]
    block_stabilizer: list[SignedPerm]
    index_in_block: int
    nb_equals_nlambda: bool | None

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def group(self):
        return signed_perm_group(self.elements, len(self.psi), name=f"W{self.psi}")

    @cached_property
    def table(self):
        return character_table(self.group)

    def element_class(self, w: SignedPerm) -> int:
        G = self.group
        return int(G.class_of[G.index(w.to_perm()[None])[0]])

    def to_dict(self) -> dict:
        return {
            "psi": list(self.psi),
            "order": self.order,
            "block_stabilizer_order": len(self.block_stabilizer),
            "index_in_block": self.index_in_block,
            "nb_equals_nlambda": self.nb_equals_nlambda,
        }


def relative_weyl(psi, l: int, q: int, ell: int | None = None, datum: LeviDatum | None = None) -> RelativeWeyl:
    """W(psi) = stabilizer of psi in N/T, with [N_b : N_psi] when ell is given."""
    if datum is not None and datum.delta_prime:
        raise InvalidArgument("relative Weyl groups are only implemented for the torus Levi")
    return _relative_weyl(parse_label(psi, l, q - 1), l, q, ell)


@lru_cache(maxsize=None)
def _relative_weyl(psi: Label, l: int, q: int, ell: int | None) -> RelativeWeyl:
    m = q - 1
    Wpsi = label_stabilizer(psi, l, m)
    Wb, nb_ok, index = Wpsi, None, 1
    if ell is not None:
        lam0 = ell_prime_part(psi, q, ell)
        Wb = label_stabilizer(lam0, l, m)
        blk = _block(l, q, ell, lam0)
        members = set(blk.members)
        set_stab = [w for w in weyl_group(l).elements if {w.act_label(x, m) for x in members} == members]
        nb_ok = set(set_stab) == set(Wb)
        index = len(Wb) // len(Wpsi)
    return RelativeWeyl(psi, Wpsi, Wb, index, nb_ok)


# -- height-zero counts -----------------------------------------------------------------


@dataclass
class HZRecord:
    psi: Label
    orbit_size: int
    w_psi_order: int
    eta: int
    eta_degree: int
    psi_height_zero: bool
    eta_ok: bool
    index_ok: bool
    global_ell_part: int
    local_degree: int

    @property
    def height_zero(self) -> bool:
        return self.psi_height_zero and self.eta_ok and self.index_ok

    def to_dict(self) -> dict:
        return {
            "psi": list(self.psi),
            "orbit_size": self.orbit_size,
            "W_psi_order": self.w_psi_order,
            "eta": self.eta,
            "eta_degree": self.eta_degree,
            "flags": {
                "psi_height_zero": self.psi_height_zero,
                "eta_ell_prime": self.eta_ok,
                "index_ell_prime": self.index_ok,
            },
            "height_zero": self.height_zero,
            "global_ell_part": self.global_ell_part,
            "local_degree": self.local_degree,
        }


def orbit_representatives(block: BlockLabel) -> list[tuple[Label, int]]:
    """Lexicographically least label of each W(b)-orbit on the block, with orbit size."""
    m = block.q - 1
    seen: set[Label] = set()
    out = []
    for lam in block.members:
        if lam in seen:
            continue
        orbit = {w.act_label(lam, m) for w in block.stabilizer}
        seen |= orbit
        out.append((lam, len(orbit)))
    return out


@dataclass
class GlobalCount:
    block: BlockLabel
    count: int
    records: list[HZRecord]
    degree_consistent: bool

    def to_dict(self) -> dict:
        return {
            "block": self.block.to_dict(),
            "count": self.count,
            "degree_consistent": self.degree_consistent,
            "records": [r.to_dict() for r in self.records],
        }


def _records(block: BlockLabel) -> list[HZRecord]:
    l, q, ell = block.l, block.q, block.ell
    m = q - 1
    Gl = ell_part(sp_order(l, q), ell)
    T = m**l
    Wb = len(block.stabilizer)
    out = []
    for psi, orbit in orbit_representatives(block):
        rw = relative_weyl(psi, l, q, ell)
        tab = rw.table
        n_psi = T * rw.order
        for eta in range(len(tab)):
            d = int(tab.degrees[eta])
            glob = (Gl // math.gcd(Gl, ell_part(n_psi, ell))) * ell_part(d, ell)
            out.append(
                HZRecord(
                    psi=psi,
                    orbit_size=orbit,
                    w_psi_order=rw.order,
                    eta=eta,
                    eta_degree=d,
                    psi_height_zero=True,  # T is abelian
                    eta_ok=ell_part(d, ell) == 1,
                    index_ok=ell_part(Wb // rw.order, ell) == 1,
                    global_ell_part=glob,
                    local_degree=(weyl_group(l).order // rw.order) * d,
                )
            )
    return out


def count_global_hz(l: int, q: int, ell: int, block=None) -> GlobalCount:
    """Height-zero labels (psi, eta) of the Harish-Chandra series above the block."""
    check_hypotheses(l, q, ell)
    block = _resolve_block(l, q, ell, block)
    recs = _records(block)
    hz = [r for r in recs if r.height_zero]
    # height zero <=> minimal degree ell-part among the block's constituents
    low = min(r.global_ell_part for r in recs)
    consistent = all((r.global_ell_part == low) == r.height_zero for r in recs)
    return GlobalCount(block, len(hz), recs, consistent)


class TorusSetup:
    """N = N_G(T) with exact tables and the label <-> Irr(T) dictionary."""

    def __init__(self, l: int, q: int):
        self.l, self.q = l, q
        self.m = q - 1
        self.datum = levi_decompose(l, ())
        self.sub = build_subgroups(self.datum, q)
        self.S = self.sub.S
        self.T, self.N = self.sub.T, self.sub.N
        self.Tt = character_table(self.T)
        self.Nt = character_table(self.N)
        self.fus_TN = fusion(self.Tt, self.Nt)
        self.ext = ExtensionContext(self.T, self.N, self.Tt)
        self._blocks: dict = {}
        self._label_dictionary()

    def _label_dictionary(self):
        S, F, T, Tt = self.S, self.S.F, self.T, self.Tt
        if Tt.e != self.m:
            raise VerificationFailure("torus exponent differs from q-1", Tt.e)
        g = F.generator_code
        PB = power_basis(self.m)
        row_to_exp = {PB[k].tobytes(): k for k in range(self.m)}
        gen_cls = [int(T.class_of[T.index(S.torus_unit(i, g)[None])[0]]) for i in range(1, self.l + 1)]
        self.label_of = []
        for i in range(len(Tt)):
            lam = []
            for c in gen_cls:
                k = row_to_exp.get(Tt.coeffs[i, c].tobytes())
                if k is None:
                    raise VerificationFailure("torus character value is not a (q-1)-th root of unity", i)
                lam.append(k)
            self.label_of.append(tuple(lam))
        self.char_of = {lam: i for i, lam in enumerate(self.label_of)}
        if len(self.char_of) != len(Tt):
            raise VerificationFailure("labels do not separate Irr(T)")
        # full check on every element: value at diag(g^k) is zeta^(a.k)
        logs = self.torus_logs(T.elems(np.arange(T.order)))
        for i, lam in enumerate(self.label_of):
            exps = (logs @ np.array(lam)) % self.m
            vals = Tt.coeffs[i][T.class_of]
            if not np.array_equal(vals, PB[exps]):
                raise VerificationFailure("label dictionary inconsistent", lam)

    def torus_logs(self, X) -> np.ndarray:
        """Discrete logs of the first l diagonal entries of diagonal matrices."""
        F = self.S.F
        codes = F.mat_to_codes(X) if F.m > 1 else np.asarray(X)[..., 0, :, :]
        idx = [self.S.e(i) for i in range(1, self.l + 1)]
        diag = codes[..., idx, idx]
        return F.log[diag].astype(np.int64)

    def torus_character(self, lam) -> int:
        return self.char_of[tuple(x % self.m for x in lam)]

    def blocks(self, ell: int):
        if ell not in self._blocks:
            self._blocks[ell] = (ell_blocks(self.Tt, ell), ell_blocks(self.Nt, ell))
        return self._blocks[ell]

    def local_character(self, psi: Label, eta: int, rw: RelativeWeyl, ext_index: int | None = None) -> tuple[int, int]:
        """Irr(N) index and multiplicity-check of Ind_{N_psi}^N(psi~ eta)."""
        rec = self.ext.search(self.torus_character(psi))
        if not rec.extensions:
            raise VerificationFailure("character of T without extension to its stabilizer", psi)
        S, St, _, _ = self.ext.stabilizer_group(rec.stabilizer_indices)
        j = rec.extensions[0] if ext_index is None else ext_index
        ext = St.character(j)
        etaf = self.inflate_eta(St, rw, eta)
        prod = ext * etaf
        ind = induce(prod, self.Nt, fusion(St, self.Nt))
        dec = self.Nt.decompose(ind)
        nz = np.nonzero(dec)[0]
        if len(nz) != 1 or dec[nz[0]] != 1:
            raise VerificationFailure("induced character is not irreducible", {"psi": psi, "eta": eta})
        return int(nz[0]), int(self.Nt.degrees[nz[0]])

    def inflate_eta(self, St, rw: RelativeWeyl, eta: int) -> ClassFunction:
        """eta in Irr(W(psi)) as a character of N_psi through N_psi -> N_psi/T = W(psi)."""
        Wt = rw.table
        S = St.group
        reps = S.elems(St.classes.reps)
        rows = []
        for x in reps:
            w = self.S.weyl_image(x)
            rows.append(Wt.coeffs[eta, rw.element_class(w)])
        rows = np.array(rows, dtype=np.int64) @ lift_matrix(Wt.e, St.e) if Wt.e != St.e else np.array(rows)
        return ClassFunction(St, St.e, rows, 1)


@lru_cache(maxsize=None)
def torus_setup(l: int, q: int) -> TorusSetup:
    return TorusSetup(l, q)


@dataclass
class LocalCount:
    block: BlockLabel
    count: int
    bruteforce: int | None
    hz_characters: list[int]
    local_characters: dict
    report: VerificationReport

    def to_dict(self) -> dict:
        return {
            "block": self.block.to_dict(),
            "count": self.count,
            "bruteforce": self.bruteforce,
            "hz_characters": self.hz_characters,
            "local_characters": {f"{list(k[0])}:{k[1]}": v for k, v in self.local_characters.items()},
            "report": self.report.to_dict(timing=False),
        }


def count_local_hz(l: int, q: int, ell: int, block=None, bruteforce: bool = True) -> LocalCount:
    """Local height-zero count from induced degrees, cross-checked against Irr_0 of the block of N over b."""
    check_hypotheses(l, q, ell)
    block = _resolve_block(l, q, ell, block)
    rep = VerificationReport("local height-zero count", {"l": l, "q": q, "ell": ell, "block": list(block.ell_prime_label)})
    m = q - 1
    W = weyl_group(l).order
    T_ell = ell_part(m**l, ell)
    Nb_ell = T_ell * ell_part(len(block.stabilizer), ell)  # |D(b)| [N_b:T]_ell with D(b) Sylow in T
    N_ell = ell_part(m**l * W, ell)
    target = N_ell // Nb_ell  # degree ell-part of height-zero characters of the covering block
    recs = _records(block)
    local_hz = [r for r in recs if ell_part(r.local_degree, ell) == target]
    count = len(local_hz)
    rep.add("local-criteria-agree", "local-height-zero", all((r in local_hz) == r.height_zero for r in recs))
    brute, hz_chars, locals_ = None, [], {}
    if bruteforce:
        setup = torus_setup(l, q)
        bT, bN = setup.blocks(ell)
        lam0 = setup.torus_character(block.ell_prime_label)
        b = bT.block_of[lam0]
        members_ok = sorted(bT.blocks[b]) == sorted(setup.torus_character(x) for x in block.members)
        rep.add("torus-block-members", "unique-ell-prime-member", members_ok)
        bt = brauer_map(b, bT, bN, setup.fus_TN)
        # blocks of N covering b: those with a member whose restriction meets b
        Tt, Nt = setup.Tt, setup.Nt
        bset = set(bT.blocks[b])
        covering = set()
        for chi in range(len(Nt)):
            dec = Tt.decompose(restrict(Nt.character(chi), Tt, setup.fus_TN))
            if bset & set(np.nonzero(dec)[0].tolist()):
                covering.add(bN.block_of[chi])
        rep.add("unique-covering-block", "unique-covering-block", covering == {bt}, sorted(covering))
        if bt is None:
            raise VerificationFailure("Brauer correspondent of the torus block is undefined", block.ell_prime_label)
        hz_chars = [i for i in bN.blocks[bt] if bN.heights[i] == 0]
        brute = len(hz_chars)
        dT = bT.defects[b]
        rep.add(
            "defect-identity",
            "defect-identity",
            bN.defects[bt] == dT + valuation(len(block.stabilizer), ell),
            {"defect_b": dT, "defect_bt": bN.defects[bt], "Nb_over_T": len(block.stabilizer)},
        )
        for r in local_hz:
            rw = relative_weyl(r.psi, l, q, ell)
            locals_[(r.psi, r.eta)] = setup.local_character(r.psi, r.eta, rw)[0]
        rep.add(
            "local-set-equality",
            "irr-of-covering-block",
            sorted(locals_.values()) == sorted(hz_chars),
            {"constructed": sorted(locals_.values()), "height_zero": hz_chars},
        )
        rep.add("count-equality", "height-zero-bijection", brute == count, {"combinatorial": count, "bruteforce": brute})
    return LocalCount(block, count, brute, hz_chars, locals_, rep)


# -- R(lambda) ------------------------------------------------------------------------


@dataclass
class RankOneLevi:
    root: Root
    B: object
    L: object
    Bt: object
    Lt: object
    fus: np.ndarray


@lru_cache(maxsize=None)
def rank_one_levi(l: int, q: int, alpha: Root) -> RankOneLevi:
    """L_alpha = <T, X_alpha, X_-alpha> and B_alpha = T X_alpha with their tables."""
    S = sp_model(l, q)
    F = S.F
    tgens = [S.torus_unit(i, F.generator_code) for i in range(1, l + 1)]
    adds = additive_basis(F)
    xs = [S.x(alpha, c) for c in adds]
    xm = [S.x(-alpha, c) for c in adds]
    B = matrix_group(F, tgens + xs, name=f"B_{alpha}")
    L = matrix_group(F, tgens + xs + xm, name=f"L_{alpha}")
    Bt, Lt = character_table(B), character_table(L)
    return RankOneLevi(alpha, B, L, Bt, Lt, fusion(Bt, Lt))


def harish_chandra_rank_one(lam: Label, l: int, q: int, alpha: Root) -> list[tuple[int, int]]:
    """Constituents (index, multiplicity) of R_T^{L_alpha}(lam), via inflation to B_alpha."""
    R = rank_one_levi(l, q, alpha)
    S = sp_model(l, q)
    m = q - 1
    reps = R.B.elems(R.Bt.classes.reps)
    # diag(b) = diag(t) for b = t u with u in X_alpha
    logs = _diag_logs(S, reps, l)
    exps = (logs @ np.array(lam)) % m
    rows = power_basis(m)[exps] @ lift_matrix(m, R.Bt.e)
    infl = ClassFunction(R.Bt, R.Bt.e, rows, 1)
    dec = R.Lt.decompose(induce(infl, R.Lt, R.fus))
    return [(int(i), int(dec[i])) for i in np.nonzero(dec)[0]]


def _diag_logs(S, X, l: int) -> np.ndarray:
    F = S.F
    codes = F.mat_to_codes(X)
    idx = [S.e(i) for i in range(1, l + 1)]
    return F.log[codes[..., idx, idx]].astype(np.int64)


@dataclass
class ReflectionDatum:
    lam: Label
    w_lambda: list[SignedPerm]
    evidence: dict  # root string -> constituent degrees
    phi_lambda: list[Root]
    R: list[SignedPerm]

    @property
    def contained(self) -> bool:
        return set(self.R) <= set(self.w_lambda)

    def to_dict(self) -> dict:
        return {
            "lambda": list(self.lam),
            "W_lambda_order": len(self.w_lambda),
            "evidence": self.evidence,
            "phi_lambda": [str(a) for a in self.phi_lambda],
            "R_order": len(self.R),
            "R_le_W_lambda": self.contained,
        }


@lru_cache(maxsize=None)
def compute_R_lambda(lam, l: int, q: int) -> ReflectionDatum:
    """R(lam) generated by s_alpha in W(lam) whose rank-one constituents have different degrees."""
    check_field(q)
    m = q - 1
    lam = parse_label(lam, l, m)
    Wl = label_stabilizer(lam, l, m)
    Wset = set(Wl)
    evidence, phi = {}, []
    for alpha in build_root_system(l).positive:
        s = reflection(alpha)
        if s not in Wset:
            continue
        cons = harish_chandra_rank_one(lam, l, q, alpha)
        Lt = rank_one_levi(l, q, alpha).Lt
        degs = sorted(int(Lt.degrees[i]) for i, _ in cons)
        if len(cons) != 2 or any(mult != 1 for _, mult in cons):
            raise VerificationFailure("rank-one induction does not split into two constituents", (lam, str(alpha), cons))
        evidence[str(alpha)] = degs
        if degs[0] != degs[1]:
            phi.append(alpha)
    R = sorted(closure([reflection(a) for a in phi], l), key=lambda w: w.img)
    return ReflectionDatum(lam, Wl, evidence, phi, R)


# -- equivariant extension map, delta --------------------------------------------------------


def torus_automorphisms(l: int, q: int) -> list[AutAction]:
    """Conformal-torus coset representatives followed by the field automorphism F_0."""
    return conformal_torus_action(l, q) + [frobenius_action(l, q)]


@lru_cache(maxsize=None)
def torus_extension_map(l: int, q: int):
    """Extension map on Irr(T) equivariant under N and the outer automorphisms, off fixed points."""
    setup = torus_setup(l, q)
    auts = [a for a in torus_automorphisms(l, q) if a.matrix is not None or a.kind == "frobenius"]
    return equivariant_extension_map(
        setup.T, setup.N, automorphisms=auts, K_table=setup.Tt, fixed_points=False
    )


@dataclass
class DeltaResult:
    lam: Label
    sigma: str
    sigma_lam: Label
    delta_values: list
    linear: bool
    trivial: bool
    kernel_ok: bool
    R_order: int

    def to_dict(self) -> dict:
        return {
            "lambda": list(self.lam),
            "sigma": self.sigma,
            "sigma_lambda": list(self.sigma_lam),
            "delta": self.delta_values,
            "linear": self.linear,
            "trivial": self.trivial,
            "R_in_kernel": self.kernel_ok,
            "R_order": self.R_order,
        }


def _aut_perm(setup: TorusSetup, sigma: AutAction) -> np.ndarray:
    N = setup.N
    allN = N.elems(np.arange(N.order))
    img = N.index(sigma.apply(allN), strict=False)
    if (img < 0).any():
        raise VerificationFailure("automorphism does not preserve N", sigma.kind)
    return img


def compute_delta(lam, sigma: AutAction, l: int, q: int, emap=None) -> DeltaResult:
    """delta with delta * Lambda(sigma lam) = sigma(Lambda(lam)), and R(sigma lam) <= ker delta."""
    setup = torus_setup(l, q)
    m = q - 1
    lam = parse_label(lam, l, m)
    emap = emap or torus_extension_map(l, q)
    if not emap.ok:
        raise VerificationFailure("no equivariant extension map", emap.reason)
    slam = sigma.act_label(lam, m)
    i, si = setup.torus_character(lam), setup.torus_character(slam)
    ctx, N = setup.ext, setup.N
    rec_l, rec_s = ctx.search(i), ctx.search(si)
    S1, St1, _, in1 = ctx.stabilizer_group(rec_l.stabilizer_indices)
    S2, St2, _, in2 = ctx.stabilizer_group(rec_s.stabilizer_indices)
    perm = _aut_perm(setup, sigma)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    # sigma(Lambda(lam)) on N_{sigma lam}: x -> Lambda(lam)(sigma^-1 x)
    reps2 = in2[St2.classes.reps]
    pre = inv[reps2]
    pos1 = np.full(N.order, -1, dtype=np.int64)
    pos1[in1] = np.arange(len(in1))
    if (pos1[pre] < 0).any():
        raise VerificationFailure("sigma does not map N_lam onto N_{sigma lam}", lam)
    cls1 = S1.class_of[pos1[pre]]
    twisted_rows = St1.coeffs[emap.mapping[i]][cls1]
    E = math.lcm(St1.e, St2.e)
    twisted = ClassFunction(St2, E, twisted_rows @ lift_matrix(St1.e, E), 1)
    base = St2.character(emap.mapping[si])
    if restrict(twisted, setup.Tt) != setup.Tt.character(si) or restrict(base, setup.Tt) != setup.Tt.character(si):
        raise VerificationFailure("twisted extension does not extend sigma(lam)", lam)
    delta = None
    for k in range(len(St2)):
        if St2.degrees[k] != 1:
            continue
        if base * St2.character(k) == twisted:
            delta = k
            break
    if delta is None:
        raise VerificationFailure("extensions do not differ by a linear character", lam)
    dvals = St2.character(delta)
    one = np.zeros(St2.phi, dtype=np.int64)
    one[0] = 1
    trivial = bool((St2.coeffs[delta] == one).all())
    Rd = compute_R_lambda(slam, l, q)
    S = setup.S
    kernel_ok = True
    for w in Rd.R:
        x = S.weyl_lift(w)
        c = S2.class_of[S2.index(x[None])[0]]
        if not (St2.coeffs[delta, c] == one).all():
            kernel_ok = False
    return DeltaResult(
        lam,
        sigma.kind,
        slam,
        [str(v) for v in dvals.values()],
        bool(St2.degrees[delta] == 1),
        trivial,
        kernel_ok,
        len(Rd.R),
    )


# -- Omega ---------------------------------------------------------------------------------


@dataclass
class OmegaRow:
    psi: Label
    eta: int
    eta_degree: int
    global_ell_part: int
    local_character: int
    local_degree: int
    in_block: bool
    height_zero: bool

    def to_dict(self) -> dict:
        return {
            "global": {"psi": list(self.psi), "eta": self.eta, "eta_degree": self.eta_degree, "ell_part": self.global_ell_part},
            "local": {"character": self.local_character, "degree": self.local_degree},
            "in_block": self.in_block,
            "height_zero": self.height_zero,
        }


@dataclass
class OmegaTable:
    block: BlockLabel
    rows: list[OmegaRow]
    report: VerificationReport
    extension_map: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "block": self.block.to_dict(),
            "rows": [r.to_dict() for r in self.rows],
            "extension_map": self.extension_map,
            "report": self.report.to_dict(timing=False),
        }


def _twist_character(setup: TorusSetup, chi: int, perm: np.ndarray) -> int:
    """Index of chi^sigma in Irr(N), chi^sigma(sigma x) = chi(x)."""
    Nt, N = setup.Nt, setup.N
    reps = Nt.classes.reps
    target = N.class_of[perm[reps]]
    rows = np.empty_like(Nt.coeffs[chi])
    rows[target] = Nt.coeffs[chi]
    for k in range(len(Nt)):
        if np.array_equal(Nt.coeffs[k], rows):
            return k
    raise VerificationFailure("twisted character not irreducible", chi)


def omega_table(l: int, q: int, ell: int, block=None, equivariance: bool = True) -> OmegaTable:
    """Pairing R_T^G(psi)_eta <-> Ind_{N_psi}^N(Lambda(psi) eta) on height-zero labels."""
    check_hypotheses(l, q, ell)
    block = _resolve_block(l, q, ell, block)
    setup = torus_setup(l, q)
    rep = VerificationReport("omega", {"l": l, "q": q, "ell": ell, "block": list(block.ell_prime_label)})
    emap = torus_extension_map(l, q)
    rep.add("extension-map", "equivariant-extension-map", emap.ok, emap.reason or None)
    if not emap.ok:
        raise VerificationFailure("equivariant extension map failed", emap.obstruction)
    glob = count_global_hz(l, q, ell, block)
    loc = count_local_hz(l, q, ell, block)
    bT, bN = setup.blocks(ell)
    bt = brauer_map(bT.block_of[setup.torus_character(block.ell_prime_label)], bT, bN, setup.fus_TN)
    rows = []
    for r in glob.records:
        if not r.height_zero:
            continue
        rw = relative_weyl(r.psi, l, q, ell)
        i = setup.torus_character(r.psi)
        chi, deg = setup.local_character(r.psi, r.eta, rw, emap.mapping[i])
        rows.append(
            OmegaRow(
                r.psi,
                r.eta,
                r.eta_degree,
                r.global_ell_part,
                chi,
                deg,
                bN.block_of[chi] == bt,
                bN.heights.get(chi) == 0,
            )
        )
    locs = [r.local_character for r in rows]
    rep.add("bijection", "omega-bijection", len(set(locs)) == len(rows) and sorted(locs) == sorted(loc.hz_characters),
            {"rows": len(rows), "height_zero_in_block": len(loc.hz_characters)})
    rep.add("block-membership", "omega-block", all(r.in_block for r in rows))
    rep.add("degree-identity", "local-degree", all(
        r.local_degree == (weyl_group(l).order // relative_weyl(r.psi, l, q, ell).order) * r.eta_degree for r in rows
    ))
    rep.add("ell-part-identity", "local-degree", all(
        ell_part(r.local_degree, ell)
        == ell_part(relative_weyl(r.psi, l, q, ell).index_in_block, ell) * ell_part(r.eta_degree, ell)
        * ell_part(weyl_group(l).order // len(block.stabilizer), ell)
        for r in rows
    ))
    if equivariance:
        m = q - 1
        for sigma in torus_automorphisms(l, q):
            perm = _aut_perm(setup, sigma)
            sblock = find_block(l, q, ell, sigma.act_label(block.ell_prime_label, m))
            if sblock.ell_prime_label == block.ell_prime_label:
                other = rows
            else:
                other = omega_table(l, q, ell, sblock, equivariance=False).rows
            twisted = sorted(_twist_character(setup, r.local_character, perm) for r in rows)
            orbits_here = sorted((tuple(sorted({w.act_label(sigma.act_label(r.psi, m), m) for w in sblock.stabilizer}))) for r in rows)
            orbits_there = sorted(tuple(sorted({w.act_label(r.psi, m) for w in sblock.stabilizer})) for r in other)
            ok = twisted == sorted(r.local_character for r in other) and orbits_here == orbits_there
            rep.add(f"equivariance[{sigma.kind}:{sigma.data.get('coset', sigma.data.get('p'))}]", "omega-equivariance", ok)
    return OmegaTable(block, rows, rep, {str(k): v for k, v in emap.mapping.items()})
