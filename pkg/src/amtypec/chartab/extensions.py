"""Extensions of characters of a normal subgroup to their inertia groups.

Characters of subgroups of an ambient group M are compared at element level:
a character of S <= M becomes an integer vector over the elements of M holding
an interned value id (or -1 outside S).  Automorphisms act by permuting the
element indices of M, so transport and equivariance checks are plain array
operations.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..groups import GeneratedGroup
from ..numeric.arith import InvalidArgument
from .table import CharacterTable, character_table, fusion, lift_matrix, restrict


def is_normal(K: GeneratedGroup, M: GeneratedGroup) -> bool:
    kind = M.kind
    Kg = np.stack(K.gens)
    for g in M.gens:
        gi = kind.inv(g)
        if not K.contains(kind.mul(kind.mul(g, Kg), gi)).all():
            return False
    return M.contains(Kg).all()


def element_class_perms(K: GeneratedGroup, M: GeneratedGroup) -> np.ndarray:
    """P[x, c] = K-class of m_x k_c m_x^-1 for every element m_x of M."""
    M.enumerate()
    kind = M.kind
    reps = K.elems(K.class_reps)
    gen_perm = []
    for g in M.gens:
        gen_perm.append(K.class_of[K.index(kind.mul(kind.mul(g, reps), kind.inv(g)))])
    gen_perm = np.stack(gen_perm)
    P = np.empty((M.order, len(reps)), dtype=np.int64)
    P[0] = np.arange(len(reps))
    for d in range(1, int(M.layer.max()) + 1 if M.order > 1 else 1):
        sel = np.nonzero(M.layer == d)[0]
        # x = parent * g, so conj by x is conj by g followed by conj by parent
        P[sel] = np.take_along_axis(P[M.parent[sel]], gen_perm[M.via[sel]], axis=1)
    return P


def subgroup_from_elements(M: GeneratedGroup, idx: np.ndarray, seed_gens, name: str) -> GeneratedGroup:
    """Subgroup of M generated by ``seed_gens`` and enough of the elements ``idx`` to reach |idx|."""
    gens = list(seed_gens)
    target = len(idx)
    S = M.subgroup(gens, name=name)
    S.enumerate()
    while S.order < target:
        inside = S.contains(M.elems(idx))
        new = idx[~inside][0]
        gens.append(M.element(int(new)))
        S = M.subgroup(gens, name=name)
        S.enumerate()
    if S.order != target:
        raise InvalidArgument("element set is not a subgroup")
    return S


@dataclass
class ExtensionRecord:
    base: int
    K: GeneratedGroup
    M: GeneratedGroup
    stabilizer: GeneratedGroup
    stabilizer_table: CharacterTable
    extensions: list[int]
    gallagher_count: int
    orbit_size: int
    stabilizer_indices: np.ndarray = field(repr=False, default=None)

    @property
    def extendible(self) -> bool:
        return bool(self.extensions)

    @property
    def gallagher_ok(self) -> bool:
        return not self.extensions or len(self.extensions) == self.gallagher_count

    def to_dict(self) -> dict:
        return {
            "base": self.base,
            "K_order": self.K.order,
            "M_order": self.M.order,
            "stabilizer_order": self.stabilizer.order,
            "orbit_size": self.orbit_size,
            "extensions": [
                {"index": i, "values": self.stabilizer_table.coeffs[i].tolist()} for i in self.extensions
            ],
            "gallagher_count": self.gallagher_count,
            "gallagher_ok": self.gallagher_ok,
        }


class ExtensionContext:
    """Shared data for extension questions about K normal in M."""

    def __init__(self, K: GeneratedGroup, M: GeneratedGroup, K_table: CharacterTable | None = None):
        K.enumerate()
        M.enumerate()
        if not is_normal(K, M):
            raise InvalidArgument(f"{K.name} is not normal in {M.name}")
        self.K, self.M = K, M
        self.Kt = K_table or character_table(K)
        self.perms = element_class_perms(K, M)
        self._records: dict[int, ExtensionRecord] = {}
        self._stabilizers: dict[bytes, tuple[GeneratedGroup, CharacterTable, np.ndarray, np.ndarray]] = {}

    def stabilizer_group(self, idx: np.ndarray):
        """Subgroup on the element set ``idx`` with its table, fusion and element map (cached)."""
        key = idx.tobytes()
        hit = self._stabilizers.get(key)
        if hit is None:
            S = subgroup_from_elements(self.M, idx, self.K.gens, name=f"{self.M.name}_stab{len(self._stabilizers)}")
            St = character_table(S)
            in_M = self.M.index(S.elems(np.arange(S.order)))
            hit = (S, St, fusion(self.Kt, St), in_M)
            self._stabilizers[key] = hit
        return hit

    def stabilizer_indices(self, lam: int) -> np.ndarray:
        row = self.Kt.coeffs[lam]
        _, vid = np.unique(row, axis=0, return_inverse=True)
        vid = vid.ravel()
        mask = (vid[self.perms] == vid[None, :]).all(axis=1)
        return np.nonzero(mask)[0]

    def search(self, lam: int) -> ExtensionRecord:
        if lam in self._records:
            return self._records[lam]
        K, M, Kt = self.K, self.M, self.Kt
        idx = self.stabilizer_indices(lam)
        S, St, fus, _ = self.stabilizer_group(idx)
        target = Kt.character(lam)
        exts = []
        for i in range(len(St)):
            if St.degrees[i] != Kt.degrees[lam]:
                continue
            if restrict(St.character(i), Kt, fus) == target:
                exts.append(i)
        lin = [i for i in range(len(St)) if St.degrees[i] == 1]
        kernel_ok = [i for i in lin if set(np.unique(fus).tolist()) <= set(St.kernel(i).tolist())]
        rec = ExtensionRecord(
            base=lam,
            K=K,
            M=M,
            stabilizer=S,
            stabilizer_table=St,
            extensions=exts,
            gallagher_count=len(kernel_ok),
            orbit_size=M.order // len(idx),
            stabilizer_indices=idx,
        )
        self._records[lam] = rec
        return rec


def extension_search(K: GeneratedGroup, M: GeneratedGroup, lam: int, K_table: CharacterTable | None = None) -> ExtensionRecord:
    """All extensions of Irr(K)[lam] to its stabilizer in M."""
    return ExtensionContext(K, M, K_table).search(lam)


# -- equivariant extension maps -------------------------------------------------------


class _Interner:
    def __init__(self):
        self.ids: dict[bytes, int] = {}

    def __call__(self, rows: np.ndarray) -> np.ndarray:
        out = np.empty(len(rows), dtype=np.int64)
        for i, r in enumerate(rows):
            out[i] = self.ids.setdefault(r.tobytes(), len(self.ids))
        return out


@dataclass
class EquivariantMapResult:
    ok: bool
    mapping: dict[int, int]  # lam -> extension index in the stabilizer table of lam
    orbits: list[list[int]]
    obstruction: int | None = None
    reason: str = ""
    checks: int = 0
    records: dict[int, ExtensionRecord] = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "orbits": self.orbits,
            "mapping": {str(k): v for k, v in self.mapping.items()},
            "obstruction": self.obstruction,
            "reason": self.reason,
            "checks": self.checks,
        }


def _apply(a, X):
    return a.apply(X) if hasattr(a, "apply") else a(X)


def equivariant_extension_map(
    K: GeneratedGroup,
    M: GeneratedGroup,
    chars=None,
    automorphisms=(),
    include_inner: bool = True,
    K_table: CharacterTable | None = None,
    fixed_points: bool = True,
) -> EquivariantMapResult:
    """Extension map on ``chars`` equivariant under M-conjugation (optional) and ``automorphisms``.

    Each automorphism is a callable (or object with ``apply``) on batches of
    elements preserving K and M.  Choices are made on orbit representatives,
    tested against all generators fixing the representative's orbit, and
    transported; the whole map is then verified exhaustively.  With
    ``fixed_points=False`` an automorphism is only required to intertwine
    Lambda(lam) and Lambda(lam^a) when lam^a != lam.
    """
    ctx = ExtensionContext(K, M, K_table)
    Kt = ctx.Kt
    chars = list(range(len(Kt))) if chars is None else [int(c) for c in chars]
    N = M.order
    kind = M.kind
    allM = M.elems(np.arange(N))

    # generators as permutations of M's element indices
    gens = []
    is_aut = []
    if include_inner:
        for g in M.gens:
            gens.append(M.index(kind.mul(kind.mul(g, allM), kind.inv(g))))
            is_aut.append(False)
    for a in automorphisms:
        img = M.index(_apply(a, allM), strict=False)
        if (img < 0).any():
            raise InvalidArgument("automorphism does not preserve the ambient group")
        if len(np.unique(img)) != N:
            raise InvalidArgument("automorphism is not bijective")
        gens.append(img)
        is_aut.append(True)
    if not gens:
        gens.append(np.arange(N))
        is_aut.append(False)

    E = M.exponent
    intern = _Interner()
    K_in_M = M.index(K.elems(np.arange(K.order)))

    def lam_vector(i: int) -> np.ndarray:
        vals = intern(Kt.coeffs[i] @ lift_matrix(Kt.e, E))
        v = np.full(N, -1, dtype=np.int64)
        v[K_in_M] = vals[K.class_of]
        return v

    ext_cache: dict = {}

    def ext_vector(rec: ExtensionRecord, j: int) -> np.ndarray:
        key = (id(rec.stabilizer), j)
        if key not in ext_cache:
            S, St, _, S_in_M = ctx.stabilizer_group(rec.stabilizer_indices)
            vals = intern(St.coeffs[j] @ lift_matrix(St.e, E))
            v = np.full(N, -1, dtype=np.int64)
            v[S_in_M] = vals[S.class_of]
            ext_cache[key] = v
        return ext_cache[key]

    def act(vec: np.ndarray, perm: np.ndarray) -> np.ndarray:
        out = np.empty_like(vec)
        out[perm] = vec
        return out

    lam_vecs = {i: lam_vector(i) for i in chars}
    key_to_lam = {v.tobytes(): i for i, v in lam_vecs.items()}

    def image(i: int, k: int) -> int:
        return key_to_lam[act(lam_vecs[i], gens[k]).tobytes()]

    def required(i: int, k: int) -> bool:
        return fixed_points or not is_aut[k] or image(i, k) != i

    mapping: dict[int, int] = {}
    chosen_vec: dict[int, np.ndarray] = {}
    orbits: list[list[int]] = []
    records: dict[int, ExtensionRecord] = {}
    seen: set[int] = set()
    for rep in chars:
        if rep in seen:
            continue
        # orbit with transversal permutations
        trans = {rep: np.arange(N)}
        order = [rep]
        queue = deque([rep])
        while queue:
            i = queue.popleft()
            for s in gens:
                w = act(lam_vecs[i], s)
                j = key_to_lam.get(w.tobytes())
                if j is None:
                    raise InvalidArgument("character set is not stable under the acting group")
                if j not in trans:
                    trans[j] = s[trans[i]]
                    order.append(j)
                    queue.append(j)
        seen.update(order)
        orbits.append(sorted(order))
        rec = ctx.search(rep)
        records[rep] = rec
        if not rec.extensions:
            return EquivariantMapResult(False, mapping, orbits, rep, "no extension to the stabilizer", 0, records)
        # a choice at rep is good if transporting it is consistent on every edge of the orbit
        good = None
        for j in rec.extensions:
            base = ext_vector(rec, j)
            cand = {i: act(base, trans[i]) for i in order}
            if all(
                np.array_equal(act(cand[i], gens[k]), cand[image(i, k)])
                for i in order
                for k in range(len(gens))
                if required(i, k)
            ):
                good = cand
                break
        if good is None:
            return EquivariantMapResult(
                False, mapping, orbits, rep, "stabilizer forces incompatible choices", 0, records
            )
        for i, v in good.items():
            chosen_vec[i] = v
    # exhaustive verification and translation to per-character table indices
    checks = 0
    for i in chars:
        v = chosen_vec[i]
        lv = lam_vecs[i]
        if not np.array_equal(v[K_in_M], lv[K_in_M]):
            return EquivariantMapResult(False, mapping, orbits, i, "image does not extend", checks, records)
        stab = ctx.stabilizer_indices(i)
        if not np.array_equal(np.sort(np.nonzero(v >= 0)[0]), stab):
            return EquivariantMapResult(False, mapping, orbits, i, "image not defined on the stabilizer", checks, records)
        for k, s in enumerate(gens):
            if not required(i, k):
                continue
            j = image(i, k)
            checks += 1
            if not np.array_equal(act(v, s), chosen_vec[j]):
                return EquivariantMapResult(False, mapping, orbits, i, "equivariance fails", checks, records)
        rec = ctx.search(i)
        for j in rec.extensions:
            if np.array_equal(ext_vector(rec, j), v):
                mapping[i] = j
                break
        else:
            return EquivariantMapResult(False, mapping, orbits, i, "image is not an irreducible extension", checks, records)
        records[i] = rec
    return EquivariantMapResult(True, mapping, orbits, None, "", checks, records)
