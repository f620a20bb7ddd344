"""Exact character tables of enumerated groups (Dixon-Schneider).

Central characters are split as common eigenvectors of the class matrices
over F_P with P = 1 (mod exponent).  Values are lifted to cyclotomic integers
through eigenvalue multiplicities and then certified: the multiplicities are
checked to be Galois-consistent with the power maps, so every embedding of
Q(zeta_e) gives the same Gram matrices, and orthogonality is checked modulo
primes whose product exceeds the a priori bound on the entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from ..groups import GeneratedGroup, ResourceLimit
from ..numeric.arith import InvalidArgument, factorize, is_prime, primitive_root
from ..numeric.cyclotomic import Cyclotomic, _power_basis_table, cyclotomic_coeffs
from .modp import hessenberg_charpoly, inv_mod, matmul_mod, nullspace, poly_roots, rref

TABLE_BUDGET = 200_000


class TableError(RuntimeError):
    """The modular computation did not produce a consistent table."""


@lru_cache(maxsize=None)
def power_basis(e: int) -> np.ndarray:
    """Row k: zeta_e^k in the power basis."""
    return np.array(_power_basis_table(e), dtype=np.int64)


def phi(e: int) -> int:
    return len(cyclotomic_coeffs(e)) - 1


@lru_cache(maxsize=None)
def lift_matrix(e: int, E: int) -> np.ndarray:
    """Coefficients at conductor e -> coefficients at conductor E (e | E)."""
    if E % e:
        raise InvalidArgument(f"{e} does not divide {E}")
    step = E // e
    PB = power_basis(E)
    return PB[(np.arange(phi(e)) * step) % E]


def good_primes(e: int, lower: int, order: int):
    """Primes P = 1 (mod e), P > lower, P not dividing the group order."""
    k = lower // e + 1
    while True:
        P = k * e + 1
        if is_prime(P) and order % P:
            yield P
        k += 1


@lru_cache(maxsize=None)
def root_of_unity_mod(e: int, P: int) -> int:
    """Fixed primitive e-th root of unity mod P: g^((P-1)/e) for the least primitive root g."""
    return pow(primitive_root(P), (P - 1) // e, P)


def reduce_coeffs_mod(coeffs: np.ndarray, e: int, P: int, k: int = 1) -> np.ndarray:
    """Evaluate power-basis coefficient arrays (..., phi(e)) at zeta_e -> z^k mod P."""
    z = pow(root_of_unity_mod(e, P), k, P)
    zp = np.array([pow(z, i, P) for i in range(phi(e))], dtype=np.int64)
    return matmul_mod(np.asarray(coeffs) % P, zp[:, None], P)[..., 0]


def complex_values(coeffs: np.ndarray, e: int) -> np.ndarray:
    z = np.exp(2j * np.pi * np.arange(phi(e)) / e)
    return np.asarray(coeffs, dtype=float) @ z


# -- conjugacy classes ---------------------------------------------------------


@dataclass
class ConjClassData:
    reps: np.ndarray
    sizes: np.ndarray
    class_of: np.ndarray
    inverse: np.ndarray
    orders: np.ndarray
    group_order: int
    group: GeneratedGroup | None = None

    @property
    def count(self) -> int:
        return len(self.reps)

    @property
    def centralizer_orders(self) -> np.ndarray:
        return self.group_order // self.sizes

    def power_map(self, k: int) -> np.ndarray:
        """Class of rep**k for every class."""
        return self.group.power_map(k)


def conjugacy_classes(G: GeneratedGroup) -> ConjClassData:
    G.enumerate()
    cd = ConjClassData(
        reps=G.class_reps,
        sizes=G.class_sizes,
        class_of=G.class_of,
        inverse=G.class_inverse,
        orders=G.element_orders[G.class_reps],
        group_order=G.order,
        group=G,
    )
    if int(cd.sizes.sum()) != G.order or ((G.order % cd.sizes) != 0).any():
        raise TableError("class sizes inconsistent with the group order")
    return cd


# -- class functions -------------------------------------------------------------


class ClassFunction:
    """Class function with values in Q(zeta_E): numerators (r, phi(E)) over a denominator."""

    def __init__(self, table: "CharacterTable", E: int, num: np.ndarray, den: int = 1):
        if E % table.e:
            raise InvalidArgument("conductor must be a multiple of the group exponent")
        num = np.asarray(num, dtype=np.int64)
        if num.shape != (table.classes.count, phi(E)):
            raise InvalidArgument("shape mismatch for class function")
        if den < 0:
            num, den = -num, -den
        g = math.gcd(int(den), *map(int, np.unique(np.abs(num)))) if num.any() else den
        self.table = table
        self.E = E
        self.num = num // g
        self.den = den // g

    def at(self, E: int) -> "ClassFunction":
        if E == self.E:
            return self
        return ClassFunction(self.table, E, self.num @ lift_matrix(self.E, E), self.den)

    def values(self) -> list[Cyclotomic]:
        return [Cyclotomic(self.E, row, self.den) for row in self.num]

    @property
    def degree(self):
        v = self.values()[0]
        return v.as_fraction() if v.is_rational() else v

    def complex(self) -> np.ndarray:
        return complex_values(self.num, self.E) / self.den

    def __eq__(self, other):
        if not isinstance(other, ClassFunction) or other.table is not self.table:
            return NotImplemented
        E = self.E * other.E // math.gcd(self.E, other.E)
        a, b = self.at(E), other.at(E)
        return a.den == b.den and np.array_equal(a.num, b.num)

    def __add__(self, other):
        E = self.E * other.E // math.gcd(self.E, other.E)
        a, b = self.at(E), other.at(E)
        return ClassFunction(self.table, E, a.num * b.den + b.num * a.den, a.den * b.den)

    def __mul__(self, other):
        """Pointwise product (exact)."""
        E = self.E * other.E // math.gcd(self.E, other.E)
        a, b = self.at(E), other.at(E)
        out = []
        for x, y in zip(a.values(), b.values()):
            out.append(x * y)
        return ClassFunction.from_values(self.table, out, E)

    @classmethod
    def from_values(cls, table, values, E: int | None = None) -> "ClassFunction":
        E = E or table.e
        values = [v if isinstance(v, Cyclotomic) else Cyclotomic.from_int(E, v) for v in values]
        den = 1
        for v in values:
            den = den * v.den // math.gcd(den, v.den)
        rows = []
        for v in values:
            w = v.lift(E) if v.e != E else v
            rows.append([c * (den // w.den) for c in w.num])
        return cls(table, E, np.array(rows, dtype=np.int64).reshape(len(values), phi(E)), den)

    def key(self):
        return (self.E, self.den, self.num.tobytes())

    def __repr__(self):
        return f"ClassFunction({self.values()})"


# -- character table ---------------------------------------------------------------


class CharacterTable:
    """Irreducible characters of an enumerated group, sorted by (degree, values)."""

    def __init__(self, G: GeneratedGroup, seed: int = 0, budget: int = TABLE_BUDGET):
        G.enumerate()
        if G.order > budget:
            raise ResourceLimit(f"character table of {G.name}", budget)
        self.group = G
        self.classes = conjugacy_classes(G)
        self.order = G.order
        self.e = G.exponent
        self.phi = phi(self.e)
        self.seed = seed
        self._compute()
        self.certificate = self.verify()

    # -- construction --------------------------------------------------------
    @cached_property
    def power_maps(self) -> np.ndarray:
        """PM[t, c] = class of rep_c ** t for 0 <= t < max element order."""
        G, cd = self.group, self.classes
        omax = int(cd.orders.max())
        out = np.zeros((omax, cd.count), dtype=np.int64)
        cur = np.zeros(cd.count, dtype=np.int64)
        for t in range(omax):
            out[t] = G.class_of[cur]
            cur = G.mul_idx(cur, cd.reps)
        return out

    def power_class(self, t: int, c: int) -> int:
        o = int(self.classes.orders[c])
        return int(self.power_maps[t % o, c])

    def _class_matrices(self) -> np.ndarray:
        """A[j, i, k] = #{x in C_j : x^-1 z_k in C_i}."""
        G, cd = self.group, self.classes
        r = cd.count
        A = np.zeros((r, r, r), dtype=np.int64)
        inv_el = G.elems(G.inverse)
        cls_x = G.class_of
        for k, z in enumerate(cd.reps):
            y = G.index(G.kind.mul(inv_el, G.element(z)))
            flat = cls_x * r + G.class_of[y]
            A[:, :, k] = np.bincount(flat, minlength=r * r).reshape(r, r)
        return A

    def _split(self, A: np.ndarray, P: int) -> list[np.ndarray]:
        r = A.shape[0]
        rng = np.random.default_rng(self.seed)
        coeffs = rng.integers(1, P, size=r)
        combo = np.tensordot(coeffs % P, A % P, axes=(0, 0)) % P
        mats = [combo] + [A[j] for j in range(1, r)]
        spaces = [np.eye(r, dtype=np.int64)]
        for M in mats:
            if all(B.shape[0] == 1 for B in spaces):
                break
            new = []
            for B in spaces:
                if B.shape[0] == 1:
                    new.append(B)
                    continue
                B, piv = rref(B, P)
                Y = matmul_mod(B, M.T, P)
                C = Y[:, piv]
                roots = poly_roots(hessenberg_charpoly(C, P), P)
                total = 0
                for lam in roots:
                    K = nullspace((C.T - lam * np.eye(len(C), dtype=np.int64)) % P, P)
                    if len(K):
                        sub, _ = rref(matmul_mod(K, B, P), P)
                        new.append(sub)
                        total += len(sub)
                if total != B.shape[0]:
                    raise TableError("class matrix not split over F_P")
            spaces = new
        if any(B.shape[0] != 1 for B in spaces):
            raise TableError("eigenspaces did not separate")
        return [B[0] for B in spaces]

    def _compute(self):
        cd = self.classes
        r = cd.count
        order = self.order
        A = self._class_matrices()
        lower = max(2 * math.isqrt(order) + 2, 100)
        last_error = None
        for attempt, P in enumerate(good_primes(self.e, lower, order)):
            if attempt >= 6:
                break
            try:
                self._from_prime(A, P)
                self.P = P
                return
            except TableError as exc:
                last_error = exc
        raise TableError(f"Dixon-Schneider did not converge: {last_error}")

    def _from_prime(self, A: np.ndarray, P: int):
        cd = self.classes
        r, order, e = cd.count, self.order, self.e
        vecs = self._split(A, P)
        if len(vecs) != r:
            raise TableError("wrong number of characters")
        hinv = np.array([inv_mod(int(h), P) for h in cd.sizes], dtype=np.int64)
        divisors = sorted(d for d in _divisors(order) if d * d <= order)
        degrees, modvals = [], []
        for v in vecs:
            if v[0] % P == 0:
                raise TableError("eigenvector vanishes at the identity")
            v = v * inv_mod(int(v[0]), P) % P
            s = int((v * v[cd.inverse] % P * hinv % P).sum() % P)
            if s == 0:
                raise TableError("degenerate norm")
            target = order % P * inv_mod(s, P) % P
            cands = [d for d in divisors if d * d % P == target]
            if len(cands) != 1:
                raise TableError("degree not determined")
            d = cands[0]
            degrees.append(d)
            modvals.append(v * d % P * hinv % P)
        X = np.array(modvals, dtype=np.int64)
        degrees = np.array(degrees, dtype=np.int64)
        if int((degrees**2).sum()) != order:
            raise TableError("sum of squared degrees differs from the group order")
        # lift through eigenvalue multiplicities
        ze = root_of_unity_mod(e, P)
        PB = power_basis(e)
        coeffs = np.zeros((r, r, self.phi), dtype=np.int64)
        mults = []
        for c in range(r):
            o = int(cd.orders[c])
            zo = pow(ze, e // o, P)
            cols = [self.power_class(t, c) for t in range(o)]
            Xc = X[:, cols]
            D = np.array([[pow(zo, (-i * t) % o, P) for i in range(o)] for t in range(o)], dtype=np.int64)
            m = matmul_mod(Xc, D, P) * inv_mod(o, P) % P
            if (m > degrees[:, None]).any() or not np.array_equal(m.sum(axis=1), degrees):
                raise TableError("eigenvalue multiplicities out of range")
            mults.append(m)
            coeffs[:, c, :] = m @ PB[(np.arange(o) * (e // o)) % e]
        # canonical order
        keys = [(int(degrees[i]), tuple(coeffs[i].ravel().tolist())) for i in range(r)]
        perm = sorted(range(r), key=lambda i: keys[i])
        self.degrees = degrees[perm]
        self.coeffs = coeffs[perm]
        self.mults = [m[perm] for m in mults]
        self.modvals_ds = X[perm]

    # -- certification -----------------------------------------------------------
    def verify(self) -> dict:
        cd = self.classes
        r, order, e = cd.count, self.order, self.e
        cert: dict = {}
        cert["sum_of_squares"] = int((self.degrees**2).sum()) == order
        cert["degrees_divide_order"] = bool((order % self.degrees == 0).all())
        # Galois consistency of the multiplicity data with the power maps
        galois_ok = True
        for c in range(r):
            o = int(cd.orders[c])
            for k in range(2, o):
                if math.gcd(k, o) != 1:
                    continue
                c2 = self.power_class(k, c)
                if int(cd.orders[c2]) != o:
                    galois_ok = False
                    continue
                m, m2 = self.mults[c], self.mults[c2]
                idx = (np.arange(o) * k) % o
                if not np.array_equal(m2[:, idx], m):
                    galois_ok = False
        cert["galois_consistent"] = galois_ok
        dmax = int(self.degrees.max())
        bound = 2 * order * (dmax * dmax + 2)
        primes, prod = [], 1
        lim = int(math.isqrt((2**62) // max(r, 1)))
        lower = min(10**6, lim // 2)
        for P in good_primes(e, lower, order):
            primes.append(P)
            prod *= P
            if prod > bound:
                break
        row_ok = col_ok = True
        sizes = cd.sizes.astype(np.int64)
        cent = cd.centralizer_orders.astype(np.int64)
        for P in primes:
            V = reduce_coeffs_mod(self.coeffs, e, P)
            Vbar = V[:, cd.inverse]
            gram = matmul_mod(V * (sizes % P) % P, Vbar.T, P)
            row_ok &= np.array_equal(gram, (order % P) * np.eye(r, dtype=np.int64))
            colg = matmul_mod(V.T, Vbar, P)
            col_ok &= np.array_equal(colg, np.diag(cent % P))
        cert["row_orthogonality"] = bool(row_ok)
        cert["column_orthogonality"] = bool(col_ok)
        cert["check_primes"] = primes
        if not all(v for k, v in cert.items() if k != "check_primes"):
            raise TableError(f"table certification failed: {cert}")
        return cert

    # -- access --------------------------------------------------------------------
    def __len__(self):
        return len(self.degrees)

    def character(self, i: int) -> ClassFunction:
        return ClassFunction(self, self.e, self.coeffs[i], 1)

    def characters(self) -> list[ClassFunction]:
        return [self.character(i) for i in range(len(self))]

    def values(self, i: int) -> list[Cyclotomic]:
        return [Cyclotomic(self.e, row) for row in self.coeffs[i]]

    def complex_table(self) -> np.ndarray:
        return complex_values(self.coeffs, self.e)

    @cached_property
    def trivial_index(self) -> int:
        ones = np.zeros(self.phi, dtype=np.int64)
        ones[0] = 1
        for i in range(len(self)):
            if (self.coeffs[i] == ones).all():
                return i
        raise TableError("no trivial character")

    def class_function(self, values, E: int | None = None) -> ClassFunction:
        return ClassFunction.from_values(self, values, E)

    def element_values(self, i: int) -> list[Cyclotomic]:
        vals = self.values(i)
        return [vals[c] for c in self.classes.class_of]

    def kernel(self, i: int) -> np.ndarray:
        """Classes in the kernel of character i."""
        deg = np.zeros(self.phi, dtype=np.int64)
        deg[0] = self.degrees[i]
        return np.nonzero((self.coeffs[i] == deg).all(axis=1))[0]

    def inner(self, f: ClassFunction, g: ClassFunction) -> int:
        """<f, g> for virtual characters (exact integer)."""
        return int(self.inner_products(f, [g])[0])

    def inner_products(self, f: ClassFunction, others=None) -> np.ndarray:
        """Integer inner products of a virtual character f with others (default: Irr)."""
        if f.table is not self:
            raise InvalidArgument("class function belongs to another group")
        cd = self.classes
        E = f.E
        if others is None:
            G = self.coeffs @ lift_matrix(self.e, E)
            dens = np.ones(len(self), dtype=np.int64)
        else:
            others = [o.at(E * o.E // math.gcd(E, o.E)) for o in others]
            E = others[0].E if others else E
            if any(o.E != E for o in others):
                E = math.lcm(*[o.E for o in others])
                others = [o.at(E) for o in others]
            f = f.at(E)
            G = np.stack([o.num for o in others]) if others else np.zeros((0, cd.count, phi(E)), dtype=np.int64)
            dens = np.array([o.den for o in others], dtype=np.int64)
        f = f.at(E)
        # complex estimate
        fc = complex_values(f.num, E) / f.den
        gc = complex_values(G, E) / dens[:, None]
        approx = (gc.conj() * fc[None, :] * cd.sizes[None, :]).sum(axis=1) / self.order
        est = np.rint(approx.real).astype(np.int64)
        if np.abs(approx - est).max(initial=0) > 1e-6:
            raise InvalidArgument("inner products are not integers; not a virtual character")
        # exact confirmation modulo a prime: residues must match the estimates
        bound = int(np.abs(est).max(initial=0)) * 2 + 2
        P = next(good_primes(E, max(bound, 10**5), self.order * int(f.den) * int(np.prod(dens) if len(dens) else 1)))
        fv = reduce_coeffs_mod(f.num, E, P)
        gv = reduce_coeffs_mod(G, E, P)[:, cd.inverse]
        s = matmul_mod(gv * (cd.sizes % P) % P, fv[:, None], P)[:, 0]
        scale = inv_mod(self.order * f.den % P, P)
        res = s * scale % P
        res = res * np.array([inv_mod(int(d), P) for d in dens], dtype=np.int64) % P
        exact = np.where(res > P // 2, res - P, res)
        if not np.array_equal(exact, est):
            raise TableError("modular and complex inner products disagree")
        return exact

    def decompose(self, f: ClassFunction) -> np.ndarray:
        return self.inner_products(f)

    def to_dict(self) -> dict:
        cd = self.classes
        return {
            "order": self.order,
            "exponent": self.e,
            "classes": [
                {"rep": self.group.element(int(rep)).tolist(), "size": int(s), "order": int(o)}
                for rep, s, o in zip(cd.reps, cd.sizes, cd.orders)
            ],
            "characters": [
                {"degree": int(self.degrees[i]), "values": [list(map(int, row)) for row in self.coeffs[i]]}
                for i in range(len(self))
            ],
            "conductor": self.e,
            "basis": "power basis of Z[zeta_e] modulo the cyclotomic polynomial",
        }


def _divisors(n: int) -> list[int]:
    out = [1]
    for p, k in factorize(n).items():
        out = [d * p**i for d in out for i in range(k + 1)]
    return sorted(out)


_TABLE_CACHE: dict = {}


def character_table(G: GeneratedGroup, seed: int = 0, budget: int = TABLE_BUDGET) -> CharacterTable:
    """Character table, memoized per group object."""
    key = id(G)
    hit = _TABLE_CACHE.get(key)
    if hit is not None and hit.group is G:
        return hit
    tab = CharacterTable(G, seed=seed, budget=budget)
    _TABLE_CACHE[key] = tab
    return tab


# -- induction / restriction ----------------------------------------------------------


def fusion(H_table: CharacterTable, G_table: CharacterTable) -> np.ndarray:
    """Class of G containing each class of H."""
    G = G_table.group
    reps = H_table.group.elems(H_table.classes.reps)
    idx = G.index(reps, strict=False)
    if (idx < 0).any():
        raise InvalidArgument(f"{H_table.group.name} is not a subgroup of {G.name}")
    return G.class_of[idx]


def check_subgroup(H_table: CharacterTable, G_table: CharacterTable) -> None:
    G = G_table.group
    if not G.contains(np.stack(H_table.group.gens)).all():
        raise InvalidArgument(f"{H_table.group.name} is not a subgroup of {G.name}")


def induce(f: ClassFunction, G_table: CharacterTable, fus: np.ndarray | None = None) -> ClassFunction:
    H_table = f.table
    if fus is None:
        check_subgroup(H_table, G_table)
        fus = fusion(H_table, G_table)
    E = math.lcm(f.E, G_table.e)
    f = f.at(E)
    rG = G_table.classes.count
    acc = np.zeros((rG, phi(E)), dtype=np.int64)
    np.add.at(acc, fus, f.num * H_table.classes.sizes[:, None])
    acc = acc * G_table.classes.centralizer_orders[:, None]
    return ClassFunction(G_table, E, acc, f.den * H_table.order)


def restrict(f: ClassFunction, H_table: CharacterTable, fus: np.ndarray | None = None) -> ClassFunction:
    G_table = f.table
    if fus is None:
        check_subgroup(H_table, G_table)
        fus = fusion(H_table, G_table)
    E = math.lcm(f.E, H_table.e)
    f = f.at(E)
    return ClassFunction(H_table, E, f.num[fus], f.den)


@dataclass
class InduceResult:
    function: ClassFunction
    decomposition: np.ndarray  # multiplicities over Irr of the target

    def constituents(self) -> list[tuple[int, int]]:
        return [(int(i), int(m)) for i, m in enumerate(self.decomposition) if m]


def induce_restrict(chi: ClassFunction, other: CharacterTable, direction: str) -> InduceResult:
    """Induce chi to ``other`` (a supergroup) or restrict it (to a subgroup)."""
    if direction == "induce":
        out = induce(chi, other)
    elif direction == "restrict":
        out = restrict(chi, other)
    else:
        raise InvalidArgument("direction must be 'induce' or 'restrict'")
    return InduceResult(out, other.decompose(out))
