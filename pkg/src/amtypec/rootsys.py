"""Type C root systems, signed permutations and Levi combinatorics.

Roots live in the basis e_1..e_l.  Simple roots are alpha_1 = 2e_1 and
alpha_i = e_i - e_{i-1} for 2 <= i <= l.  A Levi subsystem is given by a set
of simple-root indices; its components are sorted into the symplectic part
(the component through alpha_1, supported on J_{-1}) and type A parts of
size d (collected into J_d, with orbit blocks O_d).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial

import numpy as np

from .numeric.arith import InvalidArgument


class VerificationFailure(AssertionError):
    """A brute-force cross-check disagreed with the structural claim."""

    def __init__(self, message: str, witness=None):
        super().__init__(message if witness is None else f"{message}; witness {witness!r}")
        self.witness = witness


@dataclass(frozen=True, order=True)
class Root:
    vec: tuple[int, ...]

    def __post_init__(self):
        nz = [(i, c) for i, c in enumerate(self.vec) if c]
        ok = (len(nz) == 1 and abs(nz[0][1]) == 2) or (len(nz) == 2 and all(abs(c) == 1 for _, c in nz))
        if not ok:
            raise InvalidArgument(f"{self.vec} is not a type C root")

    @property
    def rank(self) -> int:
        return len(self.vec)

    def is_long(self) -> bool:
        return any(abs(c) == 2 for c in self.vec)

    def __neg__(self):
        return Root(tuple(-c for c in self.vec))

    def dot(self, other) -> int:
        v = other.vec if isinstance(other, Root) else other
        return sum(a * b for a, b in zip(self.vec, v))

    def support(self) -> tuple[int, ...]:
        """1-based indices with non-zero coefficient."""
        return tuple(i + 1 for i, c in enumerate(self.vec) if c)

    def __str__(self):
        parts = []
        for i, c in enumerate(self.vec):
            if c == 2:
                parts.append(f"+2e{i + 1}")
            elif c == -2:
                parts.append(f"-2e{i + 1}")
            elif c == 1:
                parts.append(f"+e{i + 1}")
            elif c == -1:
                parts.append(f"-e{i + 1}")
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s

    @classmethod
    def parse(cls, text: str, l: int) -> "Root":
        """Parse strings like ``2e1``, ``e2-e1``, ``-e1-e3``."""
        import re

        vec = [0] * l
        t = text.replace(" ", "")
        if not t or not re.fullmatch(r"([+-]?\d*e\d+)+", t):
            raise InvalidArgument(f"cannot parse root {text!r}")
        for sign, coef, idx in re.findall(r"([+-]?)(\d*)e(\d+)", t):
            i = int(idx)
            if not 1 <= i <= l:
                raise InvalidArgument(f"index {i} out of range in {text!r}")
            c = int(coef) if coef else 1
            vec[i - 1] += -c if sign == "-" else c
        return cls(tuple(vec))


def e_minus(i: int, j: int, l: int) -> Root:
    v = [0] * l
    v[i - 1] += 1
    v[j - 1] -= 1
    return Root(tuple(v))


def e_plus(i: int, j: int, l: int) -> Root:
    v = [0] * l
    v[i - 1] += 1
    v[j - 1] += 1
    return Root(tuple(v))


def two_e(i: int, l: int, sign: int = 1) -> Root:
    v = [0] * l
    v[i - 1] = 2 * sign
    return Root(tuple(v))


@dataclass(frozen=True)
class SignedPerm:
    """Signed permutation of {+-1..+-l}; ``img[i-1] = sigma(i)``."""

    img: tuple[int, ...]

    def __post_init__(self):
        if sorted(abs(x) for x in self.img) != list(range(1, len(self.img) + 1)):
            raise InvalidArgument(f"{self.img} is not a signed permutation")

    @classmethod
    def identity(cls, l: int) -> "SignedPerm":
        return cls(tuple(range(1, l + 1)))

    @property
    def rank(self) -> int:
        return len(self.img)

    def __call__(self, x: int) -> int:
        y = self.img[abs(x) - 1]
        return y if x > 0 else -y

    def __mul__(self, other: "SignedPerm") -> "SignedPerm":
        """Composition: (self * other)(x) = self(other(x))."""
        return SignedPerm(tuple(self(y) for y in other.img))

    def inverse(self) -> "SignedPerm":
        out = [0] * self.rank
        for i, y in enumerate(self.img, start=1):
            out[abs(y) - 1] = i if y > 0 else -i
        return SignedPerm(tuple(out))

    def is_identity(self) -> bool:
        return self.img == tuple(range(1, self.rank + 1))

    def act_vec(self, v):
        """sigma(e_i) = sign * e_|sigma(i)|, extended linearly."""
        out = [0] * self.rank
        for i, c in enumerate(v):
            y = self.img[i]
            out[abs(y) - 1] += c if y > 0 else -c
        return tuple(out)

    def act_root(self, r: Root) -> Root:
        return Root(self.act_vec(r.vec))

    def act_label(self, lam, modulus: int) -> tuple[int, ...]:
        return tuple(x % modulus for x in self.act_vec(lam))

    def to_perm(self) -> np.ndarray:
        """Permutation of 2l points: i -> i-1, -i -> l+i-1."""
        l = self.rank

        def pt(x):
            return x - 1 if x > 0 else l - x - 1

        out = np.empty(2 * l, dtype=np.int64)
        for i in range(1, l + 1):
            out[pt(i)] = pt(self(i))
            out[pt(-i)] = pt(self(-i))
        return out

    def underlying(self) -> tuple[int, ...]:
        return tuple(abs(y) for y in self.img)

    def signs(self) -> tuple[int, ...]:
        return tuple(1 if y > 0 else -1 for y in self.img)

    def __repr__(self):
        return f"SignedPerm{self.img}"


@dataclass(frozen=True)
class RootSystemC:
    l: int
    roots: tuple[Root, ...]
    simple: tuple[Root, ...]

    @property
    def positive(self) -> tuple[Root, ...]:
        return tuple(r for r in self.roots if all(c >= 0 for c in self.simple_coords(r)))

    def simple_coords(self, r: Root) -> tuple[int, ...]:
        return _simple_coords(self.l, r.vec)

    def long_roots(self):
        return tuple(r for r in self.roots if r.is_long())

    def short_roots(self):
        return tuple(r for r in self.roots if not r.is_long())


@lru_cache(maxsize=None)
def _simple_matrix_inv(l: int) -> np.ndarray:
    M = np.zeros((l, l))
    for k, a in enumerate(simple_roots(l)):
        M[:, k] = a.vec
    return np.linalg.inv(M)


def _simple_coords(l: int, vec) -> tuple[int, ...]:
    c = _simple_matrix_inv(l) @ np.array(vec, dtype=float)
    r = np.rint(c).astype(int)
    if not np.allclose(c, r, atol=1e-9):
        raise AssertionError("root not in the integer span of the basis")
    return tuple(int(x) for x in r)


def simple_roots(l: int) -> tuple[Root, ...]:
    if l < 1:
        raise InvalidArgument("rank must be at least 1")
    return (two_e(1, l),) + tuple(e_minus(i, i - 1, l) for i in range(2, l + 1))


@lru_cache(maxsize=None)
def build_root_system(l: int) -> RootSystemC:
    if l < 1:
        raise InvalidArgument("rank must be at least 1")
    roots = []
    for i in range(1, l + 1):
        roots += [two_e(i, l), two_e(i, l, -1)]
    for i, j in itertools.combinations(range(1, l + 1), 2):
        roots += [e_minus(i, j, l), e_minus(j, i, l), e_plus(i, j, l), -e_plus(i, j, l)]
    roots.sort()
    rs = RootSystemC(l, tuple(roots), simple_roots(l))
    for r in rs.roots:
        rs.simple_coords(r)
    return rs


def reflection(alpha: Root) -> SignedPerm:
    l = alpha.rank
    aa = alpha.dot(alpha)
    img = []
    for i in range(l):
        v = [0] * l
        v[i] = 1
        k = 2 * alpha.dot(v) // aa
        w = tuple(v[j] - k * alpha.vec[j] for j in range(l))
        (j,) = [j for j in range(l) if w[j]]
        img.append((j + 1) * w[j])
    return SignedPerm(tuple(img))


@dataclass
class WeylGroup:
    l: int
    elements: list[SignedPerm]
    index: dict

    @property
    def order(self) -> int:
        return len(self.elements)

    def reflection(self, alpha: Root) -> SignedPerm:
        return reflection(alpha)

    def simple_reflections(self) -> list[SignedPerm]:
        return [reflection(a) for a in simple_roots(self.l)]


@lru_cache(maxsize=None)
def weyl_group(l: int) -> WeylGroup:
    """All 2^l l! signed permutations of rank l."""
    if l < 1:
        raise InvalidArgument("rank must be at least 1")
    elems = []
    for perm in itertools.permutations(range(1, l + 1)):
        for signs in itertools.product((1, -1), repeat=l):
            elems.append(SignedPerm(tuple(s * x for s, x in zip(signs, perm))))
    return WeylGroup(l, elems, {w: k for k, w in enumerate(elems)})


def closure(gens, l: int) -> set[SignedPerm]:
    """Subgroup of W(C_l) generated by ``gens``."""
    ident = SignedPerm.identity(l)
    seen = {ident}
    frontier = [ident]
    gens = list(gens)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


# -- Levi data ---------------------------------------------------------------


@dataclass
class LeviDatum:
    l: int
    delta_prime: tuple[int, ...]
    phi_prime: tuple[Root, ...]
    components: list[tuple[str, tuple[int, ...]]]  # (type tag, simple indices)
    J: dict[int, tuple[int, ...]]
    O: dict[int, list[tuple[int, ...]]]
    a: dict[int, int] = field(default_factory=dict)

    @property
    def D(self) -> tuple[int, ...]:
        return (-1,) + tuple(range(1, self.l + 1))

    def orbits(self) -> list[tuple[int, ...]]:
        """All blocks I in O_d for d >= 1, sorted by smallest index."""
        out = [I for d, blocks in self.O.items() if d >= 1 for I in blocks]
        return sorted(out)

    def component_roots(self, d: int) -> tuple[Root, ...]:
        """Phi_d (d >= 2) or Phi_{-1}."""
        Jd = set(self.J.get(d, ()))
        if d == 1:
            return ()
        return tuple(r for r in self.phi_prime if set(r.support()) <= Jd)

    def shape(self) -> str:
        parts = []
        if self.J[-1]:
            parts.append(f"Sp_{2 * len(self.J[-1])}")
        for d in sorted(k for k in self.O if k >= 1):
            parts += [f"GL_{d}"] * self.a[d]
        return " x ".join(parts) if parts else "1"

    def describe(self) -> dict:
        return {
            "l": self.l,
            "delta_prime": list(self.delta_prime),
            "components": [[t, list(ix)] for t, ix in self.components],
            "J": {str(d): list(v) for d, v in sorted(self.J.items())},
            "O": {str(d): [list(I) for I in v] for d, v in sorted(self.O.items())},
            "a": {str(d): v for d, v in sorted(self.a.items())},
            "shape": self.shape(),
        }


def parse_delta(text: str | None, l: int) -> tuple[int, ...]:
    """``'1,3'`` -> (1, 3); ``'none'`` or empty -> ()."""
    if text is None or text.strip().lower() in ("", "none", "empty"):
        return ()
    try:
        idx = sorted({int(t) for t in text.split(",")})
    except ValueError:
        raise InvalidArgument(f"bad Levi specification {text!r}") from None
    if any(not 1 <= i <= l for i in idx):
        raise InvalidArgument(f"simple-root indices must lie in 1..{l}")
    return tuple(idx)


def levi_decompose(l: int, delta_prime) -> LeviDatum:
    rs = build_root_system(l)
    dp = tuple(sorted(set(delta_prime)))
    if any(not 1 <= i <= l for i in dp):
        raise InvalidArgument(f"simple-root indices must lie in 1..{l}")
    phi_prime = tuple(r for r in rs.roots if all(c == 0 or k + 1 in dp for k, c in enumerate(rs.simple_coords(r))))
    # connected components of the Dynkin subdiagram (a chain)
    comps: list[list[int]] = []
    for i in dp:
        if comps and comps[-1][-1] == i - 1:
            comps[-1].append(i)
        else:
            comps.append([i])
    components = []
    J: dict[int, list[int]] = {-1: []}
    O: dict[int, list[tuple[int, ...]]] = {}
    used: set[int] = set()
    for c in comps:
        if c[0] == 1:
            m = c[-1]
            components.append((f"C{m}", tuple(c)))
            J[-1] = list(range(1, m + 1))
            used |= set(J[-1])
        else:
            supp = tuple(range(c[0] - 1, c[-1] + 1))
            d = len(supp)
            components.append((f"A{d - 1}", tuple(c)))
            J.setdefault(d, []).extend(supp)
            O.setdefault(d, []).append(supp)
            used |= set(supp)
    J1 = [i for i in range(1, l + 1) if i not in used]
    J[1] = J1
    O[1] = [(i,) for i in J1]
    Jt = {d: tuple(sorted(v)) for d, v in J.items()}
    Ot = {d: sorted(v) for d, v in O.items()}
    a = {d: len(v) for d, v in Ot.items()}
    return LeviDatum(l, dp, phi_prime, components, Jt, Ot, a)


def phi_prime_components_bruteforce(datum: LeviDatum) -> list[frozenset[Root]]:
    """Irreducible components of Phi' from the non-orthogonality graph."""
    roots = list(datum.phi_prime)
    seen: set[Root] = set()
    comps = []
    for r in roots:
        if r in seen:
            continue
        comp = {r}
        stack = [r]
        while stack:
            x = stack.pop()
            for y in roots:
                if y not in comp and x.dot(y) != 0:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        comps.append(frozenset(comp))
    return comps


def weyl_subgroup(roots, l: int) -> set[SignedPerm]:
    return closure([reflection(r) for r in roots], l)


# -- normalizer quotient -------------------------------------------------------


@dataclass
class QuotientPresentation:
    generators: list[SignedPerm]
    factors: list[tuple[int, int]]  # (d, a_d) for each W(C_{a_d}) factor
    normalizer_order: int
    levi_weyl_order: int
    quotient_order: int
    stabilizers: dict[int, dict]
    certificate: dict

    @property
    def descriptor(self) -> str:
        parts = [f"W(C_{a})" for d, a in self.factors if a > 0]
        return " x ".join(parts) if parts else "1"


def _block_image(w: SignedPerm, datum: LeviDatum) -> tuple:
    """Signed action of w on the blocks of each O_d, as a tuple of signed perms."""
    out = []
    for d in sorted(k for k in datum.O if k >= 1):
        blocks = datum.O[d]
        pos = {I: k for k, I in enumerate(blocks)}
        img = []
        for I in blocks:
            v = [0] * datum.l
            for i in I:
                v[i - 1] = 1
            wv = w.act_vec(v)
            supp = tuple(i + 1 for i, c in enumerate(wv) if c)
            signs = {wv[i - 1] for i in supp}
            if supp not in pos or len(signs) != 1:
                raise VerificationFailure("element does not permute the orbit blocks", w)
            s = signs.pop()
            img.append(s * (pos[supp] + 1))
        out.append(SignedPerm(tuple(img)) if img else None)
    return tuple(out)


def _compose_images(x: tuple, y: tuple) -> tuple:
    return tuple(None if a is None else a * b for a, b in zip(x, y))


def stabilizer_formula(datum: LeviDatum, d: int) -> set[SignedPerm]:
    """(W_{Phi_d} x <prod_{i in I}(i,-i)>) semidirect S_{O_d}, inside W(C_l)."""
    l = datum.l
    blocks = datum.O[d]
    gens = [reflection(r) for r in datum.component_roots(d)]
    for I in blocks:
        gens.append(SignedPerm(tuple(-x if x in I else x for x in range(1, l + 1))))
    for A, B in itertools.combinations(blocks, 2):
        img = list(range(1, l + 1))
        for x, y in zip(A, B):
            img[x - 1], img[y - 1] = y, x
        gens.append(SignedPerm(tuple(img)))
    return closure(gens, l)


def normalizer_quotient(datum: LeviDatum) -> QuotientPresentation:
    """Compute N_W(W_{Phi'}) / W_{Phi'} and certify it is a product of W(C_{a_d})."""
    l = datum.l
    W = weyl_group(l)
    phi_set = set(datum.phi_prime)
    WL = weyl_subgroup(datum.phi_prime, l)
    N = [w for w in W.elements if {w.act_root(r) for r in phi_set} == phi_set]
    # cross-check: normalizing means conjugating every reflection of Phi' into W_{Phi'}
    refl = [reflection(r) for r in datum.phi_prime]
    N2 = [w for w in W.elements if all(w * s * w.inverse() in WL for s in refl)]
    if set(N) != set(N2):
        raise VerificationFailure("normalizer via roots and via reflections differ", set(N) ^ set(N2))
    Nset = set(N)
    if not WL <= Nset:
        raise VerificationFailure("W_{Phi'} is not inside its normalizer")

    # explicit homomorphism N -> prod_d W(C_{a_d})
    rho = {w: _block_image(w, datum) for w in N}
    gens = _small_generating_set(N, l)
    for g in gens:
        for w in N:
            if rho[g * w] != _compose_images(rho[g], rho[w]):
                raise VerificationFailure("block action is not a homomorphism", (g, w))
    ident = rho[SignedPerm.identity(l)]
    kernel = {w for w in N if rho[w] == ident}
    if kernel != WL:
        raise VerificationFailure("kernel differs from W_{Phi'}", kernel ^ WL)
    factors = [(d, datum.a[d]) for d in sorted(k for k in datum.O if k >= 1)]
    target = 1
    for _, a in factors:
        target *= 2**a * factorial(a)
    image = set(rho.values())
    if len(image) != target:
        raise VerificationFailure("block action is not surjective", len(image))
    quotient_order = len(N) // len(WL)
    if quotient_order != target:
        raise VerificationFailure("quotient order mismatch", quotient_order)

    # literal stabilizer formula for each d >= 2
    stabs = {}
    for d in sorted(k for k in datum.O if k >= 2):
        Jd = set(datum.J[d])
        bar = [w for w in W.elements if all(w(i) == i for i in range(1, l + 1) if i not in Jd)]
        phid = set(datum.component_roots(d))
        brute = {w for w in bar if {w.act_root(r) for r in phid} == phid}
        formula = stabilizer_formula(datum, d)
        if brute != formula:
            raise VerificationFailure(f"stabilizer formula fails for d={d}", next(iter(brute ^ formula)))
        a = datum.a[d]
        expected = factorial(d) ** a * 2**a * factorial(a)
        if len(brute) != expected:
            raise VerificationFailure(f"stabilizer order for d={d}", len(brute))
        stabs[d] = {"order": len(brute), "expected": expected, "formula_matches": True}

    return QuotientPresentation(
        generators=gens,
        factors=factors,
        normalizer_order=len(N),
        levi_weyl_order=len(WL),
        quotient_order=quotient_order,
        stabilizers=stabs,
        certificate={
            "homomorphism_checked_on_generators": len(gens),
            "kernel_equals_levi_weyl": True,
            "image_order": len(image),
            "target_order": target,
            "normalizer_crosscheck": True,
        },
    )


def _small_generating_set(elements, l: int) -> list[SignedPerm]:
    """Greedy generating set of the group formed by ``elements``."""
    target = set(elements)
    gens: list[SignedPerm] = []
    cur = {SignedPerm.identity(l)}
    for w in sorted(target, key=lambda x: x.img):
        if w not in cur:
            gens.append(w)
            cur = closure(gens, l)
            if cur == target:
                break
    if cur != target:
        raise VerificationFailure("elements do not form a group")
    return gens


# -- stabilizers ---------------------------------------------------------------


@dataclass
class StabilizerResult:
    stabilizer: list
    orbit: list
    group_order: int


def subgroup_stabilizer(group, point, action, domain=None) -> StabilizerResult:
    """Stabilizer and orbit of ``point`` under ``action(g, x)``."""
    group = list(group)
    dom = None if domain is None else set(domain)
    if dom is not None and point not in dom:
        raise InvalidArgument("point outside the domain")
    stab, orbit, seen = [], [], set()
    for g in group:
        try:
            y = action(g, point)
        except Exception as exc:  # noqa: BLE001
            raise InvalidArgument(f"action failed: {exc}") from exc
        if dom is not None and y not in dom:
            raise InvalidArgument(f"action not closed: {y!r} outside the domain")
        if y == point:
            stab.append(g)
        if y not in seen:
            seen.add(y)
            orbit.append(y)
    if len(stab) * len(orbit) != len(group):
        raise VerificationFailure("orbit-stabilizer identity fails", (len(stab), len(orbit)))
    return StabilizerResult(stab, orbit, len(group))


def label_action(modulus: int):
    def act(w: SignedPerm, lam):
        return w.act_label(lam, modulus)

    return act
