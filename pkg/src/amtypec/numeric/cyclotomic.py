"""Exact elements of Q(zeta_e) in the power basis modulo the cyclotomic polynomial."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

import sympy

from .arith import InvalidArgument, lpart, multiplicative_order
from .ffield import GF, FqElem


@lru_cache(maxsize=None)
def cyclotomic_coeffs(e: int) -> tuple[int, ...]:
    """Coefficients of Phi_e, low -> high."""
    x = sympy.Symbol("x")
    return tuple(int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(e, x), x).all_coeffs()))


@lru_cache(maxsize=None)
def _power_basis_table(e: int) -> tuple[tuple[int, ...], ...]:
    """Row k holds zeta_e^k in the power basis, 0 <= k < e."""
    phi = cyclotomic_coeffs(e)
    d = len(phi) - 1
    rows = []
    cur = [0] * d
    cur[0] = 1
    for _ in range(e):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * phi[i] for i, c in enumerate(cur)]
    return tuple(rows)


class Cyclotomic:
    """``sum(num[i] * zeta_e**i) / den`` with ``deg < phi(e)``, canonical form.

    Equality is structural once both sides share a conductor; mixed
    conductors are lifted to the lcm.
    """

    __slots__ = ("e", "num", "den")

    def __init__(self, e: int, num, den: int = 1):
        if e < 1 or den == 0:
            raise InvalidArgument("bad cyclotomic data")
        d = len(cyclotomic_coeffs(e)) - 1
        num = [int(c) for c in num]
        if len(num) > d:
            num = _reduce(e, num)
        num = num + [0] * (d - len(num))
        if den < 0:
            num, den = [-c for c in num], -den
        g = math.gcd(den, *num) if any(num) else den
        self.e = e
        self.num = tuple(c // g for c in num)
        self.den = den // g

    # constructors
    @classmethod
    def from_int(cls, e: int, n) -> "Cyclotomic":
        fr = Fraction(n)
        return cls(e, [fr.numerator], fr.denominator)

    @classmethod
    def root(cls, e: int, k: int = 1) -> "Cyclotomic":
        return cls(e, _power_basis_table(e)[k % e])

    @classmethod
    def from_power_sum(cls, e: int, mults, den: int = 1) -> "Cyclotomic":
        """``sum(mults[k] * zeta_e**k) / den`` for k in range(e)."""
        table = _power_basis_table(e)
        d = len(table[0])
        acc = [0] * d
        for k, c in enumerate(mults):
            if c:
                row = table[k % e]
                for i in range(d):
                    acc[i] += c * row[i]
        return cls(e, acc, den)

    # conversions
    def lift(self, E: int) -> "Cyclotomic":
        if E % self.e:
            raise InvalidArgument(f"conductor {self.e} does not divide {E}")
        step = E // self.e
        mults = [0] * E
        for i, c in enumerate(self.num):
            mults[(i * step) % E] += c
        return Cyclotomic.from_power_sum(E, mults, self.den)

    def _common(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyclotomic.from_int(self.e, other)
        if not isinstance(other, Cyclotomic):
            return None, None
        if other.e == self.e:
            return self, other
        E = self.e * other.e // math.gcd(self.e, other.e)
        return self.lift(E), other.lift(E)

    def __add__(self, other):
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        return Cyclotomic(a.e, [x * b.den + y * a.den for x, y in zip(a.num, b.num)], a.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.e, [-c for c in self.num], self.den)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        prod = [0] * (2 * len(a.num))
        for i, x in enumerate(a.num):
            if x:
                for j, y in enumerate(b.num):
                    prod[i + j] += x * y
        return Cyclotomic(a.e, _reduce(a.e, prod), a.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            fr = Fraction(other)
            return Cyclotomic(self.e, [c * fr.denominator for c in self.num], self.den * fr.numerator)
        return NotImplemented

    def galois(self, k: int) -> "Cyclotomic":
        """Image under zeta -> zeta**k, gcd(k, e) = 1."""
        if math.gcd(k, self.e) != 1:
            raise InvalidArgument("Galois exponent must be a unit")
        mults = [0] * self.e
        for i, c in enumerate(self.num):
            mults[(i * k) % self.e] += c
        return Cyclotomic.from_power_sum(self.e, mults, self.den)

    def conj(self) -> "Cyclotomic":
        return self.galois(-1)

    def __eq__(self, other):
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        return a.num == b.num and a.den == b.den

    def __hash__(self):
        # hash via the rational value when rational, else the canonical data
        if self.is_rational():
            return hash(Fraction(self.num[0], self.den))
        return hash((self.e, self.num, self.den))

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def is_integer(self) -> bool:
        return self.is_rational() and self.den == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise InvalidArgument("not rational")
        return Fraction(self.num[0], self.den)

    def __complex__(self):
        z = cmath.exp(2j * math.pi / self.e)
        return sum(c * z**i for i, c in enumerate(self.num)) / self.den

    def sort_key(self):
        return (self.e, self.num, self.den)

    def __repr__(self):
        if self.is_rational():
            return str(self.as_fraction())
        terms = [f"{c}*z{self.e}^{i}" if i else str(c) for i, c in enumerate(self.num) if c]
        s = " + ".join(terms)
        return f"({s})/{self.den}" if self.den != 1 else s


def _reduce(e: int, coeffs: list[int]) -> list[int]:
    phi = cyclotomic_coeffs(e)
    d = len(phi) - 1
    c = list(coeffs)
    for t in range(len(c) - 1, d - 1, -1):
        top = c[t]
        if top:
            c[t] = 0
            for k in range(d):
                c[t - d + k] -= top * phi[k]
    return (c + [0] * d)[:d]


def reduction_field(e: int, ell: int) -> tuple[GF, int]:
    """Field F_{ell^m} receiving Z[zeta_e] mod a prime over ell, and e'."""
    ep = lpart(e, ell).ell_prime_part
    m = multiplicative_order(ell, ep) if ep > 1 else 1
    return GF(ell, m), ep


def cyclo_reduce_mod_ell(x: Cyclotomic, ell: int, k: int = 1) -> FqElem:
    """Reduce an ell-integral cyclotomic integer modulo a prime over ell.

    ``zeta_e`` maps to ``omega**k`` where ``omega = g**((ell^m - 1)/e')`` and
    ``g`` is the fixed generator of F_{ell^m}.  Different ``k`` coprime to
    ``e'`` pick the other primes above ell.
    """
    F, ep = reduction_field(x.e, ell)
    if x.den % ell == 0:
        raise InvalidArgument(f"{x!r} is not integral at {ell}")
    step = (F.q - 1) // ep
    acc = 0
    for i, c in enumerate(x.num):
        c %= ell
        if c:
            logw = (step * k * i) % (F.q - 1)
            term = F.mul(c, int(F.exp[logw]))
            acc = int(F.add(acc, term))
    return FqElem(F, int(F.mul(acc, F.inv(x.den % ell))))
