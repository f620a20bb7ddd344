"""Integer helpers: l-parts, primality, modular roots of unity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import sympy


class InvalidArgument(ValueError):
    """Raised when an operation receives an input outside its domain."""


def is_prime(n: int) -> bool:
    return bool(sympy.isprime(n))


def factorize(n: int) -> dict[int, int]:
    return {int(p): int(k) for p, k in sympy.factorint(n).items()}


@dataclass(frozen=True)
class LPartResult:
    n: int
    ell: int
    ell_part: int
    ell_prime_part: int
    valuation: int


def lpart(n: int, ell: int) -> LPartResult:
    """Split ``n`` into its ``ell``-part and ``ell'``-part."""
    if n < 1:
        raise InvalidArgument(f"lpart needs n >= 1, got {n}")
    if not is_prime(ell):
        raise InvalidArgument(f"{ell} is not prime")
    v, m = 0, n
    while m % ell == 0:
        m //= ell
        v += 1
    return LPartResult(n, ell, ell**v, m, v)


def valuation(n: int, ell: int) -> int:
    return lpart(abs(n), ell).valuation


def ell_part(n: int, ell: int) -> int:
    return lpart(abs(n), ell).ell_part


def multiplicative_order(a: int, n: int) -> int:
    if math.gcd(a, n) != 1:
        raise InvalidArgument(f"{a} is not a unit mod {n}")
    return 1 if n == 1 else int(sympy.n_order(a, n))


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    """Smallest generator of (Z/p)^x."""
    if not is_prime(p):
        raise InvalidArgument(f"{p} is not prime")
    return 1 if p == 2 else int(sympy.primitive_root(p))


def prime_congruent_one(e: int, lower: int) -> int:
    """Smallest prime P > lower with P = 1 (mod e)."""
    k = max(1, lower // e + 1)
    while True:
        cand = k * e + 1
        if cand > lower and is_prime(cand):
            return cand
        k += 1


def primes_congruent_one(e: int, lower: int):
    """Iterate primes P > lower with P = 1 (mod e), increasing."""
    k = max(1, lower // e + 1)
    while True:
        cand = k * e + 1
        if cand > lower and is_prime(cand):
            yield cand
        k += 1


def lcm_all(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out
