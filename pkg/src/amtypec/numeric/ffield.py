"""Finite fields F_{p^m} with integer-coded elements and matrix arithmetic.

An element is coded by the integer ``sum(c_i * p**i)`` where ``c_i`` are its
coordinates in the power basis of ``F_p[x]/(f)``.  Matrices are stored as
integer arrays of shape ``(..., m, n, n)``: one ``n x n`` plane per power of
``x``.  That layout lets batched products run through ``numpy.matmul``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import InvalidArgument, factorize, is_prime, primitive_root

# Conway polynomials, coefficients low -> high.
BUILTIN_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (3, 2): (2, 2, 1),
    (5, 2): (2, 4, 1),
    (7, 2): (3, 6, 1),
    (11, 2): (2, 7, 1),
    (13, 2): (2, 12, 1),
}


def _polymulmod(a: list[int], b: list[int], f: tuple[int, ...], p: int) -> list[int]:
    m = len(f) - 1
    out = [0] * (2 * m - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    for t in range(2 * m - 2, m - 1, -1):
        c = out[t]
        if c:
            out[t] = 0
            for k in range(m):
                out[t - m + k] = (out[t - m + k] - c * f[k]) % p
    return out[:m]


def _x_is_primitive(f: tuple[int, ...], p: int) -> bool:
    m = len(f) - 1
    order = p**m - 1
    x = [0] * m
    x[1 % m] = 1 if m > 1 else 0
    if m == 1:
        x = [(-f[0]) % p]

    def power(base, e):
        res = [1] + [0] * (m - 1)
        while e:
            if e & 1:
                res = _polymulmod(res, base, f, p)
            base = _polymulmod(base, base, f, p)
            e >>= 1
        return res

    one = [1] + [0] * (m - 1)
    if power(x, order) != one:
        return False
    return all(power(x, order // r) != one for r in factorize(order))


@lru_cache(maxsize=None)
def default_modulus(p: int, m: int) -> tuple[int, ...]:
    """Built-in table first, else the lexicographically first primitive polynomial."""
    if (p, m) in BUILTIN_MODULI:
        return BUILTIN_MODULI[(p, m)]
    if m == 1:
        return ((-primitive_root(p)) % p, 1)
    for code in range(p**m):
        coeffs = [(code // p**i) % p for i in range(m)]
        if coeffs[0] == 0:
            continue
        f = tuple(coeffs) + (1,)
        if _x_is_primitive(f, p):
            return f
    raise AssertionError("no primitive polynomial found")


class GF:
    """The field F_{p^m}.  Instances are cached per (p, m, modulus)."""

    _cache: dict[tuple, "GF"] = {}

    def __new__(cls, p: int, m: int = 1, modulus: tuple[int, ...] | None = None):
        if not is_prime(p):
            raise InvalidArgument(f"characteristic {p} is not prime")
        if m < 1:
            raise InvalidArgument("degree must be positive")
        modulus = tuple(modulus) if modulus is not None else default_modulus(p, m)
        key = (p, m, modulus)
        if key in cls._cache:
            return cls._cache[key]
        self = super().__new__(cls)
        self._setup(p, m, modulus)
        cls._cache[key] = self
        return self

    def _setup(self, p, m, modulus):
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise InvalidArgument("modulus must be monic of degree m")
        self.p, self.m, self.modulus = p, m, modulus
        self.q = q = p**m
        self.id = (p, m, modulus)
        self.digits = np.array([[(c // p**i) % p for i in range(m)] for c in range(q)], dtype=np.int64)
        self.weights = np.array([p**i for i in range(m)], dtype=np.int64)
        # exp/log tables w.r.t. a fixed generator
        if m == 1:
            gen = [primitive_root(p)]
        else:
            if not _x_is_primitive(modulus, p):
                raise InvalidArgument("modulus must be primitive")
            gen = [0, 1] + [0] * (m - 2)
        exp = np.zeros(q - 1, dtype=np.int64)
        cur = [1] + [0] * (m - 1)
        for k in range(q - 1):
            exp[k] = sum(c * p**i for i, c in enumerate(cur))
            cur = _polymulmod(cur, gen, modulus, p)
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(q - 1)
        if (log[1:] < 0).any():
            raise AssertionError("generator is not primitive")
        self.exp, self.log = exp, log
        self.generator_code = int(exp[1 % (q - 1)]) if q > 2 else 1
        self.frob_table = self._power_table(p)
        self.neg_table = self.from_digits((-self.digits) % p)

    def _power_table(self, k: int) -> np.ndarray:
        out = np.zeros(self.q, dtype=np.int64)
        nz = np.arange(1, self.q)
        out[nz] = self.exp[(self.log[nz] * k) % (self.q - 1)]
        if k == 0:
            out[0] = 1
        return out

    def __repr__(self):
        return f"GF({self.q})" if self.m == 1 else f"GF({self.p}^{self.m})"

    def __reduce__(self):
        return (GF, (self.p, self.m, self.modulus))

    # -- coded element arithmetic (vectorised) ------------------------------
    def from_digits(self, d: np.ndarray) -> np.ndarray:
        return (np.asarray(d) % self.p) @ self.weights

    def add(self, a, b):
        return self.from_digits(self.digits[a] + self.digits[b])

    def sub(self, a, b):
        return self.from_digits(self.digits[a] - self.digits[b])

    def mul(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        out = self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a):
        a = np.asarray(a)
        if (a == 0).any():
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        return self.exp[(-self.log[a]) % (self.q - 1)]

    def frob(self, a):
        return self.frob_table[np.asarray(a)]

    def code(self, value) -> int:
        """Code of an integer (image of Z) or an already-coded element."""
        if isinstance(value, FqElem):
            return value.code
        return int(value) % self.p

    def elem(self, value) -> "FqElem":
        return FqElem(self, self.code(value))

    def element(self, code: int) -> "FqElem":
        return FqElem(self, int(code))

    def gen(self) -> "FqElem":
        """Fixed generator of the multiplicative group."""
        return FqElem(self, self.generator_code)

    def elements(self):
        return [FqElem(self, c) for c in range(self.q)]

    def is_square(self, code: int) -> bool:
        return code != 0 and self.log[code] % 2 == 0

    # -- matrices in plane layout -------------------------------------------
    def mat_from_codes(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        d = self.digits[codes]  # (..., n, n, m)
        return np.moveaxis(d, -1, -3)

    def mat_to_codes(self, planes) -> np.ndarray:
        planes = np.asarray(planes)
        return np.tensordot(np.moveaxis(planes, -3, -1), self.weights, axes=([-1], [0]))

    def mat_identity(self, n: int) -> np.ndarray:
        out = np.zeros((self.m, n, n), dtype=np.int64)
        out[0] = np.eye(n, dtype=np.int64)
        return out

    def mat_mul(self, A, B) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        p, m = self.p, self.m
        if m == 1:
            return (A @ B) % p
        shape = np.broadcast_shapes(A.shape[:-3], B.shape[:-3])
        n = A.shape[-1]
        full = np.zeros(shape + (2 * m - 1, n, n), dtype=np.int64)
        for i in range(m):
            for j in range(m):
                full[..., i + j, :, :] += A[..., i, :, :] @ B[..., j, :, :]
        f = self.modulus
        for t in range(2 * m - 2, m - 1, -1):
            c = full[..., t, :, :] % p
            for k in range(m):
                if f[k]:
                    full[..., t - m + k, :, :] -= c * f[k]
        return full[..., :m, :, :] % p

    def mat_scale(self, code: int, A) -> np.ndarray:
        if self.m == 1:
            return (np.asarray(A) * code) % self.p
        n = np.asarray(A).shape[-1]
        return self.mat_mul(self.mat_from_codes(np.eye(n, dtype=np.int64) * code), A)

    def mat_frob(self, A) -> np.ndarray:
        return self.mat_from_codes(self.frob_table[self.mat_to_codes(A)])

    def mat_inv(self, A) -> np.ndarray:
        """Inverse of a single matrix by Gauss-Jordan on codes."""
        M = [list(map(int, row)) for row in self.mat_to_codes(A)]
        n = len(M)
        I = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if M[r][col] != 0), None)
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            M[col], M[piv] = M[piv], M[col]
            I[col], I[piv] = I[piv], I[col]
            s = int(self.inv(M[col][col]))
            M[col] = [int(self.mul(s, x)) for x in M[col]]
            I[col] = [int(self.mul(s, x)) for x in I[col]]
            for r in range(n):
                if r != col and M[r][col] != 0:
                    c = M[r][col]
                    M[r] = [int(self.sub(x, self.mul(c, y))) for x, y in zip(M[r], M[col])]
                    I[r] = [int(self.sub(x, self.mul(c, y))) for x, y in zip(I[r], I[col])]
        return self.mat_from_codes(np.array(I))


@dataclass(frozen=True)
class FqElem:
    """A single element of a finite field."""

    field: GF
    code: int

    def _check(self, other) -> "FqElem":
        if isinstance(other, int):
            return self.field.elem(other)
        if not isinstance(other, FqElem):
            return NotImplemented
        if other.field.id != self.field.id:
            raise InvalidArgument(f"mismatched fields {self.field!r} and {other.field!r}")
        return other

    @property
    def coefficients(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.field.digits[self.code])

    def __add__(self, other):
        other = self._check(other)
        return FqElem(self.field, int(self.field.add(self.code, other.code)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return FqElem(self.field, int(self.field.sub(self.code, other.code)))

    def __rsub__(self, other):
        return self._check(other) - self

    def __neg__(self):
        return FqElem(self.field, int(self.field.neg_table[self.code]))

    def __mul__(self, other):
        other = self._check(other)
        return FqElem(self.field, int(self.field.mul(self.code, other.code)))

    __rmul__ = __mul__

    def inv(self) -> "FqElem":
        if self.code == 0:
            raise ZeroDivisionError("inverse of zero")
        return FqElem(self.field, int(self.field.inv(self.code)))

    def __truediv__(self, other):
        return self * self._check(other).inv()

    def __pow__(self, k: int):
        if self.code == 0:
            if k < 0:
                raise ZeroDivisionError("inverse of zero")
            return FqElem(self.field, 0 if k else 1)
        f = self.field
        return FqElem(f, int(f.exp[(f.log[self.code] * k) % (f.q - 1)]))

    def frob(self) -> "FqElem":
        return FqElem(self.field, int(self.field.frob_table[self.code]))

    def is_zero(self) -> bool:
        return self.code == 0

    def __int__(self):
        if self.field.m != 1:
            raise TypeError("only prime-field elements convert to int")
        return self.code

    def __repr__(self):
        if self.field.m == 1:
            return f"{self.code} mod {self.field.p}"
        return f"{self.coefficients} in {self.field!r}"


def ff_arith(a: FqElem, b: FqElem | None, op: str) -> FqElem:
    """Dispatch form of the field operations: add, mul, inv, frob."""
    if op in ("add", "mul"):
        if b is None:
            raise InvalidArgument(f"{op} needs two operands")
        if a.field.id != b.field.id:
            raise InvalidArgument("mismatched fields")
        return a + b if op == "add" else a * b
    if op == "inv":
        return a.inv()
    if op == "frob":
        return a.frob()
    raise InvalidArgument(f"unknown op {op!r}")


def field_for_order(q: int) -> GF:
    fs = factorize(q)
    if len(fs) != 1:
        raise InvalidArgument(f"{q} is not a prime power")
    (p, m), = fs.items()
    return GF(p, m)
