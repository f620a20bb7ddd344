"""Dense linear algebra over a prime field F_P with int64 numpy arrays."""

from __future__ import annotations

import numpy as np


def inv_mod(a: int, P: int) -> int:
    a %= P
    if a == 0:
        raise ZeroDivisionError("inverse of zero mod P")
    return pow(int(a), P - 2, P)


def rref(A: np.ndarray, P: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of A mod P, with pivot columns; zero rows dropped."""
    M = np.array(A, dtype=np.int64) % P
    rows, cols = M.shape
    piv: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if not len(nz):
            continue
        k = r + nz[0]
        if k != r:
            M[[r, k]] = M[[k, r]]
        M[r] = (M[r] * inv_mod(M[r, c], P)) % P
        col = M[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if len(nzr):
            M[nzr] = (M[nzr] - np.outer(col[nzr], M[r])) % P
        piv.append(c)
        r += 1
    return M[:r], piv


def nullspace(A: np.ndarray, P: int) -> np.ndarray:
    """Rows x with A @ x = 0 mod P (a basis, possibly empty)."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1]
    R, piv = rref(A, P)
    free = [c for c in range(n) if c not in set(piv)]
    out = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, p in enumerate(piv):
            out[k, p] = (-R[i, f]) % P
    return out


def hessenberg_charpoly(A: np.ndarray, P: int) -> np.ndarray:
    """Characteristic polynomial of A mod P, coefficients low -> high."""
    H = np.array(A, dtype=np.int64) % P
    n = H.shape[0]
    for m in range(1, n - 1):
        nz = np.nonzero(H[m:, m - 1])[0]
        if not len(nz):
            continue
        i = m + nz[0]
        if i != m:
            H[[i, m]] = H[[m, i]]
            H[:, [i, m]] = H[:, [m, i]]
        inv = inv_mod(H[m, m - 1], P)
        for i in range(m + 1, n):
            u = H[i, m - 1] * inv % P
            if u:
                H[i] = (H[i] - u * H[m]) % P
                H[:, m] = (H[:, m] + u * H[:, i]) % P
    # recurrence on leading principal submatrices
    polys = [np.array([1], dtype=np.int64)]
    for k in range(1, n + 1):
        prev = polys[-1]
        p = np.zeros(k + 1, dtype=np.int64)
        p[1:] = prev
        p[:-1] = (p[:-1] - H[k - 1, k - 1] * prev) % P
        prod = 1
        for i in range(k - 1, 0, -1):
            prod = prod * H[i, i - 1] % P
            if prod == 0:
                break
            c = H[i - 1, k - 1] * prod % P
            if c:
                q = polys[i - 1]
                p[: len(q)] = (p[: len(q)] - c * q) % P
        polys.append(p % P)
    return polys[-1]


def poly_roots(poly: np.ndarray, P: int) -> list[int]:
    """All roots in F_P by evaluation at every field element."""
    x = np.arange(P, dtype=np.int64)
    acc = np.zeros(P, dtype=np.int64)
    for c in poly[::-1]:
        acc = (acc * x + int(c)) % P
    return [int(r) for r in np.nonzero(acc == 0)[0]]


def matmul_mod(A, B, P: int) -> np.ndarray:
    """A @ B mod P, chunked over the inner dimension to avoid int64 overflow."""
    A = np.asarray(A, dtype=np.int64) % P
    B = np.asarray(B, dtype=np.int64) % P
    inner = A.shape[-1]
    step = max(1, int((2**62) // max(1, (P - 1) ** 2)))
    if step >= inner:
        return (A @ B) % P
    out = np.zeros(A.shape[:-1] + B.shape[-1:], dtype=np.int64)
    for s in range(0, inner, step):
        out = (out + A[..., s : s + step] @ B[s : s + step]) % P
    return out
