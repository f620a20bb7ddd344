"""Finite groups given by generators, enumerated by breadth-first closure.

Elements are numpy arrays (matrices over a finite field, or permutations);
all bulk operations are batched.  Every element gets an integer index in
BFS order, index 0 being the identity.
"""

from __future__ import annotations

import os
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .numeric.ffield import GF

DEFAULT_BUDGET = 1_000_000


class ResourceLimit(RuntimeError):
    """Raised when an enumeration would exceed the element budget."""

    def __init__(self, what: str, budget: int):
        super().__init__(f"enumerating {what} exceeds the budget of {budget} elements")
        self.what = what
        self.budget = budget


def element_budget() -> int:
    return int(os.environ.get("AMTYPEC_BUDGET", DEFAULT_BUDGET))


class MatrixKind:
    """n x n matrices over GF, stored in plane layout (m, n, n)."""

    def __init__(self, field: GF, n: int):
        self.field = field
        self.n = n
        self.shape = (field.m, n, n)

    def identity(self):
        return self.field.mat_identity(self.n)

    def mul(self, a, b):
        return self.field.mat_mul(a, b)

    def inv(self, a):
        return self.field.mat_inv(a)

    def describe(self):
        return f"{self.n}x{self.n} matrices over {self.field!r}"


class PermKind:
    """Permutations of range(degree); ``(a*b)[x] = a[b[x]]``."""

    def __init__(self, degree: int):
        self.degree = degree
        self.shape = (degree,)

    def identity(self):
        return np.arange(self.degree, dtype=np.int64)

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        return np.take_along_axis(a, b, axis=-1)

    def inv(self, a):
        return np.argsort(np.asarray(a), axis=-1)

    def describe(self):
        return f"permutations of {self.degree} points"


class GeneratedGroup:
    """Group generated by a list of elements of a common kind."""

    def __init__(self, kind, gens, name: str = "G", budget: int | None = None):
        self.kind = kind
        self.name = name
        self.budget = element_budget() if budget is None else budget
        gens = [np.asarray(g, dtype=np.int64).reshape(kind.shape) for g in gens]
        self.gens = gens
        rng = np.random.default_rng(0x5EED)
        size = int(np.prod(kind.shape))
        self._w = rng.integers(1, 2**63, size=size, dtype=np.uint64) | np.uint64(1)
        self._enumerated = False

    # -- hashing -------------------------------------------------------------
    def _hash(self, X):
        X = np.asarray(X)
        flat = X.reshape(X.shape[: X.ndim - len(self.kind.shape)] + (-1,)).astype(np.uint64)
        with np.errstate(over="ignore"):
            return (flat * self._w).sum(axis=-1, dtype=np.uint64)

    # -- enumeration -----------------------------------------------------------
    def enumerate(self):
        if self._enumerated:
            return self
        kind = self.kind
        ident = kind.identity()
        store = [ident[None].astype(np.int8)]
        hashes = [self._hash(ident[None])]
        parent = [np.array([-1])]
        via = [np.array([-1])]
        layer_of = [np.array([0])]
        seen = {int(hashes[0][0]): 0}
        count = 1
        frontier = ident[None]
        frontier_idx = np.array([0])
        depth = 0
        while len(frontier):
            depth += 1
            new_elems, new_parent, new_via = [], [], []
            for gi, g in enumerate(self.gens):
                cand = kind.mul(frontier, g)
                h = self._hash(cand)
                _, first = np.unique(h, return_index=True)
                first.sort()
                for j in first:
                    key = int(h[j])
                    hit = seen.get(key)
                    if hit is None:
                        seen[key] = count
                        count += 1
                        new_elems.append(cand[j])
                        new_parent.append(frontier_idx[j])
                        new_via.append(gi)
                        if count > self.budget:
                            raise ResourceLimit(self.name, self.budget)
            if not new_elems:
                break
            block = np.array(new_elems, dtype=np.int64)
            start = count - len(new_elems)
            store.append(block.astype(np.int8))
            hashes.append(self._hash(block))
            parent.append(np.array(new_parent))
            via.append(np.array(new_via))
            layer_of.append(np.full(len(new_elems), depth))
            frontier = block
            frontier_idx = np.arange(start, count)
        self.elements = np.concatenate(store)
        self.hashes = np.concatenate(hashes)
        self.parent = np.concatenate(parent)
        self.via = np.concatenate(via)
        self.layer = np.concatenate(layer_of)
        self._order_by_hash = np.argsort(self.hashes)
        self._sorted_hash = self.hashes[self._order_by_hash]
        if len(np.unique(self._sorted_hash)) != len(self._sorted_hash):
            raise RuntimeError("hash collision during enumeration")
        self._enumerated = True
        return self

    @property
    def order(self) -> int:
        self.enumerate()
        return len(self.elements)

    def __len__(self):
        return self.order

    def element(self, i: int) -> np.ndarray:
        self.enumerate()
        return self.elements[i].astype(np.int64)

    def elems(self, idx) -> np.ndarray:
        self.enumerate()
        return self.elements[np.asarray(idx)].astype(np.int64)

    def index(self, X, strict: bool = True) -> np.ndarray:
        """Indices of the given elements (batched); -1 when absent unless strict."""
        self.enumerate()
        X = np.asarray(X, dtype=np.int64)
        single = X.ndim == len(self.kind.shape)
        if single:
            X = X[None]
        h = self._hash(X)
        pos = np.searchsorted(self._sorted_hash, h)
        pos = np.minimum(pos, len(self._sorted_hash) - 1)
        found = self._sorted_hash[pos] == h
        idx = np.where(found, self._order_by_hash[pos], -1)
        ok = idx >= 0
        if ok.any():
            flat_x = X[ok].reshape(ok.sum(), -1)
            flat_e = self.elements[idx[ok]].reshape(ok.sum(), -1).astype(np.int64)
            if not np.array_equal(flat_x, flat_e):
                raise RuntimeError("hash collision during lookup")
        if strict and not ok.all():
            raise KeyError(f"element not in {self.name}")
        return idx[0] if single else idx

    def contains(self, X) -> np.ndarray:
        return self.index(X, strict=False) >= 0

    def mul_idx(self, i, j) -> np.ndarray:
        return self.index(self.kind.mul(self.elems(i), self.elems(j)))

    # -- derived data ----------------------------------------------------------
    @cached_property
    def gen_inverses(self):
        return [self.kind.inv(g) for g in self.gens]

    @cached_property
    def inverse(self) -> np.ndarray:
        """inverse[i] is the index of the inverse of element i."""
        self.enumerate()
        N = self.order
        inv = np.full(N, -1, dtype=np.int64)
        inv[0] = 0
        for d in range(1, int(self.layer.max()) + 1 if N > 1 else 1):
            sel = np.nonzero(self.layer == d)[0]
            if not len(sel):
                continue
            ginv = np.stack(self.gen_inverses)[self.via[sel]]
            prod = self.kind.mul(ginv, self.elems(inv[self.parent[sel]]))
            inv[sel] = self.index(prod)
        return inv

    def conj_perm(self, g) -> np.ndarray:
        """Index permutation x -> g^-1 x g."""
        g = np.asarray(g, dtype=np.int64)
        gi = self.kind.inv(g)
        out = np.empty(self.order, dtype=np.int64)
        for s in range(0, self.order, 65536):
            X = self.elems(np.arange(s, min(s + 65536, self.order)))
            out[s : s + len(X)] = self.index(self.kind.mul(self.kind.mul(gi, X), g))
        return out

    @cached_property
    def element_orders(self) -> np.ndarray:
        self.enumerate()
        N = self.order
        ords = np.zeros(N, dtype=np.int64)
        ords[0] = 1
        cur = np.arange(N)
        k = 1
        todo = np.arange(1, N)
        while len(todo):
            k += 1
            cur_t = self.index(self.kind.mul(self.elems(cur[todo]), self.elems(todo)))
            cur[todo] = cur_t
            done = cur_t == 0
            ords[todo[done]] = k
            todo = todo[~done]
        return ords

    @cached_property
    def exponent(self) -> int:
        return int(np.lcm.reduce(self.element_orders))

    @cached_property
    def _classes(self):
        self.enumerate()
        N = self.order
        rows, cols = [], []
        for g in self.gens:
            rows.append(np.arange(N))
            cols.append(self.conj_perm(g))
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(N, N))
        _, labels = connected_components(graph, directed=True, connection="weak")
        ords = self.element_orders
        ncls = labels.max() + 1
        sizes = np.bincount(labels, minlength=ncls)
        first = np.full(ncls, N, dtype=np.int64)
        np.minimum.at(first, labels, np.arange(N))
        cls_ord = ords[first]
        perm = sorted(range(ncls), key=lambda k: (cls_ord[k], sizes[k], first[k]))
        relabel = np.empty(ncls, dtype=np.int64)
        relabel[perm] = np.arange(ncls)
        class_of = relabel[labels]
        reps = first[perm]
        return class_of, reps, sizes[perm]

    @property
    def class_of(self) -> np.ndarray:
        return self._classes[0]

    @property
    def class_reps(self) -> np.ndarray:
        return self._classes[1]

    @property
    def class_sizes(self) -> np.ndarray:
        return self._classes[2]

    @property
    def num_classes(self) -> int:
        return len(self.class_reps)

    def class_members(self, k: int) -> np.ndarray:
        return np.nonzero(self.class_of == k)[0]

    @cached_property
    def class_inverse(self) -> np.ndarray:
        return self.class_of[self.inverse[self.class_reps]]

    def power_map(self, k: int) -> np.ndarray:
        """Class of rep**k for every class."""
        reps = self.class_reps
        cur = np.zeros(len(reps), dtype=np.int64)
        base = reps.copy()
        e = k % self.exponent
        while e:
            if e & 1:
                cur = self.mul_idx(cur, base)
            base = self.mul_idx(base, base)
            e >>= 1
        return self.class_of[cur]

    def cayley_table(self) -> np.ndarray:
        N = self.order
        if N > 4096:
            raise ResourceLimit(f"Cayley table of {self.name}", 4096)
        tab = np.empty((N, N), dtype=np.int64)
        for i in range(N):
            tab[i] = self.mul_idx(np.full(N, i), np.arange(N))
        return tab

    def subgroup(self, gens, name: str = "H") -> "GeneratedGroup":
        return GeneratedGroup(self.kind, gens, name=name, budget=self.budget)

    def is_abelian(self) -> bool:
        gs = self.gens
        return all(
            np.array_equal(self.kind.mul(a, b), self.kind.mul(b, a)) for i, a in enumerate(gs) for b in gs[i + 1 :]
        )

    def __repr__(self):
        size = str(len(self.elements)) if self._enumerated else "?"
        return f"<{self.name}: {len(self.gens)} generators, order {size}>"


def matrix_group(field: GF, gens, name: str = "G", budget: int | None = None) -> GeneratedGroup:
    gens = [np.asarray(g) for g in gens]
    n = gens[0].shape[-1]
    return GeneratedGroup(MatrixKind(field, n), gens, name=name, budget=budget)


def perm_group(degree: int, gens, name: str = "G", budget: int | None = None) -> GeneratedGroup:
    return GeneratedGroup(PermKind(degree), gens, name=name, budget=budget)


def elements_commute(kind, a, b) -> bool:
    return np.array_equal(kind.mul(a, b), kind.mul(b, a))


def element_order(kind, a, limit: int = 10**6) -> int:
    ident = kind.identity()
    cur = np.asarray(a, dtype=np.int64)
    k = 1
    while not np.array_equal(cur, ident):
        cur = kind.mul(cur, a)
        k += 1
        if k > limit:
            raise ResourceLimit("element order", limit)
    return k
