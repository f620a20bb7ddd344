"""ell-blocks by central-character congruence, defects, heights and Brauer induction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..numeric.arith import InvalidArgument, is_prime, valuation
from ..numeric.cyclotomic import reduction_field
from .table import CharacterTable, fusion, lift_matrix, phi


def _root_images(E: int, ell: int, k: int) -> tuple[np.ndarray, int]:
    """Digit vectors of the images of zeta_E^i (i < phi(E)) in F_{ell^m}, and m."""
    F, ep = reduction_field(E, ell)
    step = (F.q - 1) // ep
    logs = (step * k * np.arange(phi(E))) % (F.q - 1)
    return F.digits[F.exp[logs]], F.m


def central_characters(table: CharacterTable, E: int | None = None) -> np.ndarray:
    """Exact central characters h_C chi(g_C) / chi(1) as integer arrays (n, r, phi(E))."""
    E = E or table.e
    num = table.coeffs * table.classes.sizes[None, :, None]
    deg = table.degrees[:, None, None]
    if (num % deg).any():
        raise ArithmeticError("central character is not integral")
    out = num // deg
    if E != table.e:
        out = out @ lift_matrix(table.e, E)
    return out


def reduce_central(omega: np.ndarray, E: int, ell: int, k: int = 1) -> np.ndarray:
    """Reduce integer coefficient arrays (..., phi(E)) to digit vectors (..., m) mod ell."""
    D, _ = _root_images(E, ell, k)
    return (omega % ell) @ D % ell


def _second_root(E: int, ell: int) -> int:
    _, ep = reduction_field(E, ell)
    for k in range(2, max(ep, 2)):
        if math.gcd(k, ep) == 1:
            return k
    return 1


@dataclass
class BlockPartition:
    ell: int
    blocks: list[tuple[int, ...]]
    defects: list[int]
    heights: dict[int, int]
    block_of: dict[int, int]
    keys: list[np.ndarray] = field(repr=False, default_factory=list)
    root_choice_invariant: bool = True
    table: CharacterTable | None = field(repr=False, default=None)

    @property
    def count(self) -> int:
        return len(self.blocks)

    def defect_group_order(self, b: int) -> int:
        return self.ell ** self.defects[b]

    def height_zero(self, b: int | None = None) -> list[int]:
        members = range(len(self.block_of)) if b is None else self.blocks[b]
        return [i for i in members if self.heights[i] == 0]

    @property
    def principal(self) -> int:
        return self.block_of[self.table.trivial_index]

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "blocks": [
                {
                    "members": list(b),
                    "defect": d,
                    "defect_group_order": self.ell**d,
                    "heights": {str(i): self.heights[i] for i in b},
                }
                for b, d in zip(self.blocks, self.defects)
            ],
            "root_choice_invariant": self.root_choice_invariant,
        }


def _partition(keys: np.ndarray) -> list[tuple[int, ...]]:
    groups: dict[bytes, list[int]] = {}
    for i, row in enumerate(keys):
        groups.setdefault(row.tobytes(), []).append(i)
    return sorted((tuple(g) for g in groups.values()), key=lambda b: b[0])


def ell_blocks(table: CharacterTable, ell: int) -> BlockPartition:
    if not is_prime(ell):
        raise InvalidArgument(f"{ell} is not prime")
    E = table.e
    omega = central_characters(table)
    keys = reduce_central(omega, E, ell)
    blocks = _partition(keys.reshape(len(table), -1))
    k2 = _second_root(E, ell)
    again = _partition(reduce_central(omega, E, ell, k2).reshape(len(table), -1))
    a = valuation(table.order, ell)
    defects, heights, block_of = [], {}, {}
    for bi, b in enumerate(blocks):
        vals = [valuation(int(table.degrees[i]), ell) for i in b]
        d = a - min(vals)
        defects.append(d)
        for i, v in zip(b, vals):
            heights[i] = v - (a - d)
            block_of[i] = bi
    return BlockPartition(
        ell=ell,
        blocks=blocks,
        defects=defects,
        heights=heights,
        block_of=block_of,
        keys=[keys[b[0]] for b in blocks],
        root_choice_invariant=(again == blocks),
        table=table,
    )


def brauer_map(
    b: int,
    H_blocks: BlockPartition,
    G_blocks: BlockPartition,
    fus: np.ndarray | None = None,
) -> int | None:
    """Brauer-induced block b^G, or None when the induced central character matches no block."""
    H, G = H_blocks.table, G_blocks.table
    ell = H_blocks.ell
    if G_blocks.ell != ell:
        raise InvalidArgument("partitions at different primes")
    if fus is None:
        fus = fusion(H, G)
    E = G.e
    if E % H.e:
        raise InvalidArgument("exponent of the subgroup does not divide the group exponent")
    chi = H_blocks.blocks[b][0]
    omega = central_characters(H, E)[chi]
    red = reduce_central(omega, E, ell)
    acc = np.zeros((G.classes.count, red.shape[-1]), dtype=np.int64)
    np.add.at(acc, fus, red)
    acc %= ell
    for bi, key in enumerate(G_blocks.keys):
        if np.array_equal(key, acc):
            return bi
    return None
