"""Integer, finite-field and cyclotomic arithmetic."""

from .arith import (
    InvalidArgument,
    LPartResult,
    factorize,
    is_prime,
    lcm_all,
    lpart,
    multiplicative_order,
    primitive_root,
)
from .cyclotomic import Cyclotomic, cyclo_reduce_mod_ell, reduction_field
from .ffield import GF, FqElem, ff_arith, field_for_order

__all__ = [
    "Cyclotomic",
    "FqElem",
    "GF",
    "InvalidArgument",
    "LPartResult",
    "cyclo_reduce_mod_ell",
    "factorize",
    "ff_arith",
    "field_for_order",
    "is_prime",
    "lcm_all",
    "lpart",
    "multiplicative_order",
    "primitive_root",
    "reduction_field",
]
