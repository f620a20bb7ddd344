"""Character tables, blocks and extensions for enumerated groups."""

from .table import (
    CharacterTable,
    ClassFunction,
    ConjClassData,
    TableError,
    character_table,
    conjugacy_classes,
    fusion,
    induce,
    induce_restrict,
    restrict,
)

__all__ = [
    "CharacterTable",
    "ClassFunction",
    "ConjClassData",
    "TableError",
    "character_table",
    "conjugacy_classes",
    "fusion",
    "induce",
    "induce_restrict",
    "restrict",
]

from .blocks import BlockPartition, brauer_map, central_characters, ell_blocks
from .extensions import (
    EquivariantMapResult,
    ExtensionContext,
    ExtensionRecord,
    equivariant_extension_map,
    extension_search,
    is_normal,
)

__all__ += [
    "BlockPartition",
    "brauer_map",
    "central_characters",
    "ell_blocks",
    "EquivariantMapResult",
    "ExtensionContext",
    "ExtensionRecord",
    "equivariant_extension_map",
    "extension_search",
    "is_normal",
]
