"""RAN slice lifecycle management: create, modify, scale, terminate."""

from ranslicing.lifecycle.manager import (
    LcmManager,
    LcmOperationRecord,
    convert_al_to_fractions,
)
from ranslicing.lifecycle.templates import (
    ISOLATION_DEDICATED,
    ISOLATION_SHARED,
    RanSliceTemplate,
)

__all__ = [
    "ISOLATION_DEDICATED",
    "ISOLATION_SHARED",
    "LcmManager",
    "LcmOperationRecord",
    "RanSliceTemplate",
    "convert_al_to_fractions",
]
