"""Simulated NG-RAN infrastructure and minimal MANO."""

from ranslicing.infra.manager import Infrastructure, ScaleStep, validate_nsd
from ranslicing.infra.types import (
    DEFAULT_COMPUTE_UNITS,
    CarrierBinding,
    LinkBinding,
    Nsd,
    NsInstance,
    Pop,
    Rrh,
    TransportLink,
    VirtualLink,
    VnfInstance,
    VnfProfile,
)

__all__ = [
    "CarrierBinding",
    "DEFAULT_COMPUTE_UNITS",
    "Infrastructure",
    "LinkBinding",
    "Nsd",
    "NsInstance",
    "Pop",
    "Rrh",
    "ScaleStep",
    "TransportLink",
    "VirtualLink",
    "VnfInstance",
    "VnfProfile",
    "validate_nsd",
]
