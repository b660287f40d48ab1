"""Simulated EM/RRM layer: capacity sharing, averaging windows, notifications."""

from ranslicing.enforcement.allocation import (
    Aggregate,
    AggregateAllocation,
    AllocationResult,
    allocate_capacity,
)
from ranslicing.enforcement.simulator import (
    KIND_GUARANTEE_CLEARED,
    KIND_GUARANTEE_VIOLATION,
    KIND_LIFECYCLE_COMPLETED,
    KIND_MAXIMUM_CLEARED,
    KIND_MAXIMUM_EXCEEDED,
    LoadTrace,
    Notification,
    OfferedLoadProfile,
    SimConfig,
    Simulation,
    TickResult,
    window_ticks,
)

__all__ = [
    "Aggregate",
    "AggregateAllocation",
    "AllocationResult",
    "KIND_GUARANTEE_CLEARED",
    "KIND_GUARANTEE_VIOLATION",
    "KIND_LIFECYCLE_COMPLETED",
    "KIND_MAXIMUM_CLEARED",
    "KIND_MAXIMUM_EXCEEDED",
    "LoadTrace",
    "Notification",
    "OfferedLoadProfile",
    "SimConfig",
    "Simulation",
    "TickResult",
    "allocate_capacity",
    "window_ticks",
]
