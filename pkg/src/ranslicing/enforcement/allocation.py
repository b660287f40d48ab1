"""Per-cell capacity sharing between slice aggregates.

Two deterministic phases:

1. Floors: each aggregate receives min(demand, guaranteed * C). If the
   floors exceed C (forced oversubscription or a degraded cell) they are
   scaled down proportionally.
2. Spare: remaining capacity is water-filled over residual demands, capped
   at maximum * C, with weights proportional to the residual demand.

Demand that cannot be served is reported as blocked (rate shaping).
"""

from __future__ import annotations

from dataclasses import dataclass

_EPS = 1e-12


@dataclass(frozen=True)
class Aggregate:
    """Demand of one authorised-load scope of one cell slice."""

    cell_slice_id: str
    scope_key: str
    offered: float
    guaranteed_fraction: float = 0.0  # 0 when unset
    maximum_fraction: float | None = None  # None = no cap ("N/A")

    @property
    def key(self) -> tuple[str, str]:
        return (self.cell_slice_id, self.scope_key)


@dataclass(frozen=True)
class AggregateAllocation:
    cell_slice_id: str
    scope_key: str
    offered: float
    guaranteed_target: float  # demand-capped floor entitlement
    served: float
    blocked: float

    def to_dict(self) -> dict:
        return {
            "cellSliceId": self.cell_slice_id,
            "scopeKey": self.scope_key,
            "offered": self.offered,
            "guaranteedTarget": self.guaranteed_target,
            "served": self.served,
            "blocked": self.blocked,
        }


@dataclass(frozen=True)
class AllocationResult:
    capacity: float
    aggregates: tuple[AggregateAllocation, ...]

    @property
    def total_offered(self) -> float:
        return sum(a.offered for a in self.aggregates)

    @property
    def total_served(self) -> float:
        return sum(a.served for a in self.aggregates)

    @property
    def total_blocked(self) -> float:
        return sum(a.blocked for a in self.aggregates)

    def served_of(self, cell_slice_id: str, scope_key: str) -> float:
        for a in self.aggregates:
            if a.cell_slice_id == cell_slice_id and a.scope_key == scope_key:
                return a.served
        raise KeyError((cell_slice_id, scope_key))

    def to_dict(self) -> dict:
        return {
            "capacity": self.capacity,
            "aggregates": [a.to_dict() for a in self.aggregates],
            "totalOffered": self.total_offered,
            "totalServed": self.total_served,
            "totalBlocked": self.total_blocked,
        }


def allocate_capacity(aggregates: list[Aggregate], capacity: float) -> AllocationResult:
    """Share `capacity` among the aggregates; total function on valid input."""
    if capacity < 0:
        raise ValueError(f"capacity must be >= 0, got {capacity}")
    for agg in aggregates:
        if agg.offered < 0:
            raise ValueError(f"offered demand must be >= 0: {agg}")

    n = len(aggregates)
    caps = []
    for agg in aggregates:
        cap = agg.offered
        if agg.maximum_fraction is not None:
            cap = min(cap, agg.maximum_fraction * capacity)
        caps.append(cap)

    # Phase 1: guaranteed floors, proportionally scaled when infeasible.
    floors = [
        min(caps[i], aggregates[i].guaranteed_fraction * capacity) for i in range(n)
    ]
    total_floor = sum(floors)
    if total_floor > capacity and total_floor > 0:
        scale = capacity / total_floor
        floors = [f * scale for f in floors]

    served = list(floors)
    spare = capacity - sum(served)

    # Phase 2: proportional water-filling of the spare over residual demand.
    # With weights equal to the residual demand a pass either saturates every
    # residual (spare >= total residual) or exhausts the spare; the loop
    # guards against float leftovers.
    for _ in range(n + 1):
        if spare <= _EPS:
            break
        residual = [caps[i] - served[i] for i in range(n)]
        active = [i for i in range(n) if residual[i] > _EPS]
        if not active:
            break
        total_residual = sum(residual[i] for i in active)
        if spare >= total_residual:
            for i in active:
                served[i] = caps[i]
            spare -= total_residual
        else:
            for i in active:
                served[i] += spare * residual[i] / total_residual
            spare = 0.0

    out = []
    for i, agg in enumerate(aggregates):
        target = min(agg.offered, agg.guaranteed_fraction * capacity)
        out.append(
            AggregateAllocation(
                cell_slice_id=agg.cell_slice_id,
                scope_key=agg.scope_key,
                offered=agg.offered,
                guaranteed_target=target,
                served=served[i],
                blocked=max(0.0, agg.offered - served[i]),
            )
        )
    return AllocationResult(capacity=capacity, aggregates=tuple(out))
