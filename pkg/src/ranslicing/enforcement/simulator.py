"""Tick-driven enforcement of Authorised Load over the live model.

Each tick the simulator snapshots the model, reads the offered-load traces,
shares every cell's effective capacity among its slice aggregates, rolls
the averaging windows forward and emits raise/clear notifications when a
guarantee stops (or resumes) being fulfilled.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from ranslicing.errors import InvariantViolation, ProfileExhausted
from ranslicing.enforcement.allocation import Aggregate, AllocationResult, allocate_capacity
from ranslicing.nrm.types import (
    NOTIFICATION_ENABLED,
    AuthorisedLoadEntry,
    QosFlowType,
)

DEFAULT_SCOPE = "default"

KIND_GUARANTEE_VIOLATION = "GuaranteedLoadNotFulfilled"
KIND_GUARANTEE_CLEARED = "GuaranteedLoadFulfilledAgain"
KIND_MAXIMUM_EXCEEDED = "MaximumLoadExceeded"
KIND_MAXIMUM_CLEARED = "MaximumLoadCleared"
KIND_CELL_FAULT = "CellCapacityDegraded"
KIND_CELL_FAULT_CLEARED = "CellCapacityRestored"
KIND_LIFECYCLE_COMPLETED = "LifecycleOperationCompleted"


@dataclass(frozen=True)
class SimConfig:
    tick_duration_s: float = 1.0
    spectral_efficiency_bps_per_hz: float = 5.0
    seed: int = 0
    compliance_epsilon: float = 1e-6  # relative slack on window comparisons

    def cell_capacity_mbps(self, bandwidth_mhz: float) -> float:
        return bandwidth_mhz * self.spectral_efficiency_bps_per_hz


@dataclass(frozen=True)
class LoadTrace:
    """Step-function offered load for one (cell, cell slice, flow type).

    Value holds from each point's tick until the next point; zero before the
    first point; the trace ends (exclusive) at end_tick.
    """

    cell_id: str
    cell_slice_id: str
    flow_type: QosFlowType
    points: tuple[tuple[int, float], ...]
    end_tick: int

    def validate(self) -> list[str]:
        problems = []
        last = -1
        for tick, mbps in self.points:
            if tick <= last:
                problems.append(f"trace ticks must increase: {tick} after {last}")
            if mbps < 0:
                problems.append(f"offered load must be >= 0, got {mbps}")
            last = tick
        if self.points and self.end_tick <= self.points[0][0]:
            problems.append("endTick must lie beyond the first point")
        return problems

    def value_at(self, tick: int) -> float:
        if tick >= self.end_tick:
            raise ProfileExhausted(tick)
        value = 0.0
        for point_tick, mbps in self.points:
            if point_tick > tick:
                break
            value = mbps
        return value

    def to_dict(self) -> dict:
        return {
            "cellId": self.cell_id,
            "cellSliceId": self.cell_slice_id,
            "flowType": self.flow_type.to_dict(),
            "points": [{"tick": t, "offeredMbps": v} for t, v in self.points],
            "endTick": self.end_tick,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LoadTrace":
        return cls(
            cell_id=d["cellId"],
            cell_slice_id=d["cellSliceId"],
            flow_type=QosFlowType.from_dict(d["flowType"]),
            points=tuple((int(p["tick"]), float(p["offeredMbps"])) for p in d["points"]),
            end_tick=int(d["endTick"]),
        )


class OfferedLoadProfile:
    """The full demand trace set driving one simulation run."""

    def __init__(self, traces: list[LoadTrace]):
        self.traces = list(traces)
        problems = []
        for trace in self.traces:
            problems += trace.validate()
        if problems:
            raise InvariantViolation(problems)

    @property
    def horizon(self) -> int | None:
        """First tick at which some trace is exhausted; None if no traces."""
        if not self.traces:
            return None
        return min(t.end_tick for t in self.traces)

    def offered(self, tick: int, cell_id: str, cell_slice_id: str) -> dict[QosFlowType, float]:
        out: dict[QosFlowType, float] = {}
        for trace in self.traces:
            if trace.cell_id == cell_id and trace.cell_slice_id == cell_slice_id:
                out[trace.flow_type] = out.get(trace.flow_type, 0.0) + trace.value_at(tick)
        return out


@dataclass(frozen=True)
class Notification:
    kind: str
    tick: int
    level: str  # "cell" | "ranSlice" | "infrastructure" | "lifecycle"
    event: str  # "raise" | "clear" | "event"
    cell_id: str | None = None
    cell_slice_id: str | None = None
    ran_slice_id: str | None = None
    scope_key: str | None = None
    details: tuple[tuple[str, object], ...] = ()

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "tick": self.tick,
            "level": self.level,
            "event": self.event,
        }
        for name, value in (
            ("cellId", self.cell_id),
            ("cellSliceId", self.cell_slice_id),
            ("ranSliceId", self.ran_slice_id),
            ("scopeKey", self.scope_key),
        ):
            if value is not None:
                d[name] = value
        d.update({k: v for k, v in self.details})
        return d


@dataclass
class CellTickResult:
    cell_id: str
    capacity_mbps: float
    effective_capacity_mbps: float
    allocation: AllocationResult
    # Per-flow served derived by apportioning each aggregate proportionally
    # to its per-flow offered load.
    flow_served: dict = field(default_factory=dict)  # (cellSliceId, flowType) -> mbps
    flow_offered: dict = field(default_factory=dict)
    slice_owner: dict = field(default_factory=dict)  # cellSliceId -> ranSliceId

    def to_dict(self) -> dict:
        d = self.allocation.to_dict()
        d["cellId"] = self.cell_id
        d["capacityMbps"] = self.capacity_mbps
        d["effectiveCapacityMbps"] = self.effective_capacity_mbps
        return d


@dataclass
class TickResult:
    tick: int
    cells: list[CellTickResult]
    notifications: list[Notification]
    slice_compliance: list[dict]


class _Window:
    __slots__ = ("length", "samples")

    def __init__(self, length: int):
        self.length = length
        self.samples: deque = deque(maxlen=length)

    def push(self, served: float, target: float) -> None:
        self.samples.append((served, target))

    @property
    def full(self) -> bool:
        return len(self.samples) == self.length

    def averages(self) -> tuple[float, float]:
        n = len(self.samples)
        return (
            sum(s for s, _ in self.samples) / n,
            sum(t for _, t in self.samples) / n,
        )


def window_ticks(window_s: float, tick_duration_s: float) -> int:
    """Averaging windows must be whole multiples of the tick."""
    ratio = window_s / tick_duration_s
    ticks = round(ratio)
    if ticks < 1 or abs(ratio - ticks) > 1e-9:
        raise InvariantViolation(
            [f"averaging window {window_s}s is not a multiple of the {tick_duration_s}s tick"]
        )
    return ticks


class Simulation:
    """Deterministic tick loop over (model store, load profile, config)."""

    def __init__(self, store, profile: OfferedLoadProfile, config: SimConfig | None = None):
        self.store = store
        self.profile = profile
        self.config = config or SimConfig()
        self.tick = 0
        self.degradation: dict[str, float] = {}
        self._windows: dict[tuple, _Window] = {}
        self._active: set[tuple] = set()  # raised, not yet cleared
        self._validate_windows(store)

    def _validate_windows(self, store) -> None:
        for cs in store.iter_kind("CellSlice"):
            for entry in cs.attrs.authorised_load.entries:
                window_ticks(entry.averaging_window_s, self.config.tick_duration_s)
        for rs in store.iter_kind("RanSlice"):
            for entry in rs.attrs.authorised_load.entries:
                window_ticks(entry.averaging_window_s, self.config.tick_duration_s)

    def set_degradation(self, cell_id: str, factor: float) -> None:
        if not 0.0 <= factor <= 1.0:
            raise InvariantViolation([f"degradation factor out of [0,1]: {factor}"])
        self.degradation[cell_id] = factor

    def clear_degradation(self, cell_id: str) -> None:
        self.degradation.pop(cell_id, None)

    # --- tick loop -------------------------------------------------------------

    def advance_tick(self) -> TickResult:
        horizon = self.profile.horizon
        if horizon is not None and self.tick >= horizon:
            raise ProfileExhausted(self.tick)

        snap = self.store.snapshot()
        notifications: list[Notification] = []
        cell_results: list[CellTickResult] = []

        owners = self._slice_owners(snap)
        cells = sorted(snap.iter_kind("NrCell"), key=lambda o: o.object_id)
        for cell in cells:
            result = self._allocate_cell(snap, cell, owners)
            cell_results.append(result)
            notifications += self._check_cell_compliance(snap, cell, result)

        slice_compliance = self._evaluate_ran_slice_al(snap, cell_results, notifications)

        live_keys = self._live_window_keys(snap)
        for key in [k for k in self._windows if k not in live_keys]:
            del self._windows[key]
            self._active.discard(key)

        result = TickResult(
            tick=self.tick,
            cells=cell_results,
            notifications=notifications,
            slice_compliance=slice_compliance,
        )
        self.tick += 1
        return result

    def _slice_owners(self, snap) -> dict[tuple[str, str], str]:
        owners = {}
        for rs in snap.iter_kind("RanSlice"):
            for cell_id, cell_slice_id in rs.attrs.cell_slice_refs:
                owners[(cell_id, cell_slice_id)] = rs.attrs.ran_slice_id
        return owners

    def _allocate_cell(self, snap, cell, owners) -> CellTickResult:
        attrs = cell.attrs
        nominal = self.config.cell_capacity_mbps(attrs.channel_bandwidth_mhz)
        effective = nominal * self.degradation.get(attrs.cell_id, 1.0)

        aggregates: list[Aggregate] = []
        flow_offered: dict = {}
        agg_flows: dict[tuple[str, str], list[tuple[QosFlowType, float]]] = {}

        for cs in snap.children_of(cell.ref):
            if cs.kind != "CellSlice":
                continue
            cs_id = cs.attrs.cell_slice_id
            offered = self.profile.offered(self.tick, attrs.cell_id, cs_id)
            for ft, mbps in offered.items():
                flow_offered[(cs_id, ft)] = mbps
            covered: set[QosFlowType] = set()
            for entry in cs.attrs.authorised_load.entries:
                covered |= set(entry.flow_types)
                flows = [(ft, offered.get(ft, 0.0)) for ft in sorted(entry.flow_types)]
                demand = sum(v for _, v in flows)
                aggregates.append(
                    Aggregate(
                        cell_slice_id=cs_id,
                        scope_key=entry.scope_key(),
                        offered=demand,
                        guaranteed_fraction=entry.guaranteed or 0.0,
                        maximum_fraction=entry.maximum,
                    )
                )
                agg_flows[(cs_id, entry.scope_key())] = flows
            stray = [
                (ft, mbps)
                for ft, mbps in sorted(offered.items())
                if ft not in covered and mbps > 0
            ]
            if stray or not cs.attrs.authorised_load.entries:
                demand = sum(v for _, v in stray)
                aggregates.append(
                    Aggregate(cell_slice_id=cs_id, scope_key=DEFAULT_SCOPE, offered=demand)
                )
                agg_flows[(cs_id, DEFAULT_SCOPE)] = stray

        allocation = allocate_capacity(aggregates, effective)

        flow_served: dict = {}
        for agg in allocation.aggregates:
            flows = agg_flows.get((agg.cell_slice_id, agg.scope_key), [])
            for ft, mbps in flows:
                share = agg.served * (mbps / agg.offered) if agg.offered > 0 else 0.0
                flow_served[(agg.cell_slice_id, ft)] = share

        return CellTickResult(
            cell_id=attrs.cell_id,
            capacity_mbps=nominal,
            effective_capacity_mbps=effective,
            allocation=allocation,
            flow_served=flow_served,
            flow_offered=flow_offered,
            slice_owner={
                cs_id: owners.get((attrs.cell_id, cs_id), "")
                for cs_id in {a.cell_slice_id for a in allocation.aggregates}
            },
        )

    def _check_cell_compliance(self, snap, cell, result: CellTickResult) -> list[Notification]:
        out: list[Notification] = []
        cell_slices = [c for c in snap.children_of(cell.ref) if c.kind == "CellSlice"]
        for cs in cell_slices:
            cs_id = cs.attrs.cell_slice_id
            for entry in cs.attrs.authorised_load.entries:
                if entry.guaranteed is None:
                    continue
                key = ("cell", result.cell_id, cs_id, entry.scope_key())
                window = self._window_for(key, entry)
                agg = next(
                    a
                    for a in result.allocation.aggregates
                    if a.cell_slice_id == cs_id and a.scope_key == entry.scope_key()
                )
                target = min(agg.offered, entry.guaranteed * result.capacity_mbps)
                window.push(agg.served, target)
                if entry.notification_control != NOTIFICATION_ENABLED:
                    continue
                notif = self._raise_or_clear(
                    key, window,
                    lambda avg_s, avg_t: avg_t > 0 and avg_s < avg_t * (1 - self.config.compliance_epsilon),
                    KIND_GUARANTEE_VIOLATION, KIND_GUARANTEE_CLEARED,
                    level="cell",
                    cell_id=result.cell_id,
                    cell_slice_id=cs_id,
                    ran_slice_id=result.slice_owner.get(cs_id) or None,
                    scope_key=entry.scope_key(),
                )
                if notif:
                    out.append(notif)
        return out

    def _window_for(self, key: tuple, entry: AuthorisedLoadEntry) -> _Window:
        length = window_ticks(entry.averaging_window_s, self.config.tick_duration_s)
        window = self._windows.get(key)
        if window is None or window.length != length:
            window = _Window(length)
            self._windows[key] = window
            self._active.discard(key)
        return window

    def _raise_or_clear(self, key, window, violated, raise_kind, clear_kind, **ids):
        if not window.full:
            return None
        avg_served, avg_target = window.averages()
        details = (
            ("windowAvgServed", avg_served),
            ("windowAvgTarget", avg_target),
        )
        if violated(avg_served, avg_target):
            if key in self._active:
                return None
            self._active.add(key)
            return Notification(
                kind=raise_kind, tick=self.tick, event="raise", details=details, **ids
            )
        if key in self._active:
            self._active.discard(key)
            return Notification(
                kind=clear_kind, tick=self.tick, event="clear", details=details, **ids
            )
        return None

    def _evaluate_ran_slice_al(self, snap, cell_results, notifications) -> list[dict]:
        """Slice-wide AL compliance; loads are absolute Mbps at this level."""
        records: list[dict] = []
        by_cell = {r.cell_id: r for r in cell_results}
        for rs in snap.iter_kind("RanSlice"):
            attrs = rs.attrs
            if not attrs.authorised_load.entries:
                continue
            for entry in attrs.authorised_load.entries:
                offered = served = 0.0
                for cell_id, cell_slice_id in attrs.cell_slice_refs:
                    result = by_cell.get(cell_id)
                    if result is None:
                        continue
                    for ft in entry.flow_types:
                        offered += result.flow_offered.get((cell_slice_id, ft), 0.0)
                        served += result.flow_served.get((cell_slice_id, ft), 0.0)
                key = ("ranSlice", attrs.ran_slice_id, entry.scope_key())
                window = self._window_for(key, entry)
                target = (
                    min(offered, entry.guaranteed) if entry.guaranteed is not None else 0.0
                )
                window.push(served, target)
                record = {
                    "ranSliceId": attrs.ran_slice_id,
                    "scopeKey": entry.scope_key(),
                    "tick": self.tick,
                    "offeredMbps": offered,
                    "servedMbps": served,
                }
                records.append(record)
                if entry.guaranteed is not None and entry.notification_control == NOTIFICATION_ENABLED:
                    notif = self._raise_or_clear(
                        key, window,
                        lambda s, t: t > 0 and s < t * (1 - self.config.compliance_epsilon),
                        KIND_GUARANTEE_VIOLATION, KIND_GUARANTEE_CLEARED,
                        level="ranSlice",
                        ran_slice_id=attrs.ran_slice_id,
                        scope_key=entry.scope_key(),
                    )
                    if notif:
                        notifications.append(notif)
                if entry.maximum is not None:
                    max_key = key + ("max",)
                    max_window = self._window_for(max_key, entry)
                    max_window.push(served, entry.maximum)
                    notif = self._raise_or_clear(
                        max_key, max_window,
                        lambda s, t: s > t * (1 + self.config.compliance_epsilon),
                        KIND_MAXIMUM_EXCEEDED, KIND_MAXIMUM_CLEARED,
                        level="ranSlice",
                        ran_slice_id=attrs.ran_slice_id,
                        scope_key=entry.scope_key(),
                    )
                    if notif:
                        notifications.append(notif)
        return records

    def _live_window_keys(self, snap) -> set:
        keys = set()
        for cell in snap.iter_kind("NrCell"):
            for cs in snap.children_of(cell.ref):
                if cs.kind != "CellSlice":
                    continue
                for entry in cs.attrs.authorised_load.entries:
                    keys.add(
                        ("cell", cell.attrs.cell_id, cs.attrs.cell_slice_id, entry.scope_key())
                    )
        for rs in snap.iter_kind("RanSlice"):
            for entry in rs.attrs.authorised_load.entries:
                base = ("ranSlice", rs.attrs.ran_slice_id, entry.scope_key())
                keys.add(base)
                keys.add(base + ("max",))
        return keys
