"""Performance and fault management over enforcement results.

Collects per-tick allocation samples into an append-only store, computes
per-slice KPI reports against target KPIs and planned load, and fans out
notifications to matching subscriptions.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

from ranslicing.errors import (
    InvariantViolation,
    OutOfOrderTick,
    UnknownSlice,
    UnknownSubscription,
    WindowIncomplete,
)
from ranslicing.enforcement.simulator import Notification, TickResult

VERDICT_MET = "MET"
VERDICT_VIOLATED = "VIOLATED"


@dataclass(frozen=True)
class SubscriptionFilter:
    ran_slice_ids: tuple[str, ...] | None = None  # None = all slices
    kinds: tuple[str, ...] | None = None  # None = all notification kinds

    def matches(self, notification: Notification) -> bool:
        if self.kinds is not None and notification.kind not in self.kinds:
            return False
        if self.ran_slice_ids is not None:
            return notification.ran_slice_id in self.ran_slice_ids
        return True

    def to_dict(self) -> dict:
        return {
            "ranSliceIds": list(self.ran_slice_ids) if self.ran_slice_ids else None,
            "notificationKinds": list(self.kinds) if self.kinds else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SubscriptionFilter":
        slice_ids = d.get("ranSliceIds")
        kinds = d.get("notificationKinds")
        return cls(
            ran_slice_ids=tuple(slice_ids) if slice_ids else None,
            kinds=tuple(kinds) if kinds else None,
        )


@dataclass
class Subscription:
    subscription_id: str
    filter: SubscriptionFilter
    endpoint: object = None  # callable(dict) or None for pull-style queues
    queue: list = field(default_factory=list)
    delivered_keys: set = field(default_factory=set)


@dataclass
class KpiReport:
    ran_slice_id: str
    start_tick: int
    end_tick: int
    per_scope: dict  # scopeKey -> stats dict
    totals: dict
    kpi_verdicts: list
    planned_load_deviation: list

    def to_dict(self) -> dict:
        return {
            "ranSliceId": self.ran_slice_id,
            "window": {"startTick": self.start_tick, "endTick": self.end_tick},
            "perScope": self.per_scope,
            "totals": self.totals,
            "kpiVerdicts": list(self.kpi_verdicts),
            "plannedLoadDeviation": list(self.planned_load_deviation),
        }


class PmFmService:
    """Single ingestion writer, concurrent report readers."""

    def __init__(self, store):
        self.store = store  # model store, for target KPIs / planned load
        self.last_tick = -1
        # Aggregate-level samples: one row per (tick, cell, cellSlice, scope).
        self.samples: list[dict] = []
        # Flow-level samples used for planned-load deviation.
        self.flow_samples: list[dict] = []
        self.notifications: list[dict] = []
        self.subscriptions: dict[str, Subscription] = {}
        self._sub_seq = itertools.count(1)
        self._lock = threading.Lock()

    # --- ingestion -----------------------------------------------------------

    def ingest_tick_results(self, tick: int, result: TickResult) -> None:
        with self._lock:
            if tick != self.last_tick + 1:
                raise OutOfOrderTick(tick, self.last_tick)
            for cell in result.cells:
                for agg in cell.allocation.aggregates:
                    self.samples.append(
                        {
                            "tick": tick,
                            "cellId": cell.cell_id,
                            "cellSliceId": agg.cell_slice_id,
                            "ranSliceId": cell.slice_owner.get(agg.cell_slice_id, ""),
                            "scopeKey": agg.scope_key,
                            "offered": agg.offered,
                            "served": agg.served,
                            "blocked": agg.blocked,
                            "guaranteedTarget": agg.guaranteed_target,
                        }
                    )
                for (cs_id, ft), served in sorted(
                    cell.flow_served.items(), key=lambda kv: (kv[0][0], kv[0][1])
                ):
                    self.flow_samples.append(
                        {
                            "tick": tick,
                            "cellId": cell.cell_id,
                            "cellSliceId": cs_id,
                            "ranSliceId": cell.slice_owner.get(cs_id, ""),
                            "flowKey": ft.key(),
                            "offered": cell.flow_offered.get((cs_id, ft), 0.0),
                            "served": served,
                        }
                    )
            self.last_tick = tick
            for notification in result.notifications:
                self.dispatch(notification)

    def dispatch(self, notification: Notification) -> None:
        """Record and deliver a notification to every matching subscription."""
        record = notification.to_dict()
        self.notifications.append(record)
        key = tuple(sorted(record.items(), key=lambda kv: kv[0]))
        dedup = repr(key)
        for sub in self.subscriptions.values():
            if not sub.filter.matches(notification):
                continue
            if dedup in sub.delivered_keys:
                continue
            sub.queue.append(record)
            sub.delivered_keys.add(dedup)
            if sub.endpoint is not None:
                sub.endpoint(record)

    # --- subscriptions ----------------------------------------------------------

    def subscribe(self, filter: SubscriptionFilter, endpoint=None) -> str:
        if filter.ran_slice_ids is None and filter.kinds is None:
            # "all" is expressed explicitly to avoid accidental firehoses
            filter = SubscriptionFilter(ran_slice_ids=None, kinds=None)
        if filter.ran_slice_ids is not None and not filter.ran_slice_ids:
            raise InvariantViolation(["subscription filter must not be empty"])
        sub_id = f"sub-{next(self._sub_seq)}"
        self.subscriptions[sub_id] = Subscription(sub_id, filter, endpoint)
        return sub_id

    def unsubscribe(self, subscription_id: str) -> None:
        if subscription_id not in self.subscriptions:
            raise UnknownSubscription(subscription_id)
        del self.subscriptions[subscription_id]

    def drain(self, subscription_id: str) -> list[dict]:
        sub = self.subscriptions.get(subscription_id)
        if sub is None:
            raise UnknownSubscription(subscription_id)
        out, sub.queue = sub.queue, []
        return out

    # --- reporting ----------------------------------------------------------------

    def compute_kpi_report(self, ran_slice_id: str, start_tick: int, end_tick: int) -> KpiReport:
        """KPIs over [start_tick, end_tick], both inclusive."""
        if end_tick > self.last_tick or start_tick < 0 or start_tick > end_tick:
            raise WindowIncomplete(start_tick, end_tick)
        rows = [
            s
            for s in self.samples
            if s["ranSliceId"] == ran_slice_id and start_tick <= s["tick"] <= end_tick
        ]
        if not rows:
            raise UnknownSlice(ran_slice_id)
        ticks_present = {s["tick"] for s in rows}
        if ticks_present != set(range(start_tick, end_tick + 1)):
            raise WindowIncomplete(start_tick, end_tick)

        per_scope: dict[str, dict] = {}
        for scope_key in sorted({s["scopeKey"] for s in rows}):
            scope_rows = [s for s in rows if s["scopeKey"] == scope_key]
            per_scope[scope_key] = self._stats(scope_rows, start_tick, end_tick)
        totals = self._stats(rows, start_tick, end_tick)

        rs = self.store.resolve_ran_slice(ran_slice_id)
        verdicts = []
        planned_dev = []
        if rs is not None:
            for kpi in rs.attrs.target_kpis:
                value = totals.get(kpi.kpi_name)
                effective = 0.0 if value is None else value
                ok = effective >= kpi.threshold if kpi.direction == "gte" \
                    else effective <= kpi.threshold
                verdicts.append(
                    {
                        "kpiName": kpi.kpi_name,
                        "threshold": kpi.threshold,
                        "direction": kpi.direction,
                        "value": value,
                        "verdict": VERDICT_MET if ok else VERDICT_VIOLATED,
                    }
                )
            for item in rs.attrs.planned_load:
                flow_keys = {ft.key() for ft in item.flow_types}
                flow_rows = [
                    s
                    for s in self.flow_samples
                    if s["ranSliceId"] == ran_slice_id
                    and start_tick <= s["tick"] <= end_tick
                    and s["flowKey"] in flow_keys
                ]
                n_ticks = end_tick - start_tick + 1
                avg_served = sum(s["served"] for s in flow_rows) / n_ticks
                deviation = (
                    (avg_served - item.expected_mbps) / item.expected_mbps
                    if item.expected_mbps > 0
                    else None
                )
                planned_dev.append(
                    {
                        "flowTypes": [ft.to_dict() for ft in item.flow_types],
                        "expectedMbps": item.expected_mbps,
                        "avgServedMbps": avg_served,
                        "deviation": deviation,
                    }
                )

        return KpiReport(
            ran_slice_id=ran_slice_id,
            start_tick=start_tick,
            end_tick=end_tick,
            per_scope=per_scope,
            totals=totals,
            kpi_verdicts=verdicts,
            planned_load_deviation=planned_dev,
        )

    @staticmethod
    def _stats(rows: list[dict], start_tick: int, end_tick: int) -> dict:
        per_tick_served: dict[int, float] = {}
        per_tick_offered: dict[int, float] = {}
        total_blocked = 0.0
        for s in rows:
            per_tick_served[s["tick"]] = per_tick_served.get(s["tick"], 0.0) + s["served"]
            per_tick_offered[s["tick"]] = per_tick_offered.get(s["tick"], 0.0) + s["offered"]
            total_blocked += s["blocked"]
        n_ticks = end_tick - start_tick + 1
        served_series = [per_tick_served.get(t, 0.0) for t in range(start_tick, end_tick + 1)]
        offered_series = [per_tick_offered.get(t, 0.0) for t in range(start_tick, end_tick + 1)]
        total_offered = sum(offered_series)
        return {
            "avgRateNonGbr": sum(served_series) / n_ticks,
            "minRateNonGbr": min(served_series),
            "avgOfferedMbps": total_offered / n_ticks,
            # 0/0 convention: with no offered load the ratio is undefined.
            "blockedLoadRatio": (total_blocked / total_offered) if total_offered > 0 else None,
        }
