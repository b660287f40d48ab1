"""Independent oracles used to cross-check the allocation engine.

Deliberately implemented with different math than the production code:
the closed-form oracle derives each share analytically in one step, and
the exhaustive oracle searches the integer lattice of feasible allocations
with dynamic programming. Neither shares code with the implementation.
"""

from __future__ import annotations

TOL = 1e-9


def oracle_allocate(demands, guarantees, maximums, capacity):
    """Closed-form allocation: floors scaled by lambda, spare split by mu.

    demands, guarantees, maximums are parallel lists; maximums may contain
    None (no cap). Returns the list of served values.
    """
    n = len(demands)
    caps = [
        demands[i] if maximums[i] is None else min(demands[i], maximums[i] * capacity)
        for i in range(n)
    ]
    floors = [min(caps[i], guarantees[i] * capacity) for i in range(n)]
    total_floor = sum(floors)
    lam = 1.0 if total_floor <= capacity or total_floor == 0 else capacity / total_floor
    floors = [f * lam for f in floors]

    spare = capacity - sum(floors)
    residual = [caps[i] - floors[i] for i in range(n)]
    total_residual = sum(residual)
    if spare <= 0 or total_residual <= 0:
        mu = 0.0
    else:
        mu = min(1.0, spare / total_residual)
    return [floors[i] + mu * residual[i] for i in range(n)]


def exhaustive_max_served(caps, capacity):
    """Largest feasible integer total served: sum x_i, 0 <= x_i <= cap_i,
    sum <= capacity. Exhaustive DP over the reachable-sum lattice."""
    reachable = {0}
    for cap in caps:
        reachable = {
            s + x for s in reachable for x in range(int(cap) + 1) if s + x <= capacity
        }
    return max(reachable)


def brute_kpi_stats(samples, ran_slice_id, start_tick, end_tick):
    """Recompute a KPI-report totals block directly from raw samples."""
    rows = [
        s
        for s in samples
        if s["ranSliceId"] == ran_slice_id and start_tick <= s["tick"] <= end_tick
    ]
    n_ticks = end_tick - start_tick + 1
    per_tick_served = {t: 0.0 for t in range(start_tick, end_tick + 1)}
    per_tick_offered = {t: 0.0 for t in range(start_tick, end_tick + 1)}
    blocked = 0.0
    for s in rows:
        per_tick_served[s["tick"]] += s["served"]
        per_tick_offered[s["tick"]] += s["offered"]
        blocked += s["blocked"]
    served = [per_tick_served[t] for t in range(start_tick, end_tick + 1)]
    offered_total = sum(per_tick_offered.values())
    return {
        "avgRateNonGbr": sum(served) / n_ticks,
        "minRateNonGbr": min(served),
        "avgOfferedMbps": offered_total / n_ticks,
        "blockedLoadRatio": (blocked / offered_total) if offered_total > 0 else None,
    }
