"""Tick simulation: traces, windows, compliance notifications, degradation."""

from __future__ import annotations

import pytest

from ranslicing.enforcement.simulator import (
    KIND_GUARANTEE_CLEARED,
    KIND_GUARANTEE_VIOLATION,
    KIND_MAXIMUM_CLEARED,
    KIND_MAXIMUM_EXCEEDED,
    LoadTrace,
    OfferedLoadProfile,
    SimConfig,
    Simulation,
    window_ticks,
)
from ranslicing.errors import InvariantViolation, ProfileExhausted
from ranslicing.nrm.types import (
    AuthorisedLoad,
    AuthorisedLoadEntry,
    CellSliceAttrs,
    QosFlowType,
    RanSliceAttrs,
)

from conftest import NETWORK_A, al_entry, small_store

FT9 = QosFlowType(five_qi=9, arp=8)
FT5 = QosFlowType(five_qi=5, arp=2)


def trace(cell, cs, ft, points, end=100):
    return LoadTrace.from_dict({
        "cellId": cell, "cellSliceId": cs,
        "flowType": ft.to_dict(),
        "points": [{"tick": t, "offeredMbps": v} for t, v in points],
        "endTick": end,
    })


def entry(guaranteed, maximum=None, window=5.0, control="Enabled", ft=FT9):
    return AuthorisedLoadEntry(
        flow_types=(ft,), guaranteed=guaranteed, maximum=maximum,
        averaging_window_s=window, notification_control=control,
    )


def build_sim(entries_cs1, traces, entries_cs2=None, slice_al=(), n_cells=1,
              config=None):
    """One 20 MHz cell (100 Mbps at 5 bps/Hz), 1-2 cell slices, one RAN slice."""
    store, sub, cells = small_store(n_cells=n_cells)
    store.create_object(cells[0], "CellSlice", CellSliceAttrs(
        cell_slice_id="CS1", rst="eMBB", network_ids=(NETWORK_A,),
        authorised_load=AuthorisedLoad(tuple(entries_cs1))))
    refs = [("Cell-1", "CS1")]
    if entries_cs2 is not None:
        store.create_object(cells[0], "CellSlice", CellSliceAttrs(
            cell_slice_id="CS2", rst="eMBB", network_ids=(NETWORK_A,),
            authorised_load=AuthorisedLoad(tuple(entries_cs2))))
        refs.append(("Cell-1", "CS2"))
    store.create_object(sub, "RanSlice", RanSliceAttrs(
        ran_slice_id="RSI-T", cell_slice_refs=tuple(refs),
        network_ids=(NETWORK_A,),
        authorised_load=AuthorisedLoad(tuple(slice_al))))
    profile = OfferedLoadProfile(traces)
    return Simulation(store, profile, config or SimConfig())


class TestLoadTrace:
    def test_step_function_semantics(self):
        t = trace("c", "s", FT9, [(0, 10), (5, 20)], end=10)
        assert t.value_at(0) == 10
        assert t.value_at(4) == 10
        assert t.value_at(5) == 20
        assert t.value_at(9) == 20

    def test_zero_before_first_point(self):
        t = trace("c", "s", FT9, [(3, 10)], end=10)
        assert t.value_at(0) == 0.0

    def test_exhaustion_at_end_tick(self):
        t = trace("c", "s", FT9, [(0, 10)], end=5)
        with pytest.raises(ProfileExhausted):
            t.value_at(5)

    def test_invalid_traces_rejected(self):
        with pytest.raises(InvariantViolation):
            OfferedLoadProfile([trace("c", "s", FT9, [(5, 10), (3, 2)], end=10)])
        with pytest.raises(InvariantViolation):
            OfferedLoadProfile([trace("c", "s", FT9, [(0, -1)], end=10)])

    def test_horizon_is_min_end_tick(self):
        p = OfferedLoadProfile([
            trace("c", "s", FT9, [(0, 1)], end=10),
            trace("c", "s2", FT9, [(0, 1)], end=7),
        ])
        assert p.horizon == 7


class TestWindowTicks:
    def test_exact_multiple(self):
        assert window_ticks(10.0, 1.0) == 10
        assert window_ticks(5.0, 2.5) == 2

    def test_non_multiple_rejected(self):
        with pytest.raises(InvariantViolation):
            window_ticks(10.0, 3.0)


class TestAllocationInSim:
    def test_unrestricted_slice_uses_full_cell(self):
        sim = build_sim([], [trace("Cell-1", "CS1", FT9, [(0, 250)])])
        result = sim.advance_tick()
        cell = result.cells[0]
        assert cell.capacity_mbps == pytest.approx(100.0)
        assert cell.allocation.total_served == pytest.approx(100.0)

    def test_uncovered_flows_get_default_scope(self):
        sim = build_sim(
            [entry(0.5)],
            [trace("Cell-1", "CS1", FT9, [(0, 30)]),
             trace("Cell-1", "CS1", FT5, [(0, 10)])],
        )
        cell = sim.advance_tick().cells[0]
        scopes = {a.scope_key for a in cell.allocation.aggregates}
        assert "default" in scopes
        assert cell.allocation.served_of("CS1", "default") == pytest.approx(10.0)

    def test_flow_served_apportioned_by_offered(self):
        # two flows in one scope: served split proportional to offered
        e = AuthorisedLoadEntry(flow_types=(FT9, FT5), guaranteed=0.5, maximum=0.5,
                                averaging_window_s=5.0)
        sim = build_sim(
            [e],
            [trace("Cell-1", "CS1", FT9, [(0, 60)]),
             trace("Cell-1", "CS1", FT5, [(0, 40)])],
        )
        cell = sim.advance_tick().cells[0]
        assert cell.flow_served[("CS1", FT9)] == pytest.approx(30.0)
        assert cell.flow_served[("CS1", FT5)] == pytest.approx(20.0)


class TestCellCompliance:
    def test_raise_after_window_fills_and_clear_after_restore(self):
        sim = build_sim(
            [entry(0.6, window=5.0)],
            [trace("Cell-1", "CS1", FT9, [(0, 80)])],
            entries_cs2=[entry(0.4, window=5.0, ft=FT5)],
        )
        # saturate both slices so CS1 sits exactly at its 60% floor
        sim.profile.traces.append(trace("Cell-1", "CS2", FT5, [(0, 80)]))
        raises, clears = [], []
        sim.set_degradation("Cell-1", 0.5)
        for _ in range(12):
            result = sim.advance_tick()
            for n in result.notifications:
                (raises if n.event == "raise" else clears).append(n)
        assert [n.kind for n in raises[:1]] == [KIND_GUARANTEE_VIOLATION]
        assert raises[0].tick == 4  # first full window
        assert len([n for n in raises if n.cell_slice_id == "CS1"]) == 1  # dedup
        sim.clear_degradation("Cell-1")
        cleared = []
        for _ in range(10):
            cleared += [n for n in sim.advance_tick().notifications if n.event == "clear"]
        assert any(n.kind == KIND_GUARANTEE_CLEARED and n.cell_slice_id == "CS1"
                   for n in cleared)

    def test_disabled_notification_control_stays_silent(self):
        sim = build_sim(
            [entry(0.6, window=5.0, control="Disabled")],
            [trace("Cell-1", "CS1", FT9, [(0, 80)])],
            entries_cs2=[entry(0.4, window=5.0, control="Disabled", ft=FT5)],
        )
        sim.profile.traces.append(trace("Cell-1", "CS2", FT5, [(0, 80)]))
        sim.set_degradation("Cell-1", 0.5)
        for _ in range(12):
            assert sim.advance_tick().notifications == []

    def test_no_violation_when_demand_below_guarantee(self):
        sim = build_sim([entry(0.6, window=5.0)],
                        [trace("Cell-1", "CS1", FT9, [(0, 10)])])
        sim.set_degradation("Cell-1", 0.5)  # 50 Mbps still covers 10
        for _ in range(12):
            assert sim.advance_tick().notifications == []

    def test_degradation_factor_bounds(self):
        sim = build_sim([], [trace("Cell-1", "CS1", FT9, [(0, 10)])])
        with pytest.raises(InvariantViolation):
            sim.set_degradation("Cell-1", 1.5)


class TestSliceLevelCompliance:
    def test_slice_guarantee_violation_and_clear(self):
        # slice-level guarantee of 80 Mbps across one 100 Mbps cell
        sim = build_sim(
            [entry(0.8, window=5.0, control="Disabled")],
            [trace("Cell-1", "CS1", FT9, [(0, 90)])],
            slice_al=[AuthorisedLoadEntry(
                flow_types=(FT9,), guaranteed=80.0, maximum=None,
                averaging_window_s=5.0, notification_control="Enabled")],
        )
        sim.set_degradation("Cell-1", 0.5)
        notifications = []
        for _ in range(6):
            notifications += sim.advance_tick().notifications
        slice_raises = [n for n in notifications
                        if n.level == "ranSlice" and n.kind == KIND_GUARANTEE_VIOLATION]
        assert len(slice_raises) == 1
        sim.clear_degradation("Cell-1")
        cleared = []
        for _ in range(10):
            cleared += sim.advance_tick().notifications
        assert any(n.kind == KIND_GUARANTEE_CLEARED and n.level == "ranSlice"
                   for n in cleared)

    def test_maximum_load_exceeded_and_cleared(self):
        sim = build_sim(
            [],
            [trace("Cell-1", "CS1", FT9, [(0, 90), (10, 10)])],
            slice_al=[AuthorisedLoadEntry(
                flow_types=(FT9,), guaranteed=None, maximum=50.0,
                averaging_window_s=5.0, notification_control="Enabled")],
        )
        events = []
        for _ in range(20):
            events += sim.advance_tick().notifications
        kinds = [n.kind for n in events]
        assert kinds.count(KIND_MAXIMUM_EXCEEDED) == 1
        assert kinds.count(KIND_MAXIMUM_CLEARED) == 1


class TestDeterminismAndExhaustion:
    def test_same_inputs_same_results(self):
        def run():
            sim = build_sim([entry(0.5)], [trace("Cell-1", "CS1", FT9, [(0, 80)])])
            out = []
            for _ in range(10):
                r = sim.advance_tick()
                out.append([c.to_dict() for c in r.cells])
            return out

        assert run() == run()

    def test_profile_exhaustion_raises(self):
        sim = build_sim([], [trace("Cell-1", "CS1", FT9, [(0, 10)], end=3)])
        for _ in range(3):
            sim.advance_tick()
        with pytest.raises(ProfileExhausted):
            sim.advance_tick()

    def test_cells_processed_in_sorted_order(self):
        store, sub, cells = small_store(n_cells=3)
        for ref in cells:
            store.create_object(ref, "CellSlice", CellSliceAttrs(
                cell_slice_id="CS1", rst="eMBB", network_ids=(NETWORK_A,)))
        sim = Simulation(store, OfferedLoadProfile([]), SimConfig())
        result = sim.advance_tick()
        assert [c.cell_id for c in result.cells] == ["Cell-1", "Cell-2", "Cell-3"]
