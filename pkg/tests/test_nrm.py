"""Model store: containment, versioning, audit replay, validation rules."""

from __future__ import annotations

import copy

import pytest

from ranslicing.errors import (
    IllegalContainment,
    InvariantViolation,
    StaleVersion,
    UnknownObject,
    UnknownParent,
)
from ranslicing.nrm.store import ModelStore
from ranslicing.nrm.types import (
    AuthorisedLoad,
    AuthorisedLoadEntry,
    CellSliceAttrs,
    GnbFunctionAttrs,
    ManagedElementAttrs,
    NrCellAttrs,
    QosFlowType,
    RanSliceAttrs,
    SubnetworkAttrs,
)
from ranslicing.nrm.validation import validate_store

from conftest import NETWORK_A, PLMN_A, small_store


def entry(guaranteed, five_qi=9, arp=8, control="Disabled"):
    return AuthorisedLoadEntry(
        flow_types=(QosFlowType(five_qi=five_qi, arp=arp),),
        guaranteed=guaranteed,
        maximum=None,
        averaging_window_s=10.0,
        notification_control=control,
    )


class TestContainment:
    def test_basic_tree_creation(self):
        store, sub, cells = small_store()
        assert store.get(cells[0]).kind == "NrCell"
        assert store.get(cells[0]).parent_ref.endswith("GNB-T")

    def test_cell_under_subnetwork_rejected(self):
        store, sub, _ = small_store()
        with pytest.raises(IllegalContainment):
            store.create_object(sub, "NrCell", NrCellAttrs(
                cell_id="X", band="B42", channel_bandwidth_mhz=20.0))

    def test_unknown_parent_rejected(self):
        store, _, _ = small_store()
        with pytest.raises(UnknownParent):
            store.create_object("nope", "ManagedElement",
                                ManagedElementAttrs(element_id="Y"))

    def test_duplicate_sibling_id_rejected(self):
        store, sub, _ = small_store()
        with pytest.raises(InvariantViolation):
            store.create_object(sub, "ManagedElement",
                                ManagedElementAttrs(element_id="ME-T"))

    def test_delete_removes_subtree(self):
        store, sub, cells = small_store()
        cs = store.create_object(cells[0], "CellSlice", CellSliceAttrs(
            cell_slice_id="CS1", rst="eMBB", network_ids=(NETWORK_A,)))
        me_ref = store.get(cells[0]).parent_ref  # the function
        store.delete_object(me_ref)
        assert not store.exists(cells[0])
        assert not store.exists(cs)

    def test_failed_create_leaves_store_untouched(self):
        store, sub, cells = small_store()
        version = store.version
        with pytest.raises(InvariantViolation):
            # bandwidth below the 5 MHz minimum trips validation
            store.create_object(
                store.get(cells[0]).parent_ref, "NrCell",
                NrCellAttrs(cell_id="Tiny", band="B42", channel_bandwidth_mhz=1.0),
            )
        assert store.version == version
        assert store.resolve_cell("Tiny") is None


class TestVersioning:
    def test_object_version_bumps_on_update(self):
        store, _, cells = small_store()
        assert store.get(cells[0]).version == 1
        store.update_object(cells[0], {"tx_power_dbm": 40.0})
        assert store.get(cells[0]).version == 2

    def test_stale_version_rejected(self):
        store, _, cells = small_store()
        store.update_object(cells[0], {"tx_power_dbm": 40.0}, expected_version=1)
        with pytest.raises(StaleVersion):
            store.update_object(cells[0], {"tx_power_dbm": 41.0}, expected_version=1)

    def test_id_field_not_writable(self):
        store, _, cells = small_store()
        with pytest.raises(InvariantViolation):
            store.update_object(cells[0], {"cell_id": "Other"})

    def test_unknown_attribute_rejected(self):
        store, _, cells = small_store()
        with pytest.raises(InvariantViolation):
            store.update_object(cells[0], {"no_such_field": 1})

    def test_model_version_monotonic(self):
        store, _, cells = small_store()
        before = store.version
        store.update_object(cells[0], {"barred": True})
        store.update_object(cells[0], {"barred": False})
        assert store.version == before + 2


class TestAuditReplay:
    def test_replay_rebuilds_identical_tree(self):
        store, sub, cells = small_store()
        store.create_object(cells[0], "CellSlice", CellSliceAttrs(
            cell_slice_id="CS1", rst="eMBB", network_ids=(NETWORK_A,),
            authorised_load=AuthorisedLoad((entry(0.5),))))
        store.create_object(sub, "RanSlice", RanSliceAttrs(
            ran_slice_id="RSI-X", cell_slice_refs=(("Cell-1", "CS1"),),
            network_ids=(NETWORK_A,)))
        store.update_object(cells[1], {"barred": True})
        store.delete_object(cells[1])

        from ranslicing.nrm.serialize import export_model
        rebuilt = ModelStore.replay(store.audit_log)
        assert export_model(rebuilt, sub) == export_model(store, sub)

    def test_checkpoint_restore_roundtrip(self):
        store, sub, cells = small_store()
        cp = store.checkpoint()
        store.update_object(cells[0], {"barred": True})
        store.delete_object(cells[1])
        store.restore(cp)
        assert store.get(cells[0]).attrs.barred is False
        assert store.exists(cells[1])
        assert store.version == cp.version

    def test_snapshot_is_frozen(self):
        store, _, cells = small_store()
        snap = store.snapshot()
        with pytest.raises(InvariantViolation):
            snap.update_object(cells[0], {"barred": True})

    def test_snapshot_isolated_from_later_writes(self):
        store, _, cells = small_store()
        snap = store.snapshot()
        store.update_object(cells[0], {"barred": True})
        assert snap.get(cells[0]).attrs.barred is False


class TestValidationRules:
    def test_overguarantee_same_flow_type_blocked(self):
        store, _, cells = small_store()
        store.create_object(cells[0], "CellSlice", CellSliceAttrs(
            cell_slice_id="CS1", rst="eMBB", network_ids=(NETWORK_A,),
            authorised_load=AuthorisedLoad((entry(0.7),))))
        with pytest.raises(InvariantViolation) as err:
            store.create_object(cells[0], "CellSlice", CellSliceAttrs(
                cell_slice_id="CS2", rst="eMBB", network_ids=(NETWORK_A,),
                authorised_load=AuthorisedLoad((entry(0.4),))))
        assert any("CELL-OVERGUARANTEE" in str(v) for v in err.value.violations)

    def test_overguarantee_allowed_with_oversubscribed_marker(self):
        store, _, cells = small_store()
        store.update_object(cells[0], {"oversubscribed": True})
        store.create_object(cells[0], "CellSlice", CellSliceAttrs(
            cell_slice_id="CS1", rst="eMBB", network_ids=(NETWORK_A,),
            authorised_load=AuthorisedLoad((entry(0.7),))))
        store.create_object(cells[0], "CellSlice", CellSliceAttrs(
            cell_slice_id="CS2", rst="eMBB", network_ids=(NETWORK_A,),
            authorised_load=AuthorisedLoad((entry(0.4),))))
        infos = [v for v in validate_store(store) if v.rule_id == "CELL-OVERGUARANTEE-FORCED"]
        assert infos and all(v.severity == "info" for v in infos)

    def test_different_flow_types_do_not_sum(self):
        store, _, cells = small_store()
        store.create_object(cells[0], "CellSlice", CellSliceAttrs(
            cell_slice_id="CS1", rst="eMBB", network_ids=(NETWORK_A,),
            authorised_load=AuthorisedLoad((entry(0.7, five_qi=9),))))
        store.create_object(cells[0], "CellSlice", CellSliceAttrs(
            cell_slice_id="CS2", rst="eMBB", network_ids=(NETWORK_A,),
            authorised_load=AuthorisedLoad((entry(0.7, five_qi=8),))))

    def test_orphan_cell_slice_is_warning_not_error(self):
        store, _, cells = small_store()
        store.create_object(cells[0], "CellSlice", CellSliceAttrs(
            cell_slice_id="CS1", rst="eMBB", network_ids=(NETWORK_A,)))
        warnings = [v for v in validate_store(store) if v.rule_id == "CELLSLICE-ORPHAN"]
        assert warnings and warnings[0].severity == "warning"

    def test_dangling_ran_slice_ref_blocked(self):
        store, sub, _ = small_store()
        with pytest.raises(InvariantViolation) as err:
            store.create_object(sub, "RanSlice", RanSliceAttrs(
                ran_slice_id="RSI-X", cell_slice_refs=(("Cell-1", "CS-MISSING"),),
                network_ids=(NETWORK_A,)))
        assert any("RANSLICE-REF-DANGLING" in str(v) for v in err.value.violations)

    def test_du_without_cu_ref_blocked(self):
        store, sub, _ = small_store()
        me = store.find_by_id("ManagedElement", "ME-T")
        with pytest.raises(InvariantViolation):
            store.create_object(me.ref, "GnbFunction", GnbFunctionAttrs(
                function_id="DU-X", kind="gNB-DU", cu_ref=None))

    def test_multi_owner_cell_slice_blocked(self):
        store, sub, cells = small_store()
        store.create_object(cells[0], "CellSlice", CellSliceAttrs(
            cell_slice_id="CS1", rst="eMBB", network_ids=(NETWORK_A,)))
        store.create_object(sub, "RanSlice", RanSliceAttrs(
            ran_slice_id="RSI-1", cell_slice_refs=(("Cell-1", "CS1"),),
            network_ids=(NETWORK_A,)))
        with pytest.raises(InvariantViolation) as err:
            store.create_object(sub, "RanSlice", RanSliceAttrs(
                ran_slice_id="RSI-2", cell_slice_refs=(("Cell-1", "CS1"),),
                network_ids=(NETWORK_A,)))
        assert any("CELLSLICE-MULTI-OWNER" in str(v) for v in err.value.violations)


class TestResolvers:
    def test_resolve_cell_and_slice(self):
        store, _, cells = small_store()
        store.create_object(cells[0], "CellSlice", CellSliceAttrs(
            cell_slice_id="CS1", rst="eMBB", network_ids=(NETWORK_A,)))
        assert store.resolve_cell("Cell-1").ref == cells[0]
        assert store.resolve_cell_slice("Cell-1", "CS1") is not None
        assert store.resolve_cell_slice("Cell-1", "CS9") is None
        assert store.resolve_cell("Cell-9") is None

    def test_get_unknown_object(self):
        store, _, _ = small_store()
        with pytest.raises(UnknownObject):
            store.get("missing")

    def test_model_tree_depth(self):
        store, sub, _ = small_store()
        root_only = store.get_model_tree(sub, depth=0)
        assert "children" not in root_only
        full = store.get_model_tree(sub)
        me = full["children"][0]
        assert me["kind"] == "ManagedElement"
        assert me["children"][0]["children"][0]["kind"] == "NrCell"
