"""Assembles the management plane (model, MANO, LCM, simulation, PM/FM).

One Runtime is the unit both the scenario runner and the HTTP API operate
on. All mutations funnel through the serialized store/LCM writers; the
simulation reads an immutable model snapshot per tick.
"""

from __future__ import annotations

from ranslicing.enforcement.simulator import (
    KIND_CELL_FAULT,
    KIND_CELL_FAULT_CLEARED,
    Notification,
    OfferedLoadProfile,
    SimConfig,
    Simulation,
)
from ranslicing.errors import ScenarioValidationError
from ranslicing.infra.manager import Infrastructure
from ranslicing.lifecycle.manager import LcmManager
from ranslicing.nrm.store import ModelStore
from ranslicing.nrm.types import (
    GnbFunctionAttrs,
    ManagedElementAttrs,
    NrCellAttrs,
    PlmnCellEntry,
    SubnetworkAttrs,
)
from ranslicing.nrm import serialize
from ranslicing.northbound.scenario import Scenario
from ranslicing.pmfm.service import PmFmService


class Runtime:
    def __init__(self, scenario: Scenario | None = None):
        if scenario is None:
            self.config = SimConfig()
            self.store = ModelStore()
            self.infra = Infrastructure([], [], [])
            self.subnetwork_ref = self.store.create_object(
                None, "Subnetwork", SubnetworkAttrs(subnetwork_id="SN#1")
            )
            self.profile = OfferedLoadProfile([])
            self.scenario = None
        else:
            self.scenario = scenario
            self.config = scenario.sim_config
            self.store = ModelStore()
            self.infra = Infrastructure(scenario.pops, scenario.rrhs, scenario.nsds)
            self.subnetwork_ref = self._build_model(scenario)
            self.profile = OfferedLoadProfile(scenario.load_traces)

        self.pmfm = PmFmService(self.store)
        self.lcm = LcmManager(
            self.store,
            self.infra,
            self.subnetwork_ref,
            rst_catalog=scenario.rst_catalog if scenario else ("eMBB", "URLLC", "mMTC"),
            area_map=scenario.area_tags if scenario else None,
            notify=self.pmfm.dispatch,
        )
        if scenario:
            for template in scenario.templates:
                self.lcm.add_template(template)
            for op in scenario.initial_operations:
                self.apply_lcm_operation(op)
        self.sim = Simulation(self.store, self.profile, self.config)

    def _build_model(self, scenario: Scenario) -> str:
        sub_ref = self.store.create_object(
            None, "Subnetwork", SubnetworkAttrs(subnetwork_id=scenario.subnetwork_id)
        )
        fn_refs: dict[str, str] = {}
        for me in scenario.managed_elements:
            me_ref = self.store.create_object(
                sub_ref,
                "ManagedElement",
                ManagedElementAttrs(element_id=me["elementId"], vendor=me.get("vendor", "")),
            )
            for fn in me.get("gnbFunctions", []):
                fn_refs[fn["functionId"]] = self.store.create_object(
                    me_ref,
                    "GnbFunction",
                    GnbFunctionAttrs(
                        function_id=fn["functionId"],
                        kind=fn["kind"],
                        cu_ref=fn.get("cuRef"),
                    ),
                )
        for inst in scenario.ns_instances:
            self.infra.instantiate_ns(
                inst["nsdId"],
                placement_hints=inst.get("placementHints"),
                ns_instance_id=inst["nsInstanceId"],
            )
        for cell in scenario.cells:
            self.infra.bind_cell_resources(
                cell["cellId"],
                cell["nsInstanceId"],
                cell["rrhId"],
                cell["band"],
                float(cell["channelBandwidthMHz"]),
                serving_vnf_id=cell.get("servingVnfId"),
            )
            self.store.create_object(
                fn_refs[cell["gnbFunctionId"]],
                "NrCell",
                NrCellAttrs(
                    cell_id=cell["cellId"],
                    band=cell["band"],
                    channel_bandwidth_mhz=float(cell["channelBandwidthMHz"]),
                    tx_power_dbm=float(cell.get("txPowerDbm", 0.0)),
                    plmn_list=tuple(
                        PlmnCellEntry.from_dict(p) for p in cell.get("plmnList", [])
                    ),
                    nsd_ref=next(
                        i["nsdId"] for i in scenario.ns_instances
                        if i["nsInstanceId"] == cell["nsInstanceId"]
                    ),
                    sector_equipment_refs=(cell["rrhId"],),
                ),
            )
        return sub_ref

    # --- operations shared by runner, API and CLI -----------------------------

    def apply_lcm_operation(self, op: dict):
        from ranslicing.nrm.types import AuthorisedLoad, NetworkId

        kind = op["op"]
        if kind == "createRsi":
            al_override = (
                AuthorisedLoad.from_dict(op["alOverride"])
                if op.get("alOverride") is not None
                else None
            )
            per_cell = {
                cell_id: AuthorisedLoad.from_dict(entries)
                for cell_id, entries in (op.get("perCellAl") or {}).items()
            } or None
            return self.lcm.create_rsi(
                op["templateId"],
                tuple(NetworkId.from_dict(n) for n in op["networkIds"]),
                al_override=al_override,
                per_cell_al=per_cell,
                force=bool(op.get("force", False)),
                ran_slice_id=op.get("ranSliceId"),
            )
        if kind == "modifyRsi":
            return self.lcm.modify_rsi(
                op["ranSliceId"], op.get("delta", {}), force=bool(op.get("force", False))
            )
        if kind == "scaleRsiCapacity":
            return self.lcm.scale_rsi_capacity(op["ranSliceId"], op["plan"])
        if kind == "terminateRsi":
            return self.lcm.terminate_rsi(
                op["ranSliceId"],
                release_dedicated_resources=bool(op.get("releaseDedicatedResources", False)),
            )
        raise ScenarioValidationError([f"unknown lcm op {kind!r}"])

    def degrade_cell(self, cell_id: str, factor: float) -> None:
        self.sim.set_degradation(cell_id, factor)
        self.pmfm.dispatch(
            Notification(
                kind=KIND_CELL_FAULT,
                tick=self.sim.tick,
                level="infrastructure",
                event="raise",
                cell_id=cell_id,
                details=(("factor", factor),),
            )
        )

    def restore_cell(self, cell_id: str) -> None:
        self.sim.clear_degradation(cell_id)
        self.pmfm.dispatch(
            Notification(
                kind=KIND_CELL_FAULT_CLEARED,
                tick=self.sim.tick,
                level="infrastructure",
                event="clear",
                cell_id=cell_id,
            )
        )

    def step(self):
        """Advance one tick and ingest the results into PM/FM."""
        result = self.sim.advance_tick()
        self.pmfm.ingest_tick_results(result.tick, result)
        return result

    def export_model(self) -> dict:
        return serialize.export_model(self.store, self.subnetwork_ref)

    def export_model_json(self) -> str:
        return serialize.export_model_json(self.store, self.subnetwork_ref)
