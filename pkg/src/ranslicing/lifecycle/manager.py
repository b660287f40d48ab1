"""NM-level lifecycle management of RAN slice instances.

Template-driven creation, modification, capacity scale-out (a saga across
the MANO and the model store, compensated in reverse order on failure) and
termination. Operations run one at a time and are all-or-nothing: a failed
operation leaves the exported model byte-identical to the state before it.
"""

from __future__ import annotations

import itertools
import re
import threading
from collections import defaultdict
from dataclasses import dataclass, field

from ranslicing.errors import (
    CompensationFailed,
    GuaranteeInfeasible,
    InvariantViolation,
    RstUnknown,
    UnknownSlice,
    UnknownTemplate,
    UnservableCell,
)
from ranslicing.infra.manager import Infrastructure, ScaleStep
from ranslicing.infra.types import VirtualLink
from ranslicing.nrm.store import ModelStore
from ranslicing.nrm.types import (
    DEFAULT_RST_CATALOG,
    FEASIBILITY_EPS,
    AuthorisedLoad,
    CellSliceAttrs,
    GnbFunctionAttrs,
    NetworkId,
    NrCellAttrs,
    PlmnCellEntry,
    RanSliceAttrs,
)
from ranslicing.lifecycle.templates import RanSliceTemplate

OP_CREATE = "CREATE"
OP_MODIFY = "MODIFY"
OP_SCALE = "SCALE"
OP_TERMINATE = "TERMINATE"

STATUS_COMPLETED = "COMPLETED"
STATUS_FAILED = "FAILED"
STATUS_ROLLED_BACK = "ROLLED_BACK"
STATUS_PENDING_MANUAL = "PENDING_MANUAL"


@dataclass
class LcmOperationRecord:
    op_id: str
    kind: str
    target: str | None
    requested_version: int
    status: str = STATUS_COMPLETED
    resulting_version: int | None = None
    failure_reason: str | None = None
    step_log: list = field(default_factory=list)
    diff: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "opId": self.op_id,
            "kind": self.kind,
            "target": self.target,
            "requestedVersion": self.requested_version,
            "resultingVersion": self.resulting_version,
            "status": self.status,
            "failureReason": self.failure_reason,
            "stepLog": list(self.step_log),
            "diff": list(self.diff),
        }


def convert_al_to_fractions(al: AuthorisedLoad, cell_capacity_mbps: float) -> AuthorisedLoad:
    """Turn absolute-Mbps entries into fractions of the cell's capacity."""
    from dataclasses import replace

    entries = []
    for entry in al.entries:
        entries.append(
            replace(
                entry,
                guaranteed=None if entry.guaranteed is None
                else entry.guaranteed / cell_capacity_mbps,
                maximum=None if entry.maximum is None
                else entry.maximum / cell_capacity_mbps,
            )
        )
    return AuthorisedLoad(entries=tuple(entries))


class LcmManager:
    """Serialized lifecycle operations against one subnetwork."""

    def __init__(
        self,
        store: ModelStore,
        infra: Infrastructure,
        subnetwork_ref: str,
        rst_catalog=DEFAULT_RST_CATALOG,
        area_map: dict[str, list[str]] | None = None,
        notify=None,
    ):
        self.store = store
        self.infra = infra
        self.subnetwork_ref = subnetwork_ref
        self.rst_catalog = tuple(rst_catalog)
        self.area_map = dict(area_map or {})
        self.templates: dict[str, RanSliceTemplate] = {}
        self.records: list[LcmOperationRecord] = []
        self.notify = notify
        self._op_seq = itertools.count(1)
        self._lock = threading.Lock()
        # Test hook: called as fault_hook(step_name) after each saga step.
        self.fault_hook = None

    def add_template(self, template: RanSliceTemplate) -> None:
        if template.rst not in self.rst_catalog:
            raise RstUnknown(template.rst)
        problems = template.default_authorised_load.validate(fractional=True)
        if problems:
            raise InvariantViolation(problems)
        self.templates[template.template_id] = template

    # --- shared helpers ---------------------------------------------------------

    def _new_record(self, kind: str, target: str | None) -> LcmOperationRecord:
        return LcmOperationRecord(
            op_id=f"lcm-{next(self._op_seq)}",
            kind=kind,
            target=target,
            requested_version=self.store.version,
        )

    def _finish(self, record: LcmOperationRecord) -> LcmOperationRecord:
        record.resulting_version = self.store.version
        self.records.append(record)
        if self.notify is not None:
            from ranslicing.enforcement.simulator import KIND_LIFECYCLE_COMPLETED, Notification

            self.notify(
                Notification(
                    kind=KIND_LIFECYCLE_COMPLETED,
                    tick=-1,
                    level="lifecycle",
                    event="event",
                    ran_slice_id=record.target,
                    details=(
                        ("opId", record.op_id),
                        ("opKind", record.kind),
                        ("status", record.status),
                    ),
                )
            )
        return record

    def _fail(self, record: LcmOperationRecord, exc: Exception, rolled_back: bool = True):
        record.status = STATUS_ROLLED_BACK if rolled_back else STATUS_FAILED
        record.failure_reason = str(exc)
        record.resulting_version = self.store.version
        self.records.append(record)

    def _next_cell_slice_id(self, cell_ref: str) -> str:
        existing = {
            c.object_id
            for c in self.store.children_of(cell_ref)
            if c.kind == "CellSlice"
        }
        indices = [
            int(m.group(1))
            for m in (re.search(r"#(\d+)$", cid) for cid in existing)
            if m
        ]
        n = max(indices, default=0) + 1
        while f"CellSlice#{n}" in existing:
            n += 1
        return f"CellSlice#{n}"

    def _guarantee_excess(self, cell_ref: str, extra_al: AuthorisedLoad):
        """Largest per-flow-type overshoot if extra_al were added to the cell."""
        per_flow = defaultdict(float)
        for cs in self.store.children_of(cell_ref):
            if cs.kind != "CellSlice":
                continue
            for entry in cs.attrs.authorised_load.entries:
                if entry.guaranteed is None:
                    continue
                for ft in entry.flow_types:
                    per_flow[ft] += entry.guaranteed
        worst = None
        for entry in extra_al.entries:
            if entry.guaranteed is None:
                continue
            for ft in entry.flow_types:
                total = per_flow[ft] + entry.guaranteed
                if total > 1.0 + FEASIBILITY_EPS:
                    excess = total - 1.0
                    if worst is None or excess > worst[1]:
                        worst = (ft, excess)
        return worst

    def _check_feasibility(self, cell_ref: str, cell_id: str, al: AuthorisedLoad, force: bool):
        worst = self._guarantee_excess(cell_ref, al)
        if worst is None:
            return
        if not force:
            raise GuaranteeInfeasible(cell_id, [worst[0].key()], worst[1])
        if not self.store.get(cell_ref).attrs.oversubscribed:
            self.store.update_object(cell_ref, {"oversubscribed": True})

    def _ensure_cell_plmns(self, cell_ref: str, network_ids) -> None:
        cell = self.store.get(cell_ref)
        present = {p.plmn for p in cell.attrs.plmn_list}
        missing = sorted({n.plmn for n in network_ids} - present)
        if missing:
            new_list = cell.attrs.plmn_list + tuple(
                PlmnCellEntry(plmn=p, exposed_services=("PM", "FM")) for p in missing
            )
            self.store.update_object(cell_ref, {"plmn_list": new_list})

    # --- operations ----------------------------------------------------------------

    def create_rsi(
        self,
        template_id: str,
        network_ids,
        al_override: AuthorisedLoad | None = None,
        per_cell_al: dict[str, AuthorisedLoad] | None = None,
        force: bool = False,
        ran_slice_id: str | None = None,
    ):
        """Instantiate a RAN slice from a template; all-or-nothing."""
        with self._lock:
            record = self._new_record(OP_CREATE, ran_slice_id)
            template = self.templates.get(template_id)
            if template is None:
                exc = UnknownTemplate(template_id)
                self._fail(record, exc)
                raise exc
            try:
                if template.rst not in self.rst_catalog:
                    raise RstUnknown(template.rst)
                network_ids = tuple(network_ids)
                if not network_ids:
                    raise InvariantViolation(["networkIds must be non-empty"])
                cell_ids = template.resolve_coverage(self.area_map)
                if not cell_ids:
                    raise InvariantViolation(
                        [f"template {template_id} resolves to no cells"]
                    )
                cells = []
                for cell_id in cell_ids:
                    cell = self.store.resolve_cell(cell_id)
                    if cell is None or not self.infra.is_cell_servable(cell_id):
                        raise UnservableCell(cell_id)
                    cells.append(cell)
            except Exception as exc:
                self._fail(record, exc)
                raise

            slice_id = ran_slice_id or self._generate_slice_id()
            cp = self.store.checkpoint()
            try:
                refs = []
                for cell in cells:
                    al = (per_cell_al or {}).get(cell.object_id) or al_override \
                        or template.default_authorised_load
                    self._check_feasibility(cell.ref, cell.object_id, al, force)
                    self._ensure_cell_plmns(cell.ref, network_ids)
                    cs_id = self._next_cell_slice_id(cell.ref)
                    self.store.create_object(
                        cell.ref,
                        "CellSlice",
                        CellSliceAttrs(
                            cell_slice_id=cs_id,
                            rst=template.rst,
                            network_ids=network_ids,
                            authorised_load=al,
                        ),
                    )
                    refs.append((cell.object_id, cs_id))
                    record.step_log.append({"step": "createCellSlice",
                                            "cellId": cell.object_id, "cellSliceId": cs_id})
                self.store.create_object(
                    self.subnetwork_ref,
                    "RanSlice",
                    RanSliceAttrs(
                        ran_slice_id=slice_id,
                        cell_slice_refs=tuple(refs),
                        network_ids=network_ids,
                        planned_load=template.planned_load,
                        target_kpis=template.target_kpis,
                    ),
                )
                record.step_log.append({"step": "createRanSlice", "ranSliceId": slice_id})
            except Exception as exc:
                self.store.restore(cp)
                self._fail(record, exc)
                raise
            record.target = slice_id
            return slice_id, self._finish(record)

    def _generate_slice_id(self) -> str:
        existing = {rs.object_id for rs in self.store.iter_kind("RanSlice")}
        n = 1
        while f"RSI#{n}" in existing:
            n += 1
        return f"RSI#{n}"

    def modify_rsi(self, ran_slice_id: str, delta: dict, force: bool = False):
        """Apply AL changes, cell-slice additions/removals, network-id changes."""
        with self._lock:
            record = self._new_record(OP_MODIFY, ran_slice_id)
            rs = self.store.resolve_ran_slice(ran_slice_id)
            if rs is None:
                exc = UnknownSlice(ran_slice_id)
                self._fail(record, exc)
                raise exc
            cp = self.store.checkpoint()
            try:
                for change in delta.get("alChanges", []):
                    self._apply_al_change(record, rs, change, force)
                for removal in delta.get("removeCellSlices", []):
                    self._remove_cell_slice(record, rs, removal)
                for addition in delta.get("addCellSlices", []):
                    self._add_cell_slice(record, rs, addition, force)
                if "networkIdChanges" in delta:
                    nids = tuple(NetworkId.from_dict(n) for n in delta["networkIdChanges"])
                    self.store.update_object(rs.ref, {"network_ids": nids})
                    record.diff.append({"changed": "networkIds"})
            except Exception as exc:
                self.store.restore(cp)
                self._fail(record, exc)
                raise
            return self._finish(record)

    def _apply_al_change(self, record, rs, change: dict, force: bool) -> None:
        al = AuthorisedLoad.from_dict(change["authorisedLoad"])
        if "cellId" in change:
            cs = self.store.resolve_cell_slice(change["cellId"], change["cellSliceId"])
            if cs is None:
                raise InvariantViolation(
                    [f"no cell slice ({change['cellId']}, {change['cellSliceId']})"]
                )
            if (change["cellId"], change["cellSliceId"]) not in rs.attrs.cell_slice_refs:
                raise InvariantViolation(
                    [f"cell slice {change['cellSliceId']} not part of {rs.object_id}"]
                )
            cell = self.store.resolve_cell(change["cellId"])
            # Feasibility is checked against the other slices of the cell;
            # the changed slice's own entries are replaced, not added.
            old_al = cs.attrs.authorised_load
            self.store.update_object(cs.ref, {"authorised_load": AuthorisedLoad()})
            self._check_feasibility(cell.ref, cell.object_id, al, force)
            self.store.update_object(cs.ref, {"authorised_load": al})
            record.diff.append(
                {"changed": "authorisedLoad", "cellId": change["cellId"],
                 "cellSliceId": change["cellSliceId"],
                 "from": old_al.to_dict(), "to": al.to_dict()}
            )
        else:
            old_al = rs.attrs.authorised_load
            self.store.update_object(rs.ref, {"authorised_load": al})
            record.diff.append(
                {"changed": "sliceAuthorisedLoad", "from": old_al.to_dict(),
                 "to": al.to_dict()}
            )

    def _remove_cell_slice(self, record, rs, removal: dict) -> None:
        cell_id, cs_id = removal["cellId"], removal["cellSliceId"]
        cs = self.store.resolve_cell_slice(cell_id, cs_id)
        if cs is None or (cell_id, cs_id) not in rs.attrs.cell_slice_refs:
            raise InvariantViolation([f"no cell slice ({cell_id}, {cs_id}) in {rs.object_id}"])
        refs = tuple(r for r in rs.attrs.cell_slice_refs if r != (cell_id, cs_id))
        self.store.update_object(rs.ref, {"cell_slice_refs": refs})
        self.store.delete_object(cs.ref)
        record.diff.append({"removed": {"cellId": cell_id, "cellSliceId": cs_id}})

    def _add_cell_slice(self, record, rs, addition: dict, force: bool) -> None:
        cell_id = addition["cellId"]
        cell = self.store.resolve_cell(cell_id)
        if cell is None or not self.infra.is_cell_servable(cell_id):
            raise UnservableCell(cell_id)
        rst = addition.get("rst", "")
        if not rst:
            raise InvariantViolation(["addCellSlices entries need an rst"])
        if rst not in self.rst_catalog:
            raise RstUnknown(rst)
        network_ids = (
            tuple(NetworkId.from_dict(n) for n in addition["networkIds"])
            if addition.get("networkIds")
            else rs.attrs.network_ids
        )
        al = AuthorisedLoad.from_dict(addition.get("authorisedLoad"))
        self._check_feasibility(cell.ref, cell_id, al, force)
        self._ensure_cell_plmns(cell.ref, network_ids)
        cs_id = addition.get("cellSliceId") or self._next_cell_slice_id(cell.ref)
        self.store.create_object(
            cell.ref,
            "CellSlice",
            CellSliceAttrs(
                cell_slice_id=cs_id, rst=rst, network_ids=network_ids, authorised_load=al
            ),
        )
        self.store.update_object(
            rs.ref, {"cell_slice_refs": rs.attrs.cell_slice_refs + ((cell_id, cs_id),)}
        )
        record.diff.append({"added": {"cellId": cell_id, "cellSliceId": cs_id}})

    # --- capacity scale-out (saga) ---------------------------------------------------

    def scale_rsi_capacity(self, ran_slice_id: str, plan: dict):
        """Orchestrate MANO scale-out, carrier binding and model updates.

        On failure, completed steps are compensated in strict reverse order
        and the model meta is reset so the export matches the pre-call state.
        """
        with self._lock:
            record = self._new_record(OP_SCALE, ran_slice_id)
            rs = self.store.resolve_ran_slice(ran_slice_id)
            if rs is None:
                exc = UnknownSlice(ran_slice_id)
                self._fail(record, exc)
                raise exc

            pre_cp = self.store.checkpoint()
            completed: list[tuple[str, callable]] = []

            def run_step(name: str, action, inverse) -> object:
                result = action()
                completed.append((name, inverse))
                record.step_log.append({"step": name, "status": "done"})
                if self.fault_hook is not None:
                    self.fault_hook(name)
                return result

            try:
                ns_instance_id = plan["nsInstanceId"]
                vnf = plan["vnf"]
                cell_plan = plan["cell"]
                cell_id = cell_plan["cellId"]
                links = tuple(
                    VirtualLink.from_dict(l) for l in plan.get("newLinks", [])
                )

                run_step(
                    "scaleNs",
                    lambda: self.infra.scale_ns(
                        ns_instance_id,
                        ScaleStep(
                            vnf_id=vnf["vnfId"], vnf_kind=vnf["vnfKind"],
                            pop_id=vnf["popId"], new_links=links,
                        ),
                    ),
                    lambda: self.infra.unscale_ns(ns_instance_id, vnf["vnfId"]),
                )
                run_step(
                    "bindCellResources",
                    lambda: self.infra.bind_cell_resources(
                        cell_id, ns_instance_id, cell_plan["rrhId"],
                        cell_plan["band"], float(cell_plan["bandwidthMHz"]),
                        serving_vnf_id=vnf["vnfId"],
                    ),
                    lambda: self.infra.release_cell_binding(cell_id),
                )

                fn_plan = plan["gnbFunction"]
                me = self.store.find_by_id("ManagedElement", plan["managedElementId"])
                if me is None:
                    raise InvariantViolation(
                        [f"unknown managed element {plan['managedElementId']!r}"]
                    )
                if self.store.find_by_id("GnbFunction", fn_plan["functionId"]) is None:
                    fn_ref_holder = {}

                    def create_fn():
                        fn_ref_holder["ref"] = self.store.create_object(
                            me.ref,
                            "GnbFunction",
                            GnbFunctionAttrs(
                                function_id=fn_plan["functionId"],
                                kind=fn_plan["kind"],
                                cu_ref=fn_plan.get("cuRef"),
                            ),
                        )

                    run_step(
                        "createGnbFunction",
                        create_fn,
                        lambda: self.store.delete_object(fn_ref_holder["ref"]),
                    )
                    fn_obj = self.store.get(fn_ref_holder["ref"])
                else:
                    fn_obj = self.store.find_by_id("GnbFunction", fn_plan["functionId"])

                network_ids = rs.attrs.network_ids
                plmn_list = tuple(
                    PlmnCellEntry(plmn=p, exposed_services=("PM", "FM"))
                    for p in sorted({n.plmn for n in network_ids})
                )
                cell_ref_holder = {}

                def create_cell():
                    cell_ref_holder["ref"] = self.store.create_object(
                        fn_obj.ref,
                        "NrCell",
                        NrCellAttrs(
                            cell_id=cell_id,
                            band=cell_plan["band"],
                            channel_bandwidth_mhz=float(cell_plan["bandwidthMHz"]),
                            plmn_list=plmn_list,
                            nsd_ref=self.infra.instances[ns_instance_id].nsd_ref,
                            sector_equipment_refs=(cell_plan["rrhId"],),
                        ),
                    )

                run_step(
                    "createCell",
                    create_cell,
                    lambda: self.store.delete_object(cell_ref_holder["ref"]),
                )

                cs_plan = plan.get("cellSlice", {})
                al = AuthorisedLoad.from_dict(cs_plan.get("authorisedLoad"))
                cs_id_holder = {}

                def create_cs():
                    cs_id = cs_plan.get("cellSliceId") or self._next_cell_slice_id(
                        cell_ref_holder["ref"]
                    )
                    cs_id_holder["id"] = cs_id
                    cs_id_holder["ref"] = self.store.create_object(
                        cell_ref_holder["ref"],
                        "CellSlice",
                        CellSliceAttrs(
                            cell_slice_id=cs_id,
                            rst=cs_plan.get("rst") or self._rst_of(rs),
                            network_ids=network_ids,
                            authorised_load=al,
                        ),
                    )

                run_step(
                    "createCellSlice",
                    create_cs,
                    lambda: self.store.delete_object(cs_id_holder["ref"]),
                )

                old_refs = rs.attrs.cell_slice_refs
                run_step(
                    "attachToSlice",
                    lambda: self.store.update_object(
                        rs.ref,
                        {"cell_slice_refs": old_refs + ((cell_id, cs_id_holder["id"]),)},
                    ),
                    lambda: self.store.update_object(rs.ref, {"cell_slice_refs": old_refs}),
                )
            except Exception as exc:
                self._compensate(record, completed, pre_cp, exc)
                raise
            record.diff.append({"added": {"cellId": cell_id}})
            return self._finish(record)

    def _rst_of(self, rs) -> str:
        for cell_id, cs_id in rs.attrs.cell_slice_refs:
            cs = self.store.resolve_cell_slice(cell_id, cs_id)
            if cs is not None:
                return cs.attrs.rst
        return self.rst_catalog[0]

    def _compensate(self, record, completed, pre_cp, exc) -> None:
        for name, inverse in reversed(completed):
            try:
                inverse()
            except Exception as comp_exc:
                record.status = STATUS_PENDING_MANUAL
                record.failure_reason = str(exc)
                record.step_log.append(
                    {"step": name, "status": "compensation-failed", "error": str(comp_exc)}
                )
                self.records.append(record)
                raise CompensationFailed(record.op_id, name, comp_exc) from exc
            record.step_log.append({"step": name, "status": "compensated"})
        # Every structural model change was undone step-by-step; restoring the
        # pre-call checkpoint also rewinds object versions and the audit log
        # so the export matches the pre-call state byte for byte.
        self.store.restore(pre_cp)
        self._fail(record, exc)

    def terminate_rsi(self, ran_slice_id: str, release_dedicated_resources: bool = False):
        """Remove the slice; empty cells are deleted, last-user NSs released."""
        with self._lock:
            record = self._new_record(OP_TERMINATE, ran_slice_id)
            rs = self.store.resolve_ran_slice(ran_slice_id)
            if rs is None:
                exc = UnknownSlice(ran_slice_id)
                self._fail(record, exc)
                raise exc
            store_cp = self.store.checkpoint()
            infra_cp = self.infra.checkpoint()
            try:
                refs = rs.attrs.cell_slice_refs
                self.store.delete_object(rs.ref)
                record.step_log.append({"step": "deleteRanSlice", "ranSliceId": ran_slice_id})
                emptied: list = []
                for cell_id, cs_id in refs:
                    cs = self.store.resolve_cell_slice(cell_id, cs_id)
                    if cs is not None:
                        self.store.delete_object(cs.ref)
                        record.step_log.append(
                            {"step": "deleteCellSlice", "cellId": cell_id, "cellSliceId": cs_id}
                        )
                    cell = self.store.resolve_cell(cell_id)
                    if cell is not None and not any(
                        c.kind == "CellSlice" for c in self.store.children_of(cell.ref)
                    ):
                        emptied.append(cell)
                for cell in emptied:
                    cell_id = cell.object_id
                    binding = self.infra.bindings.get(cell_id)
                    self.store.delete_object(cell.ref)
                    record.step_log.append({"step": "deleteCell", "cellId": cell_id})
                    if binding is not None:
                        self.infra.release_cell_binding(cell_id)
                        if release_dedicated_resources:
                            instance_id = binding.ns_instance_id
                            still_used = any(
                                b.ns_instance_id == instance_id
                                for b in self.infra.bindings.values()
                            )
                            if not still_used:
                                report = self.infra.terminate_ns(instance_id)
                                record.step_log.append(
                                    {"step": "terminateNs", "report": report}
                                )
            except Exception as exc:
                self.store.restore(store_cp)
                self.infra.restore(infra_cp)
                self._fail(record, exc)
                raise
            return self._finish(record)
