"""Cross-object invariant checking for the managed-object tree.

Every rule has a stable id so violations can be asserted in tests and
surfaced over the API. Severity "error" blocks mutations; "warning" and
"info" are reported by validateModel but never block.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from ranslicing.nrm.types import FEASIBILITY_EPS, GnbFunctionAttrs

MIN_NR_BANDWIDTH_MHZ = 5.0


@dataclass(frozen=True)
class Violation:
    path: str
    rule_id: str
    message: str
    severity: str = "error"  # error | warning | info

    def __str__(self) -> str:
        return f"[{self.rule_id}] {self.path}: {self.message}"

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "ruleId": self.rule_id,
            "message": self.message,
            "severity": self.severity,
        }


def validate_store(store) -> list[Violation]:
    """Validate the whole store; returns every violation found."""
    out: list[Violation] = []
    for root in store.roots():
        out += validate_subnetwork(store, root.ref)
    return out


def validate_subnetwork(store, subnetwork_ref: str) -> list[Violation]:
    v: list[Violation] = []
    err = lambda path, rule, msg: v.append(Violation(path, rule, msg))
    warn = lambda path, rule, msg: v.append(Violation(path, rule, msg, "warning"))
    info = lambda path, rule, msg: v.append(Violation(path, rule, msg, "info"))

    cells = []
    cell_slices = []  # (cell obj, slice obj)
    ran_slices = []
    function_ids: dict[str, object] = {}
    cell_ids: dict[str, object] = {}

    def walk(obj):
        for child in store.children_of(obj.ref):
            if child.kind == "GnbFunction":
                if child.object_id in function_ids:
                    err(child.ref, "FUNCTION-ID-UNIQUE",
                        f"duplicate GnbFunction id {child.object_id!r} in subnetwork")
                function_ids[child.object_id] = child
            elif child.kind == "NrCell":
                if child.object_id in cell_ids:
                    err(child.ref, "CELL-ID-UNIQUE",
                        f"duplicate cellId {child.object_id!r} in subnetwork")
                cell_ids[child.object_id] = child
                cells.append(child)
            elif child.kind == "CellSlice":
                cell_slices.append((obj, child))
            elif child.kind == "RanSlice":
                ran_slices.append(child)
            walk(child)

    root = store.get(subnetwork_ref)
    walk(root)

    # gNB functions: kind legality, CU/DU pairing, no cells under a bare CU
    for fn in function_ids.values():
        a = fn.attrs
        if a.kind not in GnbFunctionAttrs.KINDS:
            err(fn.ref, "GNB-KIND", f"unknown gNB function kind {a.kind!r}")
            continue
        if a.kind == "gNB-DU":
            cu = function_ids.get(a.cu_ref) if a.cu_ref else None
            if cu is None:
                err(fn.ref, "GNB-DU-CU-REF",
                    f"gNB-DU must reference an existing gNB-CU, got {a.cu_ref!r}")
            elif cu.attrs.kind != "gNB-CU":
                err(fn.ref, "GNB-DU-CU-REF",
                    f"cuRef {a.cu_ref!r} is a {cu.attrs.kind}, not a gNB-CU")
        served = [c for c in store.children_of(fn.ref) if c.kind == "NrCell"]
        if a.kind == "gNB-CU" and served:
            err(fn.ref, "CU-SERVES-CELL",
                "cells must hang off a gNB or gNB-DU, not a gNB-CU")

    # cells
    for cell in cells:
        a = cell.attrs
        if a.channel_bandwidth_mhz < MIN_NR_BANDWIDTH_MHZ:
            err(cell.ref, "CELL-BANDWIDTH",
                f"channel bandwidth {a.channel_bandwidth_mhz} MHz below NR minimum "
                f"{MIN_NR_BANDWIDTH_MHZ} MHz")
        for entry in a.plmn_list:
            for problem in entry.validate():
                err(cell.ref, "CELL-PLMN", problem)

    # cell slices
    for cell, cs in cell_slices:
        a = cs.attrs
        if not a.network_ids:
            err(cs.ref, "SLICE-NETWORK-IDS", "networkIds must be non-empty")
        seen_pairs = set()
        for nid in a.network_ids:
            for problem in nid.validate():
                err(cs.ref, "NETWORK-ID", problem)
            pair = (nid.plmn, nid.snssai)
            if pair in seen_pairs:
                err(cs.ref, "NETWORK-ID-UNIQUE", f"duplicate (plmn, snssai): {nid.to_dict()}")
            seen_pairs.add(pair)
        cell_plmns = {p.plmn for p in cell.attrs.plmn_list}
        missing = {n.plmn for n in a.network_ids} - cell_plmns
        if missing:
            err(cs.ref, "CELLSLICE-PLMN",
                "served PLMNs not broadcast by the cell: "
                + ", ".join(f"{p.mcc}-{p.mnc}" for p in sorted(missing)))
        for problem in a.authorised_load.validate(fractional=True):
            err(cs.ref, "AL-ENTRY", problem)
        if len({n.plmn for n in a.network_ids}) > 1:
            info(cs.ref, "MULTI-PLMN-CELLSLICE",
                 "cell slice serves S-NSSAIs of multiple PLMNs")

    # per-cell guaranteed-load feasibility
    for cell in cells:
        slices_here = [cs for c, cs in cell_slices if c.ref == cell.ref]
        per_flow = defaultdict(float)
        for cs in slices_here:
            for entry in cs.attrs.authorised_load.entries:
                if entry.guaranteed is None:
                    continue
                for ft in entry.flow_types:
                    per_flow[ft] += entry.guaranteed
        for ft, total in sorted(per_flow.items()):
            if total > 1.0 + FEASIBILITY_EPS:
                msg = (f"guaranteed loads for {ft.key()} sum to {total:.6f} "
                       f"(> 1.0 of cell capacity)")
                if cell.attrs.oversubscribed:
                    info(cell.ref, "CELL-OVERGUARANTEE-FORCED", msg)
                else:
                    err(cell.ref, "CELL-OVERGUARANTEE", msg)

    # RAN slices and referential integrity
    referenced: dict[str, list] = defaultdict(list)
    slice_ids = set()
    for rs in ran_slices:
        a = rs.attrs
        if a.ran_slice_id in slice_ids:
            err(rs.ref, "RANSLICE-ID-UNIQUE",
                f"duplicate ranSliceId {a.ran_slice_id!r} in subnetwork")
        slice_ids.add(a.ran_slice_id)
        if not a.cell_slice_refs:
            err(rs.ref, "RANSLICE-NONEMPTY", "an active RAN slice needs >= 1 cell slice")
        if not a.network_ids:
            err(rs.ref, "SLICE-NETWORK-IDS", "networkIds must be non-empty")
        for problem in a.authorised_load.validate(fractional=False):
            err(rs.ref, "AL-ENTRY", problem)
        for item in a.planned_load:
            for problem in item.validate():
                err(rs.ref, "PLANNED-LOAD", problem)
        for kpi in a.target_kpis:
            for problem in kpi.validate():
                err(rs.ref, "TARGET-KPI", problem)
        slice_nids = set(a.network_ids)
        for cell_id, cell_slice_id in a.cell_slice_refs:
            cell = cell_ids.get(cell_id)
            target = None
            if cell is not None:
                for child in store.children_of(cell.ref):
                    if child.kind == "CellSlice" and child.object_id == cell_slice_id:
                        target = child
                        break
            if target is None:
                err(rs.ref, "RANSLICE-REF-DANGLING",
                    f"cellSliceRef ({cell_id}, {cell_slice_id}) does not resolve")
                continue
            referenced[target.ref].append(rs)
            extra = set(target.attrs.network_ids) - slice_nids
            if extra:
                err(rs.ref, "RANSLICE-NETWORK-IDS",
                    f"cell slice {target.ref} serves network ids outside the RAN slice")

    for cell, cs in cell_slices:
        owners = referenced.get(cs.ref, [])
        if len(owners) == 0:
            warn(cs.ref, "CELLSLICE-ORPHAN", "cell slice not referenced by any RAN slice")
        elif len(owners) > 1:
            err(cs.ref, "CELLSLICE-MULTI-OWNER",
                "cell slice referenced by multiple RAN slices: "
                + ", ".join(o.attrs.ran_slice_id for o in owners))

    return v
