"""Export/import documents and attribute (de)serialization.

The export document is JSON with one top-level `subnetwork` object whose
children are grouped by kind (camelCase plural keys); model version and
audit log live under `meta`. import(export(x)) reproduces x byte-for-byte.
"""

from __future__ import annotations

import json
from typing import Any

from ranslicing.errors import ParseError
from ranslicing.nrm.types import (
    AuthorisedLoad,
    CellSliceAttrs,
    GnbFunctionAttrs,
    ManagedElementAttrs,
    NetworkId,
    NrCellAttrs,
    PlannedLoadItem,
    PlmnCellEntry,
    RanSliceAttrs,
    SubnetworkAttrs,
    TargetKpi,
)


def canonical_json(doc: Any) -> str:
    """Stable rendering used for exports, logs and golden comparisons."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


# --- attribute payloads -------------------------------------------------------


def attrs_to_dict(kind: str, attrs: Any) -> dict:
    if kind == "Subnetwork":
        return {"subnetworkId": attrs.subnetwork_id}
    if kind == "ManagedElement":
        return {"elementId": attrs.element_id, "vendor": attrs.vendor}
    if kind == "GnbFunction":
        d = {"functionId": attrs.function_id, "kind": attrs.kind}
        if attrs.cu_ref is not None:
            d["cuRef"] = attrs.cu_ref
        return d
    if kind == "NrCell":
        return {
            "cellId": attrs.cell_id,
            "band": attrs.band,
            "channelBandwidthMHz": attrs.channel_bandwidth_mhz,
            "txPowerDbm": attrs.tx_power_dbm,
            "barred": attrs.barred,
            "plmnList": [p.to_dict() for p in attrs.plmn_list],
            "nsdRef": attrs.nsd_ref,
            "sectorEquipmentRefs": list(attrs.sector_equipment_refs),
            "auxRefs": list(attrs.aux_refs),
            "oversubscribed": attrs.oversubscribed,
        }
    if kind == "CellSlice":
        return {
            "cellSliceId": attrs.cell_slice_id,
            "rst": attrs.rst,
            "networkIds": [n.to_dict() for n in attrs.network_ids],
            "authorisedLoad": attrs.authorised_load.to_dict(),
        }
    if kind == "RanSlice":
        return {
            "ranSliceId": attrs.ran_slice_id,
            "cellSliceRefs": [
                {"cellId": c, "cellSliceId": s} for c, s in attrs.cell_slice_refs
            ],
            "networkIds": [n.to_dict() for n in attrs.network_ids],
            "authorisedLoad": attrs.authorised_load.to_dict(),
            "plannedLoad": [p.to_dict() for p in attrs.planned_load],
            "targetKpis": [k.to_dict() for k in attrs.target_kpis],
        }
    raise ParseError(f"unknown object kind: {kind}")


def attrs_from_dict(kind: str, d: dict) -> Any:
    try:
        if kind == "Subnetwork":
            return SubnetworkAttrs(subnetwork_id=d["subnetworkId"])
        if kind == "ManagedElement":
            return ManagedElementAttrs(element_id=d["elementId"], vendor=d.get("vendor", ""))
        if kind == "GnbFunction":
            return GnbFunctionAttrs(
                function_id=d["functionId"], kind=d["kind"], cu_ref=d.get("cuRef")
            )
        if kind == "NrCell":
            return NrCellAttrs(
                cell_id=d["cellId"],
                band=d["band"],
                channel_bandwidth_mhz=float(d["channelBandwidthMHz"]),
                tx_power_dbm=float(d.get("txPowerDbm", 0.0)),
                barred=bool(d.get("barred", False)),
                plmn_list=tuple(PlmnCellEntry.from_dict(p) for p in d.get("plmnList", [])),
                nsd_ref=d.get("nsdRef"),
                sector_equipment_refs=tuple(d.get("sectorEquipmentRefs", [])),
                aux_refs=tuple(d.get("auxRefs", [])),
                oversubscribed=bool(d.get("oversubscribed", False)),
            )
        if kind == "CellSlice":
            return CellSliceAttrs(
                cell_slice_id=d["cellSliceId"],
                rst=d["rst"],
                network_ids=tuple(NetworkId.from_dict(n) for n in d.get("networkIds", [])),
                authorised_load=AuthorisedLoad.from_dict(d.get("authorisedLoad")),
            )
        if kind == "RanSlice":
            return RanSliceAttrs(
                ran_slice_id=d["ranSliceId"],
                cell_slice_refs=tuple(
                    (r["cellId"], r["cellSliceId"]) for r in d.get("cellSliceRefs", [])
                ),
                network_ids=tuple(NetworkId.from_dict(n) for n in d.get("networkIds", [])),
                authorised_load=AuthorisedLoad.from_dict(d.get("authorisedLoad")),
                planned_load=tuple(
                    PlannedLoadItem.from_dict(p) for p in d.get("plannedLoad", [])
                ),
                target_kpis=tuple(TargetKpi.from_dict(k) for k in d.get("targetKpis", [])),
            )
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(str(exc), location=kind) from None
    raise ParseError(f"unknown object kind: {kind}")


# Attribute deltas are serialized field-by-field so audit replay works.
_DELTA_CODECS = {
    "plmn_list": (
        lambda v: [p.to_dict() for p in v],
        lambda v: tuple(PlmnCellEntry.from_dict(p) for p in v),
    ),
    "network_ids": (
        lambda v: [n.to_dict() for n in v],
        lambda v: tuple(NetworkId.from_dict(n) for n in v),
    ),
    "authorised_load": (
        lambda v: v.to_dict(),
        lambda v: AuthorisedLoad.from_dict(v),
    ),
    "planned_load": (
        lambda v: [p.to_dict() for p in v],
        lambda v: tuple(PlannedLoadItem.from_dict(p) for p in v),
    ),
    "target_kpis": (
        lambda v: [k.to_dict() for k in v],
        lambda v: tuple(TargetKpi.from_dict(k) for k in v),
    ),
    "cell_slice_refs": (
        lambda v: [{"cellId": c, "cellSliceId": s} for c, s in v],
        lambda v: tuple((r["cellId"], r["cellSliceId"]) for r in v),
    ),
    "sector_equipment_refs": (lambda v: list(v), lambda v: tuple(v)),
    "aux_refs": (lambda v: list(v), lambda v: tuple(v)),
}


def attr_deltas_to_dict(kind: str, deltas: dict) -> dict:
    out = {}
    for name, value in deltas.items():
        if name in _DELTA_CODECS:
            out[name] = _DELTA_CODECS[name][0](value)
        else:
            out[name] = value
    return out


def attr_deltas_from_dict(kind: str, payload: dict) -> dict:
    out = {}
    for name, value in payload.items():
        if name in _DELTA_CODECS:
            out[name] = _DELTA_CODECS[name][1](value)
        else:
            out[name] = value
    return out


# --- whole-model export / import ---------------------------------------------

_CHILD_KEYS = {
    "Subnetwork": (("ManagedElement", "managedElements"), ("RanSlice", "ranSlices")),
    "ManagedElement": (("GnbFunction", "gnbFunctions"),),
    "GnbFunction": (("NrCell", "cells"),),
    "NrCell": (("CellSlice", "cellSlices"),),
    "CellSlice": (),
    "RanSlice": (),
}

_KEY_TO_KIND = {
    key: kind for parent in _CHILD_KEYS.values() for kind, key in parent
}

_ALLOWED_KEYS = {
    "Subnetwork": {"subnetworkId"},
    "ManagedElement": {"elementId", "vendor"},
    "GnbFunction": {"functionId", "kind", "cuRef"},
    "NrCell": {
        "cellId", "band", "channelBandwidthMHz", "txPowerDbm", "barred",
        "plmnList", "nsdRef", "sectorEquipmentRefs", "auxRefs", "oversubscribed",
    },
    "CellSlice": {"cellSliceId", "rst", "networkIds", "authorisedLoad"},
    "RanSlice": {
        "ranSliceId", "cellSliceRefs", "networkIds", "authorisedLoad",
        "plannedLoad", "targetKpis",
    },
}


def export_model(store, subnetwork_ref: str) -> dict:
    """Export the subnetwork subtree plus meta (version, audit log)."""
    snap = store.snapshot()
    root = snap.get(subnetwork_ref)

    def node(obj) -> dict:
        d = dict(attrs_to_dict(obj.kind, obj.attrs))
        d["objectVersion"] = obj.version
        children = snap.children_of(obj.ref)
        for child_kind, key in _CHILD_KEYS[obj.kind]:
            group = [node(c) for c in children if c.kind == child_kind]
            d[key] = group
        return d

    return {
        "subnetwork": node(root),
        "meta": {"modelVersion": snap.version, "auditLog": snap.audit_log},
    }


def export_model_json(store, subnetwork_ref: str) -> str:
    return canonical_json(export_model(store, subnetwork_ref))


def import_model(document: dict):
    """Build a fresh store from an export document; returns (store, root ref)."""
    from ranslicing.nrm.store import ModelStore

    if not isinstance(document, dict) or "subnetwork" not in document:
        raise ParseError("document must contain a top-level 'subnetwork' object")

    store = ModelStore()
    versions: dict[str, int] = {}

    def build(parent_ref: str | None, kind: str, d: dict) -> str:
        if not isinstance(d, dict):
            raise ParseError(f"expected object for {kind}", location=kind)
        allowed = (
            _ALLOWED_KEYS[kind]
            | {"objectVersion"}
            | {key for _, key in _CHILD_KEYS[kind]}
        )
        unknown = sorted(set(d) - allowed)
        if unknown:
            raise ParseError(f"unknown objectKind or field: {unknown[0]!r}", location=kind)
        attrs = attrs_from_dict(kind, d)
        ref = store.create_object(parent_ref, kind, attrs)
        if "objectVersion" in d:
            versions[ref] = int(d["objectVersion"])
        for child_kind, key in _CHILD_KEYS[kind]:
            for child in d.get(key, []):
                build(ref, child_kind, child)
        return ref

    # Cell slices must exist before the RAN slices that reference them, so
    # managed elements are built first; the key order in _CHILD_KEYS does that.
    root_ref = build(None, "Subnetwork", document["subnetwork"])

    for ref, version in versions.items():
        store.get(ref).version = version
    meta = document.get("meta") or {}
    if "modelVersion" in meta:
        store._version = int(meta["modelVersion"])
        store._audit = list(meta.get("auditLog", []))
    return store, root_ref
