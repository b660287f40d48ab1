"""Shared fixtures: scenario paths, small prebuilt models and infrastructures."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from ranslicing.infra.manager import Infrastructure
from ranslicing.infra.types import Nsd, Pop, Rrh
from ranslicing.nrm.store import ModelStore
from ranslicing.nrm.types import (
    AuthorisedLoad,
    GnbFunctionAttrs,
    ManagedElementAttrs,
    NetworkId,
    NrCellAttrs,
    PlmnCellEntry,
    PlmnId,
    SNssai,
    SubnetworkAttrs,
)

SCENARIO_PATH = (
    Path(__file__).resolve().parents[1]
    / "src" / "ranslicing" / "scenarios" / "neutral_host.scenario.json"
)

PLMN_A = PlmnId(mcc="001", mnc="01")
PLMN_B = PlmnId(mcc="001", mnc="02")

NETWORK_A = NetworkId(plmn=PLMN_A, snssai=SNssai(sst=1))
NETWORK_B = NetworkId(plmn=PLMN_B, snssai=SNssai(sst=1))


@pytest.fixture
def golden_scenario_path() -> Path:
    return SCENARIO_PATH


@pytest.fixture
def golden_scenario_raw() -> dict:
    return json.loads(SCENARIO_PATH.read_text(encoding="utf-8"))


def al_entry(five_qi=9, arp=8, guaranteed=None, maximum=None, window=10.0,
             control="Disabled") -> dict:
    """Wire-format AL entry with compact defaults for tests."""
    return {
        "flowTypes": [{"fiveQi": five_qi, "arp": arp}],
        "guaranteedLoad": guaranteed,
        "maximumLoad": "N/A" if maximum is None else maximum,
        "averagingWindowS": window,
        "notificationControl": control,
    }


def small_store(n_cells: int = 2, bandwidth: float = 20.0) -> tuple[ModelStore, str, list[str]]:
    """Subnetwork with one gNB and n cells; returns (store, sub_ref, cell_refs)."""
    store = ModelStore()
    sub = store.create_object(None, "Subnetwork", SubnetworkAttrs(subnetwork_id="SN-T"))
    me = store.create_object(sub, "ManagedElement", ManagedElementAttrs(element_id="ME-T"))
    fn = store.create_object(
        me, "GnbFunction", GnbFunctionAttrs(function_id="GNB-T", kind="gNB")
    )
    cell_refs = []
    for i in range(1, n_cells + 1):
        cell_refs.append(
            store.create_object(
                fn,
                "NrCell",
                NrCellAttrs(
                    cell_id=f"Cell-{i}",
                    band="B42",
                    channel_bandwidth_mhz=bandwidth,
                    plmn_list=(PlmnCellEntry(plmn=PLMN_A, exposed_services=("PM", "FM")),),
                ),
            )
        )
    return store, sub, cell_refs


def small_infra(n_cells: int = 2) -> Infrastructure:
    """One datacentre PoP, one RRH + gNB NSD, cells pre-bound."""
    pop = Pop.from_dict(
        {"popId": "P1", "kind": "datacentre", "nfviCapacity": 32,
         "hostedRrhIds": [f"R{i}" for i in range(1, n_cells + 1)]}
    )
    rrhs = [
        Rrh.from_dict({"rrhId": f"R{i}", "sitePopId": "P1",
                       "supportedBands": ["B42"], "maxCarriers": 2})
        for i in range(1, n_cells + 1)
    ]
    nsd = Nsd.from_dict(
        {
            "nsdId": "NSD-T",
            "vnfProfiles": [{"vnfId": "g1", "vnfKind": "gNB"}],
            "pnfRefs": [r.rrh_id for r in rrhs],
            "virtualLinks": [
                {"endpointA": "g1", "endpointB": r.rrh_id, "requiredMbps": 100}
                for r in rrhs
            ],
            "scalingRules": [{"vnfKind": "gNB", "maxInstances": 3}],
        }
    )
    infra = Infrastructure([pop], rrhs, [nsd])
    infra.instantiate_ns("NSD-T", ns_instance_id="ns-t")
    for i in range(1, n_cells + 1):
        infra.bind_cell_resources(f"Cell-{i}", "ns-t", f"R{i}", "B42", 20.0,
                                  serving_vnf_id="g1")
    return infra


def unrestricted_al() -> AuthorisedLoad:
    return AuthorisedLoad()
