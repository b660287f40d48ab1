"""Deterministic random model generator for round-trip and replay tests."""

from __future__ import annotations

import random

from ranslicing.nrm.store import ModelStore
from ranslicing.nrm.types import (
    AuthorisedLoad,
    AuthorisedLoadEntry,
    CellSliceAttrs,
    GnbFunctionAttrs,
    ManagedElementAttrs,
    NetworkId,
    NrCellAttrs,
    PlannedLoadItem,
    PlmnCellEntry,
    PlmnId,
    QosFlowType,
    RanSliceAttrs,
    SNssai,
    SubnetworkAttrs,
    TargetKpi,
)

RSTS = ("eMBB", "URLLC", "mMTC")
BANDS = ("B28", "B42", "B43", "B78")


def random_model(rng: random.Random) -> tuple[ModelStore, str]:
    """A valid random subnetwork tree; returns (store, subnetwork_ref)."""
    store = ModelStore()
    sub = store.create_object(
        None, "Subnetwork", SubnetworkAttrs(subnetwork_id=f"SN-{rng.randint(1, 99)}")
    )
    plmns = [PlmnId(mcc="001", mnc=f"{i:02d}") for i in range(1, rng.randint(2, 4))]
    networks = [
        NetworkId(plmn=p, snssai=SNssai(sst=rng.randint(1, 3),
                                        sd=rng.choice([None, rng.randint(0, 100)])))
        for p in plmns
    ]

    cell_seq = 0
    all_cell_slices: list[tuple[str, str]] = []
    slice_network: dict[tuple[str, str], NetworkId] = {}
    for m in range(rng.randint(1, 3)):
        me = store.create_object(
            sub, "ManagedElement",
            ManagedElementAttrs(element_id=f"ME-{m}", vendor=rng.choice(["", "v-a", "v-b"])),
        )
        cu_ref = None
        for f in range(rng.randint(1, 3)):
            kind = rng.choice(["gNB", "gNB-CU", "gNB-DU"])
            if kind == "gNB-DU" and cu_ref is None:
                kind = "gNB-CU"
            fn_id = f"FN-{m}-{f}"
            store.create_object(
                me, "GnbFunction",
                GnbFunctionAttrs(
                    function_id=fn_id, kind=kind,
                    cu_ref=cu_ref if kind == "gNB-DU" else None,
                ),
            )
            if kind == "gNB-CU":
                cu_ref = fn_id
            if kind == "gNB-CU":
                continue  # cells sit under gNB / gNB-DU only
            fn_ref = f"{me}/{fn_id}"
            for _ in range(rng.randint(0, 2)):
                cell_seq += 1
                cell_id = f"C-{cell_seq}"
                cell_ref = store.create_object(
                    fn_ref, "NrCell",
                    NrCellAttrs(
                        cell_id=cell_id,
                        band=rng.choice(BANDS),
                        channel_bandwidth_mhz=rng.choice([5.0, 20.0, 40.0, 80.0]),
                        tx_power_dbm=round(rng.uniform(20, 46), 1),
                        barred=rng.random() < 0.1,
                        plmn_list=tuple(
                            PlmnCellEntry(plmn=p, exposed_services=("PM", "FM"))
                            for p in plmns
                        ),
                        sector_equipment_refs=(f"RRH-{cell_seq}",),
                    ),
                )
                budget = 1.0
                for s in range(rng.randint(0, 2)):
                    g = round(rng.uniform(0, budget), 3)
                    budget -= g
                    cs_id = f"CS-{s + 1}"
                    network = rng.choice(networks)
                    slice_network[(cell_id, cs_id)] = network
                    store.create_object(
                        cell_ref, "CellSlice",
                        CellSliceAttrs(
                            cell_slice_id=cs_id,
                            rst=rng.choice(RSTS),
                            network_ids=(network,),
                            authorised_load=AuthorisedLoad(
                                ()
                                if rng.random() < 0.3
                                else (
                                    AuthorisedLoadEntry(
                                        flow_types=(QosFlowType(
                                            five_qi=rng.choice([1, 5, 8, 9, 82]),
                                            arp=s + 1,
                                        ),),
                                        guaranteed=g,
                                        maximum=rng.choice([None, min(1.0, g + 0.1)]),
                                        averaging_window_s=float(rng.choice([5, 10, 20])),
                                        notification_control=rng.choice(
                                            ["Enabled", "Disabled"]
                                        ),
                                    ),
                                )
                            ),
                        ),
                    )
                    all_cell_slices.append((cell_id, cs_id))

    rng.shuffle(all_cell_slices)
    idx = 0
    for r in range(rng.randint(0, 3)):
        take = rng.randint(1, 2)
        refs = tuple(all_cell_slices[idx:idx + take])
        idx += take
        if not refs:
            break
        store.create_object(
            sub, "RanSlice",
            RanSliceAttrs(
                ran_slice_id=f"RSI-{r + 1}",
                cell_slice_refs=refs,
                network_ids=tuple(sorted({slice_network[ref] for ref in refs})),
                planned_load=(
                    (PlannedLoadItem(
                        flow_types=(QosFlowType(five_qi=9, arp=8),),
                        expected_mbps=round(rng.uniform(1, 500), 2),
                    ),)
                    if rng.random() < 0.5
                    else ()
                ),
                target_kpis=(
                    (TargetKpi(
                        kpi_name=rng.choice(TargetKpi.KNOWN),
                        threshold=round(rng.uniform(0, 400), 2),
                        direction=rng.choice(["gte", "lte"]),
                    ),)
                    if rng.random() < 0.5
                    else ()
                ),
            ),
        )
    return store, sub
