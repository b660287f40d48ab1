"""Managed-object attribute types for the RAN-slicing resource model.

All types are plain frozen dataclasses with explicit dict conversion; the
wire format (export documents, scenario files, API payloads) uses camelCase
field names, the Python side uses snake_case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ranslicing.errors import ParseError

NOTIFICATION_ENABLED = "Enabled"
NOTIFICATION_DISABLED = "Disabled"

DEFAULT_RST_CATALOG = ("eMBB", "URLLC", "mMTC")

# Per-slice guarantees are fractions of cell capacity; sums are compared
# against 1.0 with this slack to absorb float noise.
FEASIBILITY_EPS = 1e-9


@dataclass(frozen=True, order=True)
class PlmnId:
    mcc: str
    mnc: str

    def validate(self) -> list[str]:
        problems = []
        if not (self.mcc.isdigit() and len(self.mcc) == 3):
            problems.append(f"mcc must be 3 digits, got {self.mcc!r}")
        if not (self.mnc.isdigit() and len(self.mnc) in (2, 3)):
            problems.append(f"mnc must be 2 or 3 digits, got {self.mnc!r}")
        return problems

    def to_dict(self) -> dict:
        return {"mcc": self.mcc, "mnc": self.mnc}

    @classmethod
    def from_dict(cls, d: dict) -> "PlmnId":
        return cls(mcc=str(d["mcc"]), mnc=str(d["mnc"]))


@dataclass(frozen=True, order=True)
class SNssai:
    sst: int
    sd: int | None = None

    def validate(self) -> list[str]:
        problems = []
        if not 0 <= self.sst <= 255:
            problems.append(f"sst out of range 0-255: {self.sst}")
        if self.sd is not None and not 0 <= self.sd < 2**24:
            problems.append(f"sd out of 24-bit range: {self.sd}")
        return problems

    def to_dict(self) -> dict:
        d: dict = {"sst": self.sst}
        if self.sd is not None:
            d["sd"] = self.sd
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SNssai":
        return cls(sst=int(d["sst"]), sd=int(d["sd"]) if d.get("sd") is not None else None)


@dataclass(frozen=True, order=True)
class NetworkId:
    """A (PLMN, S-NSSAI) pair served by a slice."""

    plmn: PlmnId
    snssai: SNssai

    def validate(self) -> list[str]:
        return self.plmn.validate() + self.snssai.validate()

    def to_dict(self) -> dict:
        return {"plmn": self.plmn.to_dict(), "snssai": self.snssai.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkId":
        return cls(plmn=PlmnId.from_dict(d["plmn"]), snssai=SNssai.from_dict(d["snssai"]))


@dataclass(frozen=True, order=True)
class QosFlowType:
    five_qi: int
    arp: int

    def validate(self) -> list[str]:
        problems = []
        if not 1 <= self.arp <= 15:
            problems.append(f"arp priority out of range 1-15: {self.arp}")
        return problems

    def key(self) -> str:
        return f"5qi{self.five_qi}-arp{self.arp}"

    def to_dict(self) -> dict:
        return {"fiveQi": self.five_qi, "arp": self.arp}

    @classmethod
    def from_dict(cls, d: dict) -> "QosFlowType":
        return cls(five_qi=int(d["fiveQi"]), arp=int(d["arp"]))


@dataclass(frozen=True)
class AuthorisedLoadEntry:
    """Aggregate guarantee/cap for one set of QoS flow types.

    `guaranteed` and `maximum` are fractions of the owning scope's capacity
    at cell level, or absolute Mbps at RAN-slice level. `maximum=None`
    means no cap (serialized as the literal "N/A").
    """

    flow_types: tuple[QosFlowType, ...]
    guaranteed: float | None
    maximum: float | None
    averaging_window_s: float
    notification_control: str = NOTIFICATION_DISABLED

    def validate(self, fractional: bool = True) -> list[str]:
        problems = []
        if not self.flow_types:
            problems.append("flowTypes must be non-empty")
        if len(set(self.flow_types)) != len(self.flow_types):
            problems.append("duplicate flow types in one entry")
        for ft in self.flow_types:
            problems += ft.validate()
        if self.averaging_window_s <= 0:
            problems.append(f"averagingWindow must be > 0, got {self.averaging_window_s}")
        if self.notification_control not in (NOTIFICATION_ENABLED, NOTIFICATION_DISABLED):
            problems.append(f"bad notificationControl: {self.notification_control!r}")
        for name, value in (("guaranteedLoad", self.guaranteed), ("maximumLoad", self.maximum)):
            if value is None:
                continue
            if value < 0 or not math.isfinite(value):
                problems.append(f"{name} must be finite and >= 0, got {value}")
            elif fractional and value > 1.0:
                problems.append(f"{name} fraction out of [0,1]: {value}")
        if (
            self.guaranteed is not None
            and self.maximum is not None
            and self.guaranteed > self.maximum
        ):
            problems.append(
                f"guaranteedLoad {self.guaranteed} exceeds maximumLoad {self.maximum}"
            )
        return problems

    def scope_key(self) -> str:
        return "+".join(ft.key() for ft in sorted(self.flow_types))

    def to_dict(self) -> dict:
        return {
            "flowTypes": [ft.to_dict() for ft in self.flow_types],
            "guaranteedLoad": self.guaranteed,
            "maximumLoad": "N/A" if self.maximum is None else self.maximum,
            "averagingWindowS": self.averaging_window_s,
            "notificationControl": self.notification_control,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AuthorisedLoadEntry":
        maximum = d.get("maximumLoad")
        if isinstance(maximum, str):
            if maximum.strip().upper() != "N/A":
                raise ParseError(f"maximumLoad must be a number or 'N/A', got {maximum!r}")
            maximum = None
        return cls(
            flow_types=tuple(QosFlowType.from_dict(x) for x in d["flowTypes"]),
            guaranteed=None if d.get("guaranteedLoad") is None else float(d["guaranteedLoad"]),
            maximum=None if maximum is None else float(maximum),
            averaging_window_s=float(d.get("averagingWindowS", 1.0)),
            notification_control=d.get("notificationControl", NOTIFICATION_DISABLED),
        )


@dataclass(frozen=True)
class AuthorisedLoad:
    """Empty entry list means unrestricted: 100% usable, no notifications."""

    entries: tuple[AuthorisedLoadEntry, ...] = ()

    def validate(self, fractional: bool = True) -> list[str]:
        problems = []
        seen: set[QosFlowType] = set()
        for entry in self.entries:
            problems += entry.validate(fractional=fractional)
            overlap = seen & set(entry.flow_types)
            if overlap:
                problems.append(
                    "flow-type scopes overlap between entries: "
                    + ", ".join(ft.key() for ft in sorted(overlap))
                )
            seen |= set(entry.flow_types)
        return problems

    def is_set(self) -> bool:
        return bool(self.entries)

    def entry_for(self, flow_type: QosFlowType) -> AuthorisedLoadEntry | None:
        for entry in self.entries:
            if flow_type in entry.flow_types:
                return entry
        return None

    def to_dict(self) -> list:
        return [e.to_dict() for e in self.entries]

    @classmethod
    def from_dict(cls, entries: list | None) -> "AuthorisedLoad":
        return cls(entries=tuple(AuthorisedLoadEntry.from_dict(e) for e in (entries or [])))


@dataclass(frozen=True)
class TargetKpi:
    kpi_name: str  # avgRateNonGbr | minRateNonGbr | blockedLoadRatio
    threshold: float
    direction: str  # "gte" or "lte"

    KNOWN = ("avgRateNonGbr", "minRateNonGbr", "blockedLoadRatio")

    def validate(self) -> list[str]:
        problems = []
        if self.kpi_name not in self.KNOWN:
            problems.append(f"unknown KPI name: {self.kpi_name!r}")
        if self.direction not in ("gte", "lte"):
            problems.append(f"direction must be 'gte' or 'lte', got {self.direction!r}")
        return problems

    def to_dict(self) -> dict:
        return {"kpiName": self.kpi_name, "threshold": self.threshold, "direction": self.direction}

    @classmethod
    def from_dict(cls, d: dict) -> "TargetKpi":
        return cls(
            kpi_name=d["kpiName"],
            threshold=float(d["threshold"]),
            direction=d.get("direction", "gte"),
        )


@dataclass(frozen=True)
class PlannedLoadItem:
    """Expected aggregate demand for one flow-type scope, spatially weighted."""

    flow_types: tuple[QosFlowType, ...]
    expected_mbps: float
    cell_weights: tuple[tuple[str, float], ...] = ()

    def validate(self) -> list[str]:
        problems = []
        if not self.flow_types:
            problems.append("plannedLoad item needs at least one flow type")
        if self.expected_mbps < 0:
            problems.append(f"expected load must be >= 0, got {self.expected_mbps}")
        return problems

    def to_dict(self) -> dict:
        return {
            "flowTypes": [ft.to_dict() for ft in self.flow_types],
            "expectedMbps": self.expected_mbps,
            "cellWeights": {cell: w for cell, w in self.cell_weights},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PlannedLoadItem":
        weights = d.get("cellWeights") or {}
        return cls(
            flow_types=tuple(QosFlowType.from_dict(x) for x in d["flowTypes"]),
            expected_mbps=float(d["expectedMbps"]),
            cell_weights=tuple(sorted(weights.items())),
        )


@dataclass(frozen=True)
class PlmnCellEntry:
    """PLMN broadcast by a cell, with management services exposed to it."""

    plmn: PlmnId
    exposed_services: tuple[str, ...] = ()  # subset of {"PM", "FM"}

    def validate(self) -> list[str]:
        problems = self.plmn.validate()
        bad = set(self.exposed_services) - {"PM", "FM"}
        if bad:
            problems.append(f"unknown exposed services: {sorted(bad)}")
        return problems

    def to_dict(self) -> dict:
        return {"plmn": self.plmn.to_dict(), "exposedServices": list(self.exposed_services)}

    @classmethod
    def from_dict(cls, d: dict) -> "PlmnCellEntry":
        return cls(
            plmn=PlmnId.from_dict(d["plmn"]),
            exposed_services=tuple(d.get("exposedServices", [])),
        )


# --- managed-object attribute payloads -------------------------------------


@dataclass
class SubnetworkAttrs:
    subnetwork_id: str


@dataclass
class ManagedElementAttrs:
    element_id: str
    vendor: str = ""


@dataclass
class GnbFunctionAttrs:
    function_id: str
    kind: str  # gNB | gNB-CU | gNB-DU
    cu_ref: str | None = None  # required for gNB-DU

    KINDS = ("gNB", "gNB-CU", "gNB-DU")


@dataclass
class NrCellAttrs:
    cell_id: str
    band: str
    channel_bandwidth_mhz: float
    tx_power_dbm: float = 0.0
    barred: bool = False
    plmn_list: tuple[PlmnCellEntry, ...] = ()
    nsd_ref: str | None = None
    sector_equipment_refs: tuple[str, ...] = ()
    aux_refs: tuple[str, ...] = ()  # opaque legacy IOCs (SON, energy saving, relations)
    oversubscribed: bool = False


@dataclass
class CellSliceAttrs:
    cell_slice_id: str
    rst: str
    network_ids: tuple[NetworkId, ...] = ()
    authorised_load: AuthorisedLoad = field(default_factory=AuthorisedLoad)


@dataclass
class RanSliceAttrs:
    ran_slice_id: str
    cell_slice_refs: tuple[tuple[str, str], ...] = ()  # (cellId, cellSliceId)
    network_ids: tuple[NetworkId, ...] = ()
    authorised_load: AuthorisedLoad = field(default_factory=AuthorisedLoad)
    planned_load: tuple[PlannedLoadItem, ...] = ()
    target_kpis: tuple[TargetKpi, ...] = ()
