"""Simulated NG-RAN infrastructure: sites, radio heads, NS descriptors."""

from __future__ import annotations

from dataclasses import dataclass, field

POP_CELL_SITE = "cellSite"
POP_DATACENTRE = "datacentre"

VNF_KINDS = ("gNB", "gNB-CU", "gNB-DU")

# Abstract NFVI sizing per function kind; only relative exhaustion matters.
DEFAULT_COMPUTE_UNITS = {"gNB": 4, "gNB-CU": 2, "gNB-DU": 2}


@dataclass(frozen=True)
class TransportLink:
    peer_pop_id: str
    capacity_mbps: float
    latency_ms: float


@dataclass(frozen=True)
class Pop:
    pop_id: str
    kind: str  # cellSite | datacentre
    nfvi_capacity: int = 0  # 0 allowed for PNF-only sites
    hosted_rrh_ids: tuple[str, ...] = ()
    transport_links: tuple[TransportLink, ...] = ()

    def to_dict(self) -> dict:
        return {
            "popId": self.pop_id,
            "kind": self.kind,
            "nfviCapacity": self.nfvi_capacity,
            "hostedRrhIds": list(self.hosted_rrh_ids),
            "transportLinks": [
                {"peerPopId": l.peer_pop_id, "capacityMbps": l.capacity_mbps,
                 "latencyMs": l.latency_ms}
                for l in self.transport_links
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Pop":
        return cls(
            pop_id=d["popId"],
            kind=d.get("kind", POP_CELL_SITE),
            nfvi_capacity=int(d.get("nfviCapacity", 0)),
            hosted_rrh_ids=tuple(d.get("hostedRrhIds", [])),
            transport_links=tuple(
                TransportLink(l["peerPopId"], float(l["capacityMbps"]), float(l["latencyMs"]))
                for l in d.get("transportLinks", [])
            ),
        )


@dataclass(frozen=True)
class Rrh:
    rrh_id: str
    site_pop_id: str
    supported_bands: tuple[str, ...]
    max_carriers: int = 1

    def to_dict(self) -> dict:
        return {
            "rrhId": self.rrh_id,
            "sitePopId": self.site_pop_id,
            "supportedBands": list(self.supported_bands),
            "maxCarriers": self.max_carriers,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Rrh":
        return cls(
            rrh_id=d["rrhId"],
            site_pop_id=d["sitePopId"],
            supported_bands=tuple(d["supportedBands"]),
            max_carriers=int(d.get("maxCarriers", 1)),
        )


@dataclass(frozen=True)
class VnfProfile:
    vnf_id: str
    vnf_kind: str
    compute_units: int | None = None  # None = kind default
    placement_constraint: str | None = None  # pinned popId

    def to_dict(self) -> dict:
        d = {"vnfId": self.vnf_id, "vnfKind": self.vnf_kind}
        if self.compute_units is not None:
            d["computeUnits"] = self.compute_units
        if self.placement_constraint is not None:
            d["placementConstraint"] = self.placement_constraint
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "VnfProfile":
        return cls(
            vnf_id=d["vnfId"],
            vnf_kind=d["vnfKind"],
            compute_units=d.get("computeUnits"),
            placement_constraint=d.get("placementConstraint"),
        )


@dataclass(frozen=True)
class VirtualLink:
    endpoint_a: str  # vnfId or rrhId
    endpoint_b: str
    required_mbps: float

    def to_dict(self) -> dict:
        return {"endpointA": self.endpoint_a, "endpointB": self.endpoint_b,
                "requiredMbps": self.required_mbps}

    @classmethod
    def from_dict(cls, d: dict) -> "VirtualLink":
        return cls(d["endpointA"], d["endpointB"], float(d["requiredMbps"]))


@dataclass(frozen=True)
class Nsd:
    nsd_id: str
    vnf_profiles: tuple[VnfProfile, ...] = ()
    pnf_refs: tuple[str, ...] = ()  # RRH ids
    virtual_links: tuple[VirtualLink, ...] = ()
    scaling_rules: tuple[tuple[str, int], ...] = ()  # (vnfKind, maxInstances)

    def max_instances(self, vnf_kind: str) -> int:
        for kind, limit in self.scaling_rules:
            if kind == vnf_kind:
                return limit
        # No rule: the declared profiles are the only permitted instances.
        return sum(1 for p in self.vnf_profiles if p.vnf_kind == vnf_kind)

    def to_dict(self) -> dict:
        return {
            "nsdId": self.nsd_id,
            "vnfProfiles": [p.to_dict() for p in self.vnf_profiles],
            "pnfRefs": list(self.pnf_refs),
            "virtualLinks": [l.to_dict() for l in self.virtual_links],
            "scalingRules": [{"vnfKind": k, "maxInstances": m} for k, m in self.scaling_rules],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Nsd":
        return cls(
            nsd_id=d["nsdId"],
            vnf_profiles=tuple(VnfProfile.from_dict(p) for p in d.get("vnfProfiles", [])),
            pnf_refs=tuple(d.get("pnfRefs", [])),
            virtual_links=tuple(VirtualLink.from_dict(l) for l in d.get("virtualLinks", [])),
            scaling_rules=tuple(
                (r["vnfKind"], int(r["maxInstances"])) for r in d.get("scalingRules", [])
            ),
        )


@dataclass
class VnfInstance:
    vnf_instance_id: str
    vnf_kind: str
    pop_id: str
    compute_units: int

    def to_dict(self) -> dict:
        return {
            "vnfInstanceId": self.vnf_instance_id,
            "vnfKind": self.vnf_kind,
            "popId": self.pop_id,
            "computeUnits": self.compute_units,
        }


@dataclass
class LinkBinding:
    endpoint_a: str
    endpoint_b: str
    required_mbps: float
    path: tuple[str, ...]  # PoP hop sequence, both endpoints included

    def to_dict(self) -> dict:
        return {
            "endpointA": self.endpoint_a,
            "endpointB": self.endpoint_b,
            "requiredMbps": self.required_mbps,
            "path": list(self.path),
        }


@dataclass
class NsInstance:
    ns_instance_id: str
    nsd_ref: str
    vnf_instances: list[VnfInstance] = field(default_factory=list)
    link_bindings: list[LinkBinding] = field(default_factory=list)

    def vnf(self, vnf_id: str) -> VnfInstance | None:
        for v in self.vnf_instances:
            if v.vnf_instance_id == vnf_id:
                return v
        return None

    def to_dict(self) -> dict:
        return {
            "nsInstanceId": self.ns_instance_id,
            "nsdRef": self.nsd_ref,
            "vnfInstances": [v.to_dict() for v in self.vnf_instances],
            "linkBindings": [l.to_dict() for l in self.link_bindings],
        }


@dataclass
class CarrierBinding:
    cell_id: str
    ns_instance_id: str
    rrh_id: str
    band: str
    bandwidth_mhz: float
    serving_vnf_id: str | None = None

    def to_dict(self) -> dict:
        return {
            "cellId": self.cell_id,
            "nsInstanceId": self.ns_instance_id,
            "rrhId": self.rrh_id,
            "band": self.band,
            "bandwidthMHz": self.bandwidth_mhz,
            "servingVnfId": self.serving_vnf_id,
        }
