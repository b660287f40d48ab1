"""Minimal MANO over the simulated infrastructure.

Handles NS instantiation/scaling/termination with deterministic placement
(pins first, then first-fit by descending free capacity, popId tie-break)
and transport routing (lowest-latency feasible path). All mutations are
atomic: a failed operation leaves capacities untouched.
"""

from __future__ import annotations

import copy
import itertools
from dataclasses import dataclass

import networkx as nx

from ranslicing.errors import (
    BandUnsupported,
    CarrierSlotsExhausted,
    InstanceInUse,
    InsufficientNfvi,
    InvariantViolation,
    NoFeasiblePath,
    ScalingLimitExceeded,
    UnknownNsd,
    UnknownObject,
)
from ranslicing.infra.types import (
    DEFAULT_COMPUTE_UNITS,
    CarrierBinding,
    LinkBinding,
    Nsd,
    NsInstance,
    Pop,
    Rrh,
    VirtualLink,
    VnfInstance,
    VnfProfile,
)


def validate_nsd(nsd: Nsd, known_rrh_ids: set[str]) -> list[str]:
    problems = []
    declared = {p.vnf_id for p in nsd.vnf_profiles}
    if len(declared) != len(nsd.vnf_profiles):
        problems.append(f"{nsd.nsd_id}: duplicate vnfId in profiles")
    unknown_pnfs = set(nsd.pnf_refs) - known_rrh_ids
    if unknown_pnfs:
        problems.append(f"{nsd.nsd_id}: unknown PNF refs {sorted(unknown_pnfs)}")
    endpoints = declared | set(nsd.pnf_refs)
    for link in nsd.virtual_links:
        for ep in (link.endpoint_a, link.endpoint_b):
            if ep not in endpoints:
                problems.append(
                    f"{nsd.nsd_id}: virtual link endpoint {ep!r} not a declared VNF or PNF"
                )
    for profile in nsd.vnf_profiles:
        if profile.vnf_kind != "gNB-DU":
            continue
        peers = set()
        for link in nsd.virtual_links:
            if link.endpoint_a == profile.vnf_id:
                peers.add(link.endpoint_b)
            elif link.endpoint_b == profile.vnf_id:
                peers.add(link.endpoint_a)
        kinds = {p.vnf_kind for p in nsd.vnf_profiles if p.vnf_id in peers}
        if not peers & set(nsd.pnf_refs):
            problems.append(f"{nsd.nsd_id}: gNB-DU {profile.vnf_id} has no link to an RRH")
        if "gNB-CU" not in kinds:
            problems.append(f"{nsd.nsd_id}: gNB-DU {profile.vnf_id} has no link to a gNB-CU")
    return problems


@dataclass
class ScaleStep:
    """One VNF added to a running instance, plus the links it brings."""

    vnf_id: str
    vnf_kind: str
    pop_id: str
    new_links: tuple[VirtualLink, ...] = ()


class Infrastructure:
    """Owns PoPs, RRHs, NSD catalog and running NS instances."""

    def __init__(self, pops, rrhs, nsds, compute_units=None):
        self.pops: dict[str, Pop] = {p.pop_id: p for p in pops}
        self.rrhs: dict[str, Rrh] = {r.rrh_id: r for r in rrhs}
        self.nsds: dict[str, Nsd] = {n.nsd_id: n for n in nsds}
        self.compute_units = dict(DEFAULT_COMPUTE_UNITS)
        if compute_units:
            self.compute_units.update(compute_units)

        self._check_topology()
        self.free_nfvi: dict[str, int] = {
            p.pop_id: p.nfvi_capacity for p in self.pops.values()
        }
        # Residual transport capacity per undirected edge.
        self.free_link: dict[frozenset, float] = {}
        self.latency: dict[frozenset, float] = {}
        for pop in self.pops.values():
            for link in pop.transport_links:
                edge = frozenset((pop.pop_id, link.peer_pop_id))
                self.free_link[edge] = link.capacity_mbps
                self.latency[edge] = link.latency_ms

        self.instances: dict[str, NsInstance] = {}
        self.bindings: dict[str, CarrierBinding] = {}
        self._instance_seq = itertools.count(1)

        for nsd in self.nsds.values():
            problems = validate_nsd(nsd, set(self.rrhs))
            if problems:
                raise InvariantViolation(problems)

    def _check_topology(self) -> None:
        problems = []
        seen: dict[tuple, tuple] = {}
        for pop in self.pops.values():
            for link in pop.transport_links:
                if link.peer_pop_id not in self.pops:
                    problems.append(f"{pop.pop_id}: link to unknown PoP {link.peer_pop_id}")
                    continue
                seen[(pop.pop_id, link.peer_pop_id)] = (link.capacity_mbps, link.latency_ms)
            if pop.nfvi_capacity < 0:
                problems.append(f"{pop.pop_id}: negative NFVI capacity")
        for (a, b), params in seen.items():
            if seen.get((b, a)) != params:
                problems.append(f"transport link {a}->{b} is not symmetric")
        for rrh in self.rrhs.values():
            if rrh.site_pop_id not in self.pops:
                problems.append(f"{rrh.rrh_id}: unknown site PoP {rrh.site_pop_id}")
            if not rrh.supported_bands:
                problems.append(f"{rrh.rrh_id}: supported band list is empty")
        if problems:
            raise InvariantViolation(problems)

    # --- state management ----------------------------------------------------

    def checkpoint(self):
        return copy.deepcopy(
            (self.free_nfvi, self.free_link, self.instances, self.bindings)
        )

    def restore(self, cp) -> None:
        self.free_nfvi, self.free_link, self.instances, self.bindings = copy.deepcopy(cp)

    def to_dict(self) -> dict:
        return {
            "pops": [self.pops[k].to_dict() for k in sorted(self.pops)],
            "rrhs": [self.rrhs[k].to_dict() for k in sorted(self.rrhs)],
            "nsds": [self.nsds[k].to_dict() for k in sorted(self.nsds)],
            "freeNfvi": dict(sorted(self.free_nfvi.items())),
            "nsInstances": [self.instances[k].to_dict() for k in sorted(self.instances)],
            "carrierBindings": [self.bindings[k].to_dict() for k in sorted(self.bindings)],
        }

    # --- helpers ---------------------------------------------------------------

    def units_for(self, profile: VnfProfile) -> int:
        if profile.compute_units is not None:
            return profile.compute_units
        return self.compute_units.get(profile.vnf_kind, 1)

    def _debit_pop(self, pop_id: str, units: int) -> None:
        if pop_id not in self.pops:
            raise UnknownObject(pop_id)
        free = self.free_nfvi[pop_id]
        if units > free:
            raise InsufficientNfvi(pop_id, units, free)
        self.free_nfvi[pop_id] = free - units

    def _pick_pop(self, units: int) -> str:
        candidates = sorted(
            self.free_nfvi.items(), key=lambda kv: (-kv[1], kv[0])
        )
        for pop_id, free in candidates:
            if free >= units:
                return pop_id
        best = candidates[0][0] if candidates else "<none>"
        raise InsufficientNfvi(best, units, self.free_nfvi.get(best, 0))

    def _endpoint_pop(self, instance: NsInstance, endpoint: str) -> str:
        vnf = instance.vnf(endpoint)
        if vnf is not None:
            return vnf.pop_id
        rrh = self.rrhs.get(endpoint)
        if rrh is not None:
            return rrh.site_pop_id
        raise UnknownObject(endpoint)

    def _route(self, pop_a: str, pop_b: str, required_mbps: float):
        """Lowest-latency simple path whose bottleneck covers the demand."""
        if pop_a == pop_b:
            return (pop_a,)
        graph = nx.Graph()
        graph.add_nodes_from(self.pops)
        for edge, free in self.free_link.items():
            a, b = sorted(edge)
            graph.add_edge(a, b, free=free, latency=self.latency[edge])
        best = None
        for path in nx.all_simple_paths(graph, pop_a, pop_b):
            edges = [frozenset(e) for e in zip(path, path[1:])]
            bottleneck = min(self.free_link[e] for e in edges)
            if bottleneck < required_mbps:
                continue
            latency = sum(self.latency[e] for e in edges)
            key = (latency, tuple(path))
            if best is None or key < best[0]:
                best = (key, tuple(path))
        if best is None:
            raise NoFeasiblePath(pop_a, pop_b, required_mbps)
        return best[1]

    def _realize_link(self, instance: NsInstance, link: VirtualLink) -> LinkBinding:
        pop_a = self._endpoint_pop(instance, link.endpoint_a)
        pop_b = self._endpoint_pop(instance, link.endpoint_b)
        path = self._route(pop_a, pop_b, link.required_mbps)
        for edge in (frozenset(e) for e in zip(path, path[1:])):
            self.free_link[edge] -= link.required_mbps
        binding = LinkBinding(link.endpoint_a, link.endpoint_b, link.required_mbps, path)
        instance.link_bindings.append(binding)
        return binding

    def _release_link(self, instance: NsInstance, binding: LinkBinding) -> None:
        for edge in (frozenset(e) for e in zip(binding.path, binding.path[1:])):
            self.free_link[edge] += binding.required_mbps
        instance.link_bindings.remove(binding)

    # --- operations ----------------------------------------------------------

    def instantiate_ns(
        self, nsd_id: str, placement_hints: dict[str, str] | None = None,
        ns_instance_id: str | None = None,
    ) -> NsInstance:
        """Place the NSD's VNFs, route its virtual links, debit capacity."""
        nsd = self.nsds.get(nsd_id)
        if nsd is None:
            raise UnknownNsd(nsd_id)
        hints = placement_hints or {}
        instance_id = ns_instance_id or f"ns-{next(self._instance_seq)}"
        if instance_id in self.instances:
            raise InvariantViolation([f"duplicate NS instance id {instance_id!r}"])

        cp = self.checkpoint()
        try:
            instance = NsInstance(ns_instance_id=instance_id, nsd_ref=nsd_id)
            for profile in nsd.vnf_profiles:
                units = self.units_for(profile)
                pop_id = profile.placement_constraint or hints.get(profile.vnf_id)
                if pop_id is None:
                    pop_id = self._pick_pop(units)
                self._debit_pop(pop_id, units)
                instance.vnf_instances.append(
                    VnfInstance(profile.vnf_id, profile.vnf_kind, pop_id, units)
                )
            for link in nsd.virtual_links:
                self._realize_link(instance, link)
            self.instances[instance_id] = instance
            return instance
        except Exception:
            self.restore(cp)
            raise

    def scale_ns(self, ns_instance_id: str, step: ScaleStep) -> NsInstance:
        """Add one VNF (and its links) to a running instance."""
        instance = self.instances.get(ns_instance_id)
        if instance is None:
            raise UnknownObject(ns_instance_id)
        nsd = self.nsds[instance.nsd_ref]
        current = sum(1 for v in instance.vnf_instances if v.vnf_kind == step.vnf_kind)
        limit = nsd.max_instances(step.vnf_kind)
        if current + 1 > limit:
            raise ScalingLimitExceeded(step.vnf_kind, limit)
        if instance.vnf(step.vnf_id) is not None:
            raise InvariantViolation([f"duplicate vnfId {step.vnf_id!r} in {ns_instance_id}"])

        cp = self.checkpoint()
        try:
            units = self.compute_units.get(step.vnf_kind, 1)
            self._debit_pop(step.pop_id, units)
            instance = self.instances[ns_instance_id]
            instance.vnf_instances.append(
                VnfInstance(step.vnf_id, step.vnf_kind, step.pop_id, units)
            )
            for link in step.new_links:
                self._realize_link(instance, link)
            return instance
        except Exception:
            self.restore(cp)
            raise

    def unscale_ns(self, ns_instance_id: str, vnf_id: str) -> None:
        """Inverse of scale_ns: drop the VNF, credit its PoP and links."""
        instance = self.instances.get(ns_instance_id)
        if instance is None:
            raise UnknownObject(ns_instance_id)
        vnf = instance.vnf(vnf_id)
        if vnf is None:
            raise UnknownObject(vnf_id)
        for binding in [
            b for b in instance.link_bindings if vnf_id in (b.endpoint_a, b.endpoint_b)
        ]:
            self._release_link(instance, binding)
        instance.vnf_instances.remove(vnf)
        self.free_nfvi[vnf.pop_id] += vnf.compute_units

    def terminate_ns(self, ns_instance_id: str) -> dict:
        """Tear down an instance nothing depends on; returns the credit report."""
        instance = self.instances.get(ns_instance_id)
        if instance is None:
            raise UnknownObject(ns_instance_id)
        cells = sorted(
            b.cell_id for b in self.bindings.values() if b.ns_instance_id == ns_instance_id
        )
        if cells:
            raise InstanceInUse(ns_instance_id, cells)
        credited: dict[str, int] = {}
        for vnf in instance.vnf_instances:
            self.free_nfvi[vnf.pop_id] += vnf.compute_units
            credited[vnf.pop_id] = credited.get(vnf.pop_id, 0) + vnf.compute_units
        for binding in list(instance.link_bindings):
            self._release_link(instance, binding)
        del self.instances[ns_instance_id]
        return {
            "nsInstanceId": ns_instance_id,
            "creditedComputeUnits": dict(sorted(credited.items())),
            "totalUnits": sum(credited.values()),
        }

    def bind_cell_resources(
        self, cell_id: str, ns_instance_id: str, rrh_id: str, band: str,
        bandwidth_mhz: float, serving_vnf_id: str | None = None,
    ) -> CarrierBinding:
        """Reserve a carrier slot on the RRH and mark the cell servable."""
        instance = self.instances.get(ns_instance_id)
        if instance is None:
            raise UnknownObject(ns_instance_id)
        rrh = self.rrhs.get(rrh_id)
        if rrh is None:
            raise UnknownObject(rrh_id)
        if band not in rrh.supported_bands:
            raise BandUnsupported(rrh_id, band)
        active = sum(1 for b in self.bindings.values() if b.rrh_id == rrh_id)
        if active >= rrh.max_carriers:
            raise CarrierSlotsExhausted(rrh_id, rrh.max_carriers)
        if cell_id in self.bindings:
            raise InvariantViolation([f"cell {cell_id} already bound"])
        serving = [v for v in instance.vnf_instances if v.vnf_kind in ("gNB", "gNB-DU")]
        if not serving:
            raise InvariantViolation(
                [f"NS instance {ns_instance_id} has no gNB or gNB-DU to serve a cell"]
            )
        if serving_vnf_id is not None and instance.vnf(serving_vnf_id) is None:
            raise UnknownObject(serving_vnf_id)
        binding = CarrierBinding(
            cell_id=cell_id, ns_instance_id=ns_instance_id, rrh_id=rrh_id,
            band=band, bandwidth_mhz=bandwidth_mhz, serving_vnf_id=serving_vnf_id,
        )
        self.bindings[cell_id] = binding
        return binding

    def release_cell_binding(self, cell_id: str) -> None:
        if cell_id not in self.bindings:
            raise UnknownObject(cell_id)
        del self.bindings[cell_id]

    def is_cell_servable(self, cell_id: str) -> bool:
        return cell_id in self.bindings
