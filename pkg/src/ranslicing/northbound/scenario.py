"""Scenario file: declarative description of one end-to-end run.

A scenario bundles the simulated infrastructure, NSD catalog, initial model,
slice templates, offered-load traces and a timed event list. It validates
fully before anything executes: an invalid file mutates nothing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ranslicing.errors import ParseError, ScenarioValidationError
from ranslicing.enforcement.simulator import LoadTrace, SimConfig, window_ticks
from ranslicing.infra.types import Nsd, Pop, Rrh
from ranslicing.infra.manager import validate_nsd
from ranslicing.lifecycle.templates import RanSliceTemplate
from ranslicing.nrm.types import DEFAULT_RST_CATALOG, AuthorisedLoad, NetworkId

ACTION_LCM = "lcmOperation"
ACTION_DEGRADE = "degradeCell"
ACTION_RESTORE = "restoreCell"
ACTION_END = "endSimulation"

LCM_OPS = ("createRsi", "modifyRsi", "scaleRsiCapacity", "terminateRsi")


@dataclass
class TimelineEvent:
    tick: int
    action: str
    payload: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"tick": self.tick, "action": self.action, **self.payload}


@dataclass
class Scenario:
    sim_config: SimConfig
    pops: list[Pop]
    rrhs: list[Rrh]
    nsds: list[Nsd]
    rst_catalog: tuple[str, ...]
    area_tags: dict[str, list[str]]
    subnetwork_id: str
    managed_elements: list[dict]
    ns_instances: list[dict]
    cells: list[dict]
    templates: list[RanSliceTemplate]
    initial_operations: list[dict]
    load_traces: list[LoadTrace]
    timeline: list[TimelineEvent]
    kpi_report_windows: list[dict]
    raw: dict = field(default_factory=dict)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc), location=str(path)) from None
    return parse_scenario(raw)


def parse_scenario(raw: dict) -> Scenario:
    problems: list[str] = []

    def guard(fn, where: str, default):
        try:
            return fn()
        except (KeyError, TypeError, ValueError, ParseError) as exc:
            problems.append(f"{where}: {exc}")
            return default

    sim_raw = raw.get("simConfig", {})
    sim_config = SimConfig(
        tick_duration_s=float(sim_raw.get("tickDurationS", 1.0)),
        spectral_efficiency_bps_per_hz=float(sim_raw.get("spectralEfficiencyBpsPerHz", 5.0)),
        seed=int(sim_raw.get("seed", 0)),
    )

    infra_raw = raw.get("infrastructure", {})
    pops = guard(lambda: [Pop.from_dict(p) for p in infra_raw.get("pops", [])], "pops", [])
    rrhs = guard(lambda: [Rrh.from_dict(r) for r in infra_raw.get("rrhs", [])], "rrhs", [])
    nsds = guard(lambda: [Nsd.from_dict(n) for n in raw.get("nsds", [])], "nsds", [])
    templates = guard(
        lambda: [RanSliceTemplate.from_dict(t) for t in raw.get("templates", [])],
        "templates", [],
    )
    load_traces = guard(
        lambda: [LoadTrace.from_dict(t) for t in raw.get("loadProfiles", [])],
        "loadProfiles", [],
    )

    timeline = []
    last_tick = -1
    for i, ev in enumerate(raw.get("eventTimeline", [])):
        where = f"eventTimeline[{i}]"
        action = ev.get("action")
        tick = ev.get("tick")
        if action not in (ACTION_LCM, ACTION_DEGRADE, ACTION_RESTORE, ACTION_END):
            problems.append(f"{where}: unknown action {action!r}")
            continue
        if not isinstance(tick, int) or tick < 0:
            problems.append(f"{where}: tick must be a non-negative integer")
            continue
        if tick < last_tick:
            problems.append(f"{where}: timeline ticks must be non-decreasing")
        last_tick = max(last_tick, tick)
        payload = {k: v for k, v in ev.items() if k not in ("tick", "action")}
        timeline.append(TimelineEvent(tick=tick, action=action, payload=payload))

    scenario = Scenario(
        sim_config=sim_config,
        pops=pops,
        rrhs=rrhs,
        nsds=nsds,
        rst_catalog=tuple(raw.get("rstCatalog", DEFAULT_RST_CATALOG)),
        area_tags={k: list(v) for k, v in (raw.get("areaTags") or {}).items()},
        subnetwork_id=raw.get("subnetworkId", "SN#1"),
        managed_elements=list(raw.get("managedElements", [])),
        ns_instances=list(raw.get("nsInstances", [])),
        cells=list(raw.get("cells", [])),
        templates=templates,
        initial_operations=list(raw.get("initialOperations", [])),
        load_traces=load_traces,
        timeline=timeline,
        kpi_report_windows=list(raw.get("kpiReportWindows", [])),
        raw=raw,
    )
    problems += validate_scenario(scenario)
    if problems:
        raise ScenarioValidationError(problems)
    return scenario


def validate_scenario(s: Scenario) -> list[str]:
    problems: list[str] = []
    pop_ids = {p.pop_id for p in s.pops}
    rrh_ids = {r.rrh_id for r in s.rrhs}
    nsd_ids = {n.nsd_id for n in s.nsds}
    instance_ids = {i.get("nsInstanceId") for i in s.ns_instances}
    function_ids = {
        fn.get("functionId")
        for me in s.managed_elements
        for fn in me.get("gnbFunctions", [])
    }
    cell_ids = {c.get("cellId") for c in s.cells}
    template_ids = {t.template_id for t in s.templates}

    for rrh in s.rrhs:
        if rrh.site_pop_id not in pop_ids:
            problems.append(f"rrh {rrh.rrh_id}: unknown site PoP {rrh.site_pop_id}")
    for nsd in s.nsds:
        problems += validate_nsd(nsd, rrh_ids)
    for inst in s.ns_instances:
        if inst.get("nsdId") not in nsd_ids:
            problems.append(f"nsInstance {inst.get('nsInstanceId')}: unknown NSD {inst.get('nsdId')}")
    for cell in s.cells:
        where = f"cell {cell.get('cellId')}"
        if cell.get("gnbFunctionId") not in function_ids:
            problems.append(f"{where}: unknown gnbFunctionId {cell.get('gnbFunctionId')}")
        if cell.get("rrhId") not in rrh_ids:
            problems.append(f"{where}: unknown rrhId {cell.get('rrhId')}")
        if cell.get("nsInstanceId") not in instance_ids:
            problems.append(f"{where}: unknown nsInstanceId {cell.get('nsInstanceId')}")

    for template in s.templates:
        if template.rst not in s.rst_catalog:
            problems.append(
                f"template {template.template_id}: RST {template.rst!r} not in catalog"
            )
        coverage = template.resolve_coverage(s.area_tags)
        unknown = set(coverage) - cell_ids
        # Coverage may point at cells the timeline creates later only when
        # resolved through an area tag at execution time; explicit lists must
        # resolve up front.
        if template.coverage_cells and unknown:
            problems.append(
                f"template {template.template_id}: unknown cells {sorted(unknown)}"
            )
        for entry in template.default_authorised_load.entries:
            try:
                window_ticks(entry.averaging_window_s, s.sim_config.tick_duration_s)
            except Exception as exc:
                problems.append(f"template {template.template_id}: {exc}")

    def check_lcm(op: dict, where: str, known_slices: set[str]) -> None:
        kind = op.get("op")
        if kind not in LCM_OPS:
            problems.append(f"{where}: unknown lcm op {kind!r}")
            return
        if kind == "createRsi":
            if op.get("templateId") not in template_ids:
                problems.append(f"{where}: unknown templateId {op.get('templateId')!r}")
            try:
                nids = [NetworkId.from_dict(n) for n in op.get("networkIds", [])]
                if not nids:
                    problems.append(f"{where}: networkIds must be non-empty")
            except (KeyError, TypeError, ValueError) as exc:
                problems.append(f"{where}: bad networkIds: {exc}")
            for al_key in ("alOverride",):
                if op.get(al_key) is not None:
                    try:
                        al = AuthorisedLoad.from_dict(op[al_key])
                        for e in al.entries:
                            window_ticks(e.averaging_window_s, s.sim_config.tick_duration_s)
                    except Exception as exc:
                        problems.append(f"{where}: bad {al_key}: {exc}")
            if op.get("ranSliceId"):
                known_slices.add(op["ranSliceId"])
        elif kind in ("modifyRsi", "scaleRsiCapacity", "terminateRsi"):
            if not op.get("ranSliceId"):
                problems.append(f"{where}: ranSliceId required")

    known_slices: set[str] = set()
    for i, op in enumerate(s.initial_operations):
        check_lcm(op, f"initialOperations[{i}]", known_slices)
    for i, ev in enumerate(s.timeline):
        where = f"eventTimeline[{i}]"
        if ev.action == ACTION_LCM:
            check_lcm(ev.payload.get("operation", {}), where, known_slices)
        elif ev.action in (ACTION_DEGRADE, ACTION_RESTORE):
            if ev.payload.get("cellId") not in cell_ids:
                # Cells created by a scale-out can legitimately be degraded
                # later; only flag ids that appear nowhere at all.
                planned = {
                    e.payload.get("operation", {}).get("plan", {}).get("cell", {}).get("cellId")
                    for e in s.timeline
                    if e.action == ACTION_LCM
                }
                if ev.payload.get("cellId") not in planned:
                    problems.append(f"{where}: unknown cellId {ev.payload.get('cellId')!r}")
            if ev.action == ACTION_DEGRADE:
                factor = ev.payload.get("factor")
                if not isinstance(factor, (int, float)) or not 0 <= factor <= 1:
                    problems.append(f"{where}: factor must be in [0,1]")

    ends = [ev for ev in s.timeline if ev.action == ACTION_END]
    if len(ends) > 1:
        problems.append("eventTimeline: more than one endSimulation event")

    for trace in s.load_traces:
        planned_cells = cell_ids | {
            e.payload.get("operation", {}).get("plan", {}).get("cell", {}).get("cellId")
            for e in s.timeline
            if e.action == ACTION_LCM
        }
        if trace.cell_id not in planned_cells:
            problems.append(f"loadProfiles: unknown cellId {trace.cell_id!r}")

    return problems
