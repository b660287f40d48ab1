"""Deterministic scenario execution and run-report artifacts."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ranslicing.errors import ProfileExhausted
from ranslicing.nrm.serialize import canonical_json
from ranslicing.northbound.runtime import Runtime
from ranslicing.northbound.scenario import (
    ACTION_DEGRADE,
    ACTION_END,
    ACTION_LCM,
    ACTION_RESTORE,
    Scenario,
    load_scenario,
)


@dataclass
class RunReport:
    final_model: dict
    result_log: list[str]  # canonical NDJSON lines
    kpi_reports: list[dict]
    lcm_records: list[dict]
    notifications: list[dict]
    ticks_executed: int
    infrastructure: dict
    errors: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "ticksExecuted": self.ticks_executed,
            "kpiReports": self.kpi_reports,
            "lcmRecords": self.lcm_records,
            "notificationCount": len(self.notifications),
            "infrastructure": self.infrastructure,
            "errors": self.errors,
        }


def execute_scenario(scenario: Scenario, continue_on_error: bool = False) -> tuple[Runtime, RunReport]:
    """Run the timeline to completion on a fresh runtime."""
    runtime = Runtime(scenario)
    result_log: list[str] = []
    errors: list[dict] = []

    events = sorted(
        enumerate(scenario.timeline), key=lambda pair: (pair[1].tick, pair[0])
    )
    end_tick = None
    for _, ev in events:
        if ev.action == ACTION_END:
            end_tick = ev.tick

    event_queue = [(i, ev) for i, ev in events if ev.action != ACTION_END]
    queue_pos = 0
    tick = 0
    while end_tick is None or tick < end_tick:
        while queue_pos < len(event_queue) and event_queue[queue_pos][1].tick <= tick:
            _, ev = event_queue[queue_pos]
            queue_pos += 1
            try:
                _apply_event(runtime, ev)
            except Exception as exc:
                if not continue_on_error:
                    raise
                errors.append({"tick": tick, "event": ev.to_dict(), "error": str(exc)})
        try:
            result = runtime.step()
        except ProfileExhausted:
            break
        for cell in result.cells:
            line = dict(cell.to_dict())
            line["type"] = "allocation"
            line["tick"] = result.tick
            result_log.append(canonical_json(line))
        for record in result.slice_compliance:
            line = dict(record)
            line["type"] = "sliceCompliance"
            result_log.append(canonical_json(line))
        for notification in result.notifications:
            line = notification.to_dict()
            line["type"] = "notification"
            result_log.append(canonical_json(line))
        tick += 1

    kpi_reports = []
    for window in scenario.kpi_report_windows:
        report = runtime.pmfm.compute_kpi_report(
            window["ranSliceId"], int(window["startTick"]), int(window["endTick"])
        )
        d = report.to_dict()
        if window.get("label"):
            d["label"] = window["label"]
        kpi_reports.append(d)

    report = RunReport(
        final_model=runtime.export_model(),
        result_log=result_log,
        kpi_reports=kpi_reports,
        lcm_records=[r.to_dict() for r in runtime.lcm.records],
        notifications=list(runtime.pmfm.notifications),
        ticks_executed=tick,
        infrastructure=runtime.infra.to_dict(),
        errors=errors,
    )
    return runtime, report


def _apply_event(runtime: Runtime, ev) -> None:
    if ev.action == ACTION_LCM:
        runtime.apply_lcm_operation(ev.payload["operation"])
    elif ev.action == ACTION_DEGRADE:
        runtime.degrade_cell(ev.payload["cellId"], float(ev.payload["factor"]))
    elif ev.action == ACTION_RESTORE:
        runtime.restore_cell(ev.payload["cellId"])


def run_scenario(scenario_path: str | Path, output_dir: str | Path,
                 continue_on_error: bool = False) -> RunReport:
    """Validate, execute and write all artifacts; returns the report."""
    scenario = load_scenario(scenario_path)
    runtime, report = execute_scenario(scenario, continue_on_error=continue_on_error)

    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "final-model.json").write_text(
        canonical_json(report.final_model) + "\n", encoding="utf-8"
    )
    (out / "result-log.ndjson").write_text(
        "".join(line + "\n" for line in report.result_log), encoding="utf-8"
    )
    (out / "notifications.ndjson").write_text(
        "".join(canonical_json(n) + "\n" for n in report.notifications), encoding="utf-8"
    )
    (out / "kpi-reports.json").write_text(
        canonical_json(report.kpi_reports) + "\n", encoding="utf-8"
    )
    (out / "lcm-records.json").write_text(
        canonical_json(report.lcm_records) + "\n", encoding="utf-8"
    )
    (out / "run-report.json").write_text(
        canonical_json(report.to_dict()) + "\n", encoding="utf-8"
    )
    return report
