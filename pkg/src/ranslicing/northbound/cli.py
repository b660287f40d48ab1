"""Command-line entry points for running, serving and inspecting scenarios."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ranslicing.errors import ManagementError
from ranslicing.nrm.serialize import canonical_json
from ranslicing.northbound.diff import diff_models
from ranslicing.northbound.runner import run_scenario
from ranslicing.northbound.scenario import load_scenario


@click.group()
def main():
    """Manage simulated RAN slices: run scenarios, serve the API, inspect runs."""


@main.command()
@click.argument("scenario", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Directory for run artifacts.")
@click.option("--continue-on-error", is_flag=True,
              help="Record failed timeline events instead of aborting.")
def run(scenario, out_dir, continue_on_error):
    """Execute SCENARIO deterministically and write artifacts to --out."""
    try:
        report = run_scenario(scenario, out_dir, continue_on_error=continue_on_error)
    except ManagementError as exc:
        raise click.ClickException(str(exc)) from None
    click.echo(
        json.dumps(
            {
                "ticksExecuted": report.ticks_executed,
                "notifications": len(report.notifications),
                "lcmOperations": len(report.lcm_records),
                "kpiReports": len(report.kpi_reports),
                "outputDir": str(Path(out_dir)),
            },
            sort_keys=True,
        )
    )


@main.command()
@click.argument("scenario", type=click.Path(exists=True, dir_okay=False))
def validate(scenario):
    """Validate SCENARIO without executing it."""
    try:
        load_scenario(scenario)
    except ManagementError as exc:
        problems = getattr(exc, "problems", None) or [str(exc)]
        for problem in problems:
            click.echo(f"INVALID: {problem}", err=True)
        sys.exit(1)
    click.echo("OK")


@main.command()
@click.option("--config", "scenario", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Scenario file defining infrastructure and initial model.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True, type=int)
def serve(scenario, host, port):
    """Serve the management API over an initialized runtime."""
    import uvicorn

    from ranslicing.northbound.api import create_app
    from ranslicing.northbound.runtime import Runtime

    try:
        runtime = Runtime(load_scenario(scenario))
    except ManagementError as exc:
        raise click.ClickException(str(exc)) from None
    uvicorn.run(create_app(runtime), host=host, port=port, log_level="warning")


@main.command()
@click.argument("run_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--slice", "slice_id", default=None,
              help="Only show reports for this RAN slice.")
def report(run_dir, slice_id):
    """Print the KPI reports stored in RUN_DIR."""
    path = Path(run_dir) / "kpi-reports.json"
    if not path.exists():
        raise click.ClickException(f"no kpi-reports.json in {run_dir}")
    reports = json.loads(path.read_text(encoding="utf-8"))
    if slice_id is not None:
        reports = [r for r in reports if r.get("ranSliceId") == slice_id]
    click.echo(json.dumps(reports, indent=2, sort_keys=True))


@main.command("diff-model")
@click.argument("model_a", type=click.Path(exists=True, dir_okay=False))
@click.argument("model_b", type=click.Path(exists=True, dir_okay=False))
def diff_model(model_a, model_b):
    """Structurally diff two exported model files; exit 1 if they differ."""
    a = json.loads(Path(model_a).read_text(encoding="utf-8"))
    b = json.loads(Path(model_b).read_text(encoding="utf-8"))
    result = diff_models(a, b)
    click.echo(canonical_json(result))
    if not result["identical"]:
        sys.exit(1)


if __name__ == "__main__":
    main()
