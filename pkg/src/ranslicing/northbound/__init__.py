"""Northbound interfaces: scenario files, runner, HTTP API and CLI."""

from ranslicing.northbound.diff import diff_models
from ranslicing.northbound.runner import RunReport, execute_scenario, run_scenario
from ranslicing.northbound.runtime import Runtime
from ranslicing.northbound.scenario import (
    Scenario,
    TimelineEvent,
    load_scenario,
    parse_scenario,
    validate_scenario,
)

__all__ = [
    "RunReport",
    "Runtime",
    "Scenario",
    "TimelineEvent",
    "diff_models",
    "execute_scenario",
    "load_scenario",
    "parse_scenario",
    "run_scenario",
    "validate_scenario",
]
