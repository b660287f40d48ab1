"""HTTP+JSON management API over a Runtime.

The app is a thin translation layer: JSON in, lifecycle/report calls on the
runtime, JSON out, domain errors mapped to HTTP status codes. All state
lives in the Runtime; the app itself is stateless.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse

from ranslicing.errors import (
    BandUnsupported,
    CarrierSlotsExhausted,
    CompensationFailed,
    GuaranteeInfeasible,
    InstanceInUse,
    InsufficientNfvi,
    InvariantViolation,
    ManagementError,
    NoFeasiblePath,
    OutOfOrderTick,
    ParseError,
    ProfileExhausted,
    RstUnknown,
    ScalingLimitExceeded,
    ScenarioValidationError,
    StaleVersion,
    UnknownNsd,
    UnknownObject,
    UnknownSlice,
    UnknownSubscription,
    UnknownTemplate,
    UnservableCell,
    WindowIncomplete,
)
from ranslicing.nrm.serialize import attrs_to_dict
from ranslicing.northbound.runtime import Runtime
from ranslicing.pmfm.service import SubscriptionFilter

_STATUS_BY_ERROR = (
    ((UnknownSlice, UnknownTemplate, UnknownObject, UnknownNsd,
      UnknownSubscription), 404),
    ((StaleVersion, GuaranteeInfeasible, InstanceInUse), 409),
    ((InsufficientNfvi, NoFeasiblePath, ScalingLimitExceeded, BandUnsupported,
      CarrierSlotsExhausted, UnservableCell, CompensationFailed), 422),
    ((InvariantViolation, ParseError, RstUnknown, ScenarioValidationError,
      WindowIncomplete, OutOfOrderTick, ProfileExhausted), 400),
)


def _status_for(exc: ManagementError) -> int:
    for types, status in _STATUS_BY_ERROR:
        if isinstance(exc, types):
            return status
    return 400


def _error_body(exc: ManagementError) -> dict:
    body = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, InvariantViolation):
        body["violations"] = [str(v) for v in exc.violations]
    if isinstance(exc, ScenarioValidationError):
        body["problems"] = exc.problems
    return body


def create_app(runtime: Runtime) -> FastAPI:
    app = FastAPI(title="ran-slicing management API", docs_url=None, redoc_url=None)

    @app.exception_handler(ManagementError)
    async def _management_error(request: Request, exc: ManagementError):
        return JSONResponse(status_code=_status_for(exc), content=_error_body(exc))

    # --- model ---------------------------------------------------------------

    @app.get("/model")
    def get_model():
        return runtime.export_model()

    @app.get("/ran-slices")
    def list_ran_slices():
        return [
            attrs_to_dict("RanSlice", rs.attrs) | {"objectVersion": rs.version}
            for rs in sorted(
                runtime.store.iter_kind("RanSlice"), key=lambda o: o.object_id
            )
        ]

    @app.get("/ran-slices/{slice_id}")
    def get_ran_slice(slice_id: str):
        rs = runtime.store.resolve_ran_slice(slice_id)
        if rs is None:
            raise UnknownSlice(slice_id)
        return attrs_to_dict("RanSlice", rs.attrs) | {"objectVersion": rs.version}

    # --- lifecycle -------------------------------------------------------------

    @app.post("/ran-slices", status_code=201)
    async def create_ran_slice(request: Request):
        body = await request.json()
        body["op"] = "createRsi"
        slice_id, record = runtime.apply_lcm_operation(body)
        return {"ranSliceId": slice_id, "operation": record.to_dict()}

    @app.patch("/ran-slices/{slice_id}")
    async def modify_ran_slice(slice_id: str, request: Request):
        body = await request.json()
        record = runtime.apply_lcm_operation(
            {"op": "modifyRsi", "ranSliceId": slice_id,
             "delta": body.get("delta", body), "force": body.get("force", False)}
        )
        return {"operation": record.to_dict()}

    @app.post("/ran-slices/{slice_id}/scale")
    async def scale_ran_slice(slice_id: str, request: Request):
        body = await request.json()
        record = runtime.apply_lcm_operation(
            {"op": "scaleRsiCapacity", "ranSliceId": slice_id,
             "plan": body.get("plan", body)}
        )
        return {"operation": record.to_dict()}

    @app.delete("/ran-slices/{slice_id}")
    async def terminate_ran_slice(slice_id: str, request: Request):
        release = request.query_params.get("releaseDedicatedResources", "false")
        record = runtime.apply_lcm_operation(
            {"op": "terminateRsi", "ranSliceId": slice_id,
             "releaseDedicatedResources": release.lower() in ("1", "true", "yes")}
        )
        return {"operation": record.to_dict()}

    @app.get("/operations")
    def list_operations():
        return [r.to_dict() for r in runtime.lcm.records]

    # --- simulation ---------------------------------------------------------------

    @app.post("/sim/step")
    def sim_step():
        result = runtime.step()
        return {
            "tick": result.tick,
            "cells": [c.to_dict() for c in result.cells],
            "notifications": [n.to_dict() for n in result.notifications],
            "sliceCompliance": result.slice_compliance,
        }

    @app.post("/sim/run")
    async def sim_run(request: Request):
        body = await request.json() if await request.body() else {}
        ticks = int(body.get("ticks", 1))
        executed = 0
        notifications = []
        for _ in range(ticks):
            try:
                result = runtime.step()
            except ProfileExhausted:
                break
            executed += 1
            notifications += [n.to_dict() for n in result.notifications]
        return {"ticksExecuted": executed, "lastTick": runtime.sim.tick - 1,
                "notifications": notifications}

    @app.post("/cells/{cell_id}/degrade")
    async def degrade(cell_id: str, request: Request):
        body = await request.json()
        runtime.degrade_cell(cell_id, float(body["factor"]))
        return {"cellId": cell_id, "factor": float(body["factor"])}

    @app.post("/cells/{cell_id}/restore")
    def restore(cell_id: str):
        runtime.restore_cell(cell_id)
        return {"cellId": cell_id}

    # --- PM/FM -------------------------------------------------------------------

    @app.get("/kpi-reports")
    def kpi_report(ranSliceId: str, startTick: int, endTick: int):
        report = runtime.pmfm.compute_kpi_report(ranSliceId, startTick, endTick)
        return report.to_dict()

    @app.get("/notifications")
    def notifications():
        return runtime.pmfm.notifications

    @app.post("/subscriptions", status_code=201)
    async def subscribe(request: Request):
        body = await request.json()
        sub_filter = SubscriptionFilter.from_dict(body.get("filter", {}))
        sub_id = runtime.pmfm.subscribe(sub_filter)
        return {"subscriptionId": sub_id, "filter": sub_filter.to_dict()}

    @app.get("/subscriptions/{sub_id}/events")
    def drain(sub_id: str):
        # Pull-style delivery: events queued since the last drain, as NDJSON.
        events = runtime.pmfm.drain(sub_id)
        payload = "".join(
            json.dumps(e, sort_keys=True, separators=(",", ":")) + "\n" for e in events
        )
        return StreamingResponse(iter([payload]), media_type="application/x-ndjson")

    @app.delete("/subscriptions/{sub_id}", status_code=204)
    def unsubscribe(sub_id: str):
        runtime.pmfm.unsubscribe(sub_id)

    return app
