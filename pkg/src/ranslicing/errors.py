"""Exception hierarchy shared by all subsystems.

Every error that crosses a module boundary is a subclass of ManagementError,
so callers (CLI, HTTP API, scenario runner) can map failures uniformly.
"""

from __future__ import annotations


class ManagementError(Exception):
    """Base class for all domain errors."""


# --- model store ---------------------------------------------------------

class UnknownObject(ManagementError):
    def __init__(self, ref: str):
        super().__init__(f"unknown object: {ref}")
        self.ref = ref


class UnknownParent(ManagementError):
    def __init__(self, ref: str):
        super().__init__(f"unknown parent: {ref}")
        self.ref = ref


class IllegalContainment(ManagementError):
    def __init__(self, parent_kind: str, child_kind: str):
        super().__init__(f"{child_kind} may not be created under {parent_kind}")
        self.parent_kind = parent_kind
        self.child_kind = child_kind


class InvariantViolation(ManagementError):
    """Carries the full list of violated rules, not just the first one."""

    def __init__(self, violations):
        self.violations = list(violations)
        details = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invariant violation: {details}")


class StaleVersion(ManagementError):
    def __init__(self, ref: str, expected: int, actual: int):
        super().__init__(
            f"stale version for {ref}: update based on v{expected}, object is at v{actual}"
        )
        self.ref = ref
        self.expected = expected
        self.actual = actual


class ParseError(ManagementError):
    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"parse error at {location or '<document>'}: {message}")


# --- infrastructure / MANO ------------------------------------------------

class UnknownNsd(ManagementError):
    def __init__(self, nsd_id: str):
        super().__init__(f"unknown NSD: {nsd_id}")
        self.nsd_id = nsd_id


class InsufficientNfvi(ManagementError):
    def __init__(self, pop_id: str, needed: int, free: int):
        super().__init__(f"insufficient NFVI at {pop_id}: need {needed}, free {free}")
        self.pop_id = pop_id
        self.needed = needed
        self.free = free


class NoFeasiblePath(ManagementError):
    def __init__(self, endpoint_a: str, endpoint_b: str, required_mbps: float):
        super().__init__(
            f"no feasible transport path {endpoint_a}<->{endpoint_b} "
            f"with {required_mbps} Mbps"
        )
        self.endpoint_a = endpoint_a
        self.endpoint_b = endpoint_b
        self.required_mbps = required_mbps


class ScalingLimitExceeded(ManagementError):
    def __init__(self, vnf_kind: str, limit: int):
        super().__init__(f"scaling limit exceeded for {vnf_kind}: max {limit} instances")
        self.vnf_kind = vnf_kind
        self.limit = limit


class InstanceInUse(ManagementError):
    def __init__(self, ns_instance_id: str, cell_ids):
        self.cell_ids = list(cell_ids)
        super().__init__(
            f"NS instance {ns_instance_id} still serves cells: {', '.join(self.cell_ids)}"
        )


class BandUnsupported(ManagementError):
    def __init__(self, rrh_id: str, band: str):
        super().__init__(f"RRH {rrh_id} does not support band {band}")
        self.rrh_id = rrh_id
        self.band = band


class CarrierSlotsExhausted(ManagementError):
    def __init__(self, rrh_id: str, max_carriers: int):
        super().__init__(f"RRH {rrh_id} has no free carrier slot (max {max_carriers})")
        self.rrh_id = rrh_id
        self.max_carriers = max_carriers


# --- slice lifecycle -------------------------------------------------------

class UnknownTemplate(ManagementError):
    def __init__(self, template_id: str):
        super().__init__(f"unknown slice template: {template_id}")
        self.template_id = template_id


class UnknownSlice(ManagementError):
    def __init__(self, ran_slice_id: str):
        super().__init__(f"unknown RAN slice: {ran_slice_id}")
        self.ran_slice_id = ran_slice_id


class RstUnknown(ManagementError):
    def __init__(self, rst: str):
        super().__init__(f"radio slice type not in catalog: {rst}")
        self.rst = rst


class UnservableCell(ManagementError):
    def __init__(self, cell_id: str):
        super().__init__(f"cell {cell_id} is not bound to network-service resources")
        self.cell_id = cell_id


class GuaranteeInfeasible(ManagementError):
    def __init__(self, cell_id: str, flow_types, excess: float):
        self.cell_id = cell_id
        self.flow_types = flow_types
        self.excess = excess
        super().__init__(
            f"guaranteed load infeasible in cell {cell_id}: "
            f"sum exceeds capacity by {excess:.4f} for flow types {flow_types}"
        )


class CompensationFailed(ManagementError):
    def __init__(self, op_id: str, step: str, cause: Exception):
        super().__init__(
            f"compensation failed for operation {op_id} at step {step}: {cause}"
        )
        self.op_id = op_id
        self.step = step
        self.cause = cause


# --- simulation / PM-FM ----------------------------------------------------

class ProfileExhausted(ManagementError):
    def __init__(self, tick: int):
        super().__init__(f"offered-load trace exhausted at tick {tick}")
        self.tick = tick


class OutOfOrderTick(ManagementError):
    def __init__(self, tick: int, last: int):
        super().__init__(f"tick {tick} ingested after tick {last}")
        self.tick = tick
        self.last = last


class WindowIncomplete(ManagementError):
    def __init__(self, start: int, end: int):
        super().__init__(f"measurement window [{start}, {end}] not fully ingested")
        self.start = start
        self.end = end


class UnknownSubscription(ManagementError):
    def __init__(self, subscription_id: str):
        super().__init__(f"unknown subscription: {subscription_id}")
        self.subscription_id = subscription_id


# --- northbound -------------------------------------------------------------

class ScenarioValidationError(ManagementError):
    """Raised before execution; carries every problem found in the file."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid scenario: " + "; ".join(self.problems))
