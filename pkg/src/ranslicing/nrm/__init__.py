"""Vendor-neutral information model: object store, validation, export/import."""

from ranslicing.nrm.serialize import (
    canonical_json,
    export_model,
    export_model_json,
    import_model,
)
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
from ranslicing.nrm.validation import Violation, validate_store, validate_subnetwork

__all__ = [
    "AuthorisedLoad",
    "AuthorisedLoadEntry",
    "CellSliceAttrs",
    "GnbFunctionAttrs",
    "ManagedElementAttrs",
    "ModelStore",
    "NetworkId",
    "NrCellAttrs",
    "PlannedLoadItem",
    "PlmnCellEntry",
    "PlmnId",
    "QosFlowType",
    "RanSliceAttrs",
    "SNssai",
    "SubnetworkAttrs",
    "TargetKpi",
    "Violation",
    "canonical_json",
    "export_model",
    "export_model_json",
    "import_model",
    "validate_store",
    "validate_subnetwork",
]
