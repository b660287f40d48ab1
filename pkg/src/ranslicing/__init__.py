"""Management plane for RAN slicing over a simulated NG-RAN.

Subpackages:
  nrm          managed-object model: store, validation, export/import
  infra        simulated PoPs, RRHs and a minimal NFV orchestrator
  lifecycle    RAN-slice-instance lifecycle operations
  enforcement  per-cell capacity sharing and compliance monitoring
  pmfm         performance measurements, KPI reports, notifications
  northbound   scenario files, deterministic runner, HTTP API, CLI
"""

__version__ = "1.0.0"
