"""RAN slice templates: the design-time input to slice creation."""

from __future__ import annotations

from dataclasses import dataclass, field

from ranslicing.nrm.types import AuthorisedLoad, PlannedLoadItem, TargetKpi

ISOLATION_SHARED = "sharedCells"
ISOLATION_DEDICATED = "dedicatedCells"


@dataclass(frozen=True)
class RanSliceTemplate:
    template_id: str
    rst: str
    coverage_cells: tuple[str, ...] = ()  # explicit cell list
    area_tag: str | None = None  # alternative: resolved through the area map
    default_authorised_load: AuthorisedLoad = field(default_factory=AuthorisedLoad)
    planned_load: tuple[PlannedLoadItem, ...] = ()
    target_kpis: tuple[TargetKpi, ...] = ()
    isolation_hint: str = ISOLATION_SHARED

    def resolve_coverage(self, area_map: dict[str, list[str]] | None = None) -> tuple[str, ...]:
        if self.coverage_cells:
            return self.coverage_cells
        if self.area_tag is not None:
            return tuple((area_map or {}).get(self.area_tag, ()))
        return ()

    def to_dict(self) -> dict:
        d = {
            "templateId": self.template_id,
            "rst": self.rst,
            "defaultAuthorisedLoad": self.default_authorised_load.to_dict(),
            "plannedLoad": [p.to_dict() for p in self.planned_load],
            "targetKpis": [k.to_dict() for k in self.target_kpis],
            "isolationHint": self.isolation_hint,
        }
        if self.coverage_cells:
            d["coverageCells"] = list(self.coverage_cells)
        if self.area_tag is not None:
            d["areaTag"] = self.area_tag
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RanSliceTemplate":
        return cls(
            template_id=d["templateId"],
            rst=d["rst"],
            coverage_cells=tuple(d.get("coverageCells", [])),
            area_tag=d.get("areaTag"),
            default_authorised_load=AuthorisedLoad.from_dict(d.get("defaultAuthorisedLoad")),
            planned_load=tuple(
                PlannedLoadItem.from_dict(p) for p in d.get("plannedLoad", [])
            ),
            target_kpis=tuple(TargetKpi.from_dict(k) for k in d.get("targetKpis", [])),
            isolation_hint=d.get("isolationHint", ISOLATION_SHARED),
        )
