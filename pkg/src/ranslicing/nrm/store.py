"""Versioned managed-object store with containment, audit log and snapshots.

Objects live in a containment tree rooted at a Subnetwork. Every successful
mutation bumps the model version and appends an audit record; replaying the
audit log against an empty store rebuilds the identical tree. Reads are
served from immutable snapshots so the single writer never blocks readers.
"""

from __future__ import annotations

import copy
import threading
from dataclasses import dataclass, field, fields
from typing import Any, Iterator

from ranslicing.errors import (
    IllegalContainment,
    InvariantViolation,
    StaleVersion,
    UnknownObject,
    UnknownParent,
)
from ranslicing.nrm import serialize
from ranslicing.nrm.types import (
    CellSliceAttrs,
    GnbFunctionAttrs,
    ManagedElementAttrs,
    NrCellAttrs,
    RanSliceAttrs,
    SubnetworkAttrs,
)

KIND_SUBNETWORK = "Subnetwork"
KIND_MANAGED_ELEMENT = "ManagedElement"
KIND_GNB_FUNCTION = "GnbFunction"
KIND_NR_CELL = "NrCell"
KIND_CELL_SLICE = "CellSlice"
KIND_RAN_SLICE = "RanSlice"

ATTR_CLASSES = {
    KIND_SUBNETWORK: SubnetworkAttrs,
    KIND_MANAGED_ELEMENT: ManagedElementAttrs,
    KIND_GNB_FUNCTION: GnbFunctionAttrs,
    KIND_NR_CELL: NrCellAttrs,
    KIND_CELL_SLICE: CellSliceAttrs,
    KIND_RAN_SLICE: RanSliceAttrs,
}

# Legal parent kinds per child kind. None = root.
CONTAINMENT = {
    KIND_SUBNETWORK: (None,),
    KIND_MANAGED_ELEMENT: (KIND_SUBNETWORK,),
    KIND_GNB_FUNCTION: (KIND_MANAGED_ELEMENT,),
    KIND_NR_CELL: (KIND_GNB_FUNCTION,),
    KIND_CELL_SLICE: (KIND_NR_CELL,),
    KIND_RAN_SLICE: (KIND_SUBNETWORK,),
}

ID_FIELD = {
    KIND_SUBNETWORK: "subnetwork_id",
    KIND_MANAGED_ELEMENT: "element_id",
    KIND_GNB_FUNCTION: "function_id",
    KIND_NR_CELL: "cell_id",
    KIND_CELL_SLICE: "cell_slice_id",
    KIND_RAN_SLICE: "ran_slice_id",
}


@dataclass
class ManagedObject:
    ref: str
    kind: str
    parent_ref: str | None
    attrs: Any
    version: int = 1

    @property
    def object_id(self) -> str:
        return getattr(self.attrs, ID_FIELD[self.kind])


@dataclass
class Checkpoint:
    """Opaque restore point for all-or-nothing operations."""

    objects: dict
    children: dict
    version: int
    audit: list


class ModelStore:
    """Single-writer store of the management-plane object tree."""

    def __init__(self):
        self._objects: dict[str, ManagedObject] = {}
        self._children: dict[str, list[str]] = {}
        self._version = 0
        self._audit: list[dict] = []
        self._lock = threading.RLock()
        self._frozen = False
        # Full-model validation hook, installed by the owning runtime so that
        # mutations are rejected when they break cross-object invariants.
        self.validator = None

    # --- introspection -----------------------------------------------------

    @property
    def version(self) -> int:
        return self._version

    @property
    def audit_log(self) -> list[dict]:
        return list(self._audit)

    def exists(self, ref: str) -> bool:
        return ref in self._objects

    def get(self, ref: str) -> ManagedObject:
        try:
            return self._objects[ref]
        except KeyError:
            raise UnknownObject(ref) from None

    def children_of(self, ref: str) -> list[ManagedObject]:
        return [self._objects[r] for r in self._children.get(ref, [])]

    def roots(self) -> list[ManagedObject]:
        return [o for o in self._objects.values() if o.parent_ref is None]

    def iter_kind(self, kind: str) -> Iterator[ManagedObject]:
        for ref in sorted(self._objects):
            obj = self._objects[ref]
            if obj.kind == kind:
                yield obj

    def find_by_id(self, kind: str, object_id: str) -> ManagedObject | None:
        for obj in self.iter_kind(kind):
            if obj.object_id == object_id:
                return obj
        return None

    def resolve_cell(self, cell_id: str) -> ManagedObject | None:
        return self.find_by_id(KIND_NR_CELL, cell_id)

    def resolve_cell_slice(self, cell_id: str, cell_slice_id: str) -> ManagedObject | None:
        cell = self.resolve_cell(cell_id)
        if cell is None:
            return None
        for child in self.children_of(cell.ref):
            if child.kind == KIND_CELL_SLICE and child.object_id == cell_slice_id:
                return child
        return None

    def resolve_ran_slice(self, ran_slice_id: str) -> ManagedObject | None:
        return self.find_by_id(KIND_RAN_SLICE, ran_slice_id)

    # --- mutations -----------------------------------------------------------

    def create_object(self, parent_ref: str | None, kind: str, attrs: Any) -> str:
        """Create and validate a managed object; returns its ref."""
        with self._lock:
            self._assert_writable()
            if kind not in ATTR_CLASSES:
                raise IllegalContainment(parent_ref or "<root>", kind)
            parent_kind = None
            if parent_ref is not None:
                if parent_ref not in self._objects:
                    raise UnknownParent(parent_ref)
                parent_kind = self._objects[parent_ref].kind
            if parent_kind not in CONTAINMENT[kind]:
                raise IllegalContainment(parent_kind or "<root>", kind)
            if not isinstance(attrs, ATTR_CLASSES[kind]):
                attrs = serialize.attrs_from_dict(kind, attrs)

            object_id = getattr(attrs, ID_FIELD[kind])
            ref = object_id if parent_ref is None else f"{parent_ref}/{object_id}"
            if ref in self._objects:
                raise InvariantViolation(
                    [f"{ref}: duplicate {ID_FIELD[kind]} {object_id!r} under parent"]
                )

            cp = self.checkpoint()
            obj = ManagedObject(ref=ref, kind=kind, parent_ref=parent_ref, attrs=attrs)
            self._objects[ref] = obj
            self._children.setdefault(parent_ref, []).append(ref)
            self._children.setdefault(ref, [])
            try:
                self._commit("create", obj, serialize.attrs_to_dict(kind, attrs))
            except InvariantViolation:
                self.restore(cp)
                raise
            return ref

    def update_object(
        self, ref: str, deltas: dict[str, Any], expected_version: int | None = None
    ) -> str:
        """Apply attribute deltas atomically; deltas use snake_case field names."""
        with self._lock:
            self._assert_writable()
            obj = self.get(ref)
            if expected_version is not None and expected_version != obj.version:
                raise StaleVersion(ref, expected_version, obj.version)
            writable = {f.name for f in fields(obj.attrs)} - {ID_FIELD[obj.kind]}
            bad = set(deltas) - writable
            if bad:
                raise InvariantViolation(
                    [f"{ref}: attribute not writable or unknown: {name}" for name in sorted(bad)]
                )
            cp = self.checkpoint()
            new_attrs = copy.deepcopy(obj.attrs)
            for name, value in deltas.items():
                setattr(new_attrs, name, value)
            obj.attrs = new_attrs
            obj.version += 1
            try:
                self._commit("update", obj, serialize.attr_deltas_to_dict(obj.kind, deltas))
            except InvariantViolation:
                self.restore(cp)
                raise
            return ref

    def delete_object(self, ref: str) -> None:
        """Delete an object and its whole containment subtree."""
        with self._lock:
            self._assert_writable()
            obj = self.get(ref)
            cp = self.checkpoint()
            self._delete_subtree(ref)
            try:
                self._commit("delete", obj, None)
            except InvariantViolation:
                self.restore(cp)
                raise

    def _delete_subtree(self, ref: str) -> None:
        for child_ref in list(self._children.get(ref, [])):
            self._delete_subtree(child_ref)
        obj = self._objects.pop(ref)
        self._children.pop(ref, None)
        siblings = self._children.get(obj.parent_ref)
        if siblings and ref in siblings:
            siblings.remove(ref)

    def _commit(self, op: str, obj: ManagedObject, payload: Any) -> None:
        violations = self._validate()
        errors = [v for v in violations if v.severity == "error"]
        if errors:
            raise InvariantViolation(errors)
        self._version += 1
        self._audit.append(
            {
                "seq": self._version,
                "op": op,
                "ref": obj.ref,
                "kind": obj.kind,
                "parentRef": obj.parent_ref,
                "payload": payload,
            }
        )

    def _validate(self):
        if self.validator is None:
            from ranslicing.nrm.validation import validate_store

            return validate_store(self)
        return self.validator(self)

    def _assert_writable(self) -> None:
        if self._frozen:
            raise InvariantViolation(["snapshot is read-only"])

    # --- checkpoints, snapshots, meta ---------------------------------------

    def checkpoint(self) -> Checkpoint:
        return Checkpoint(
            objects=copy.deepcopy(self._objects),
            children=copy.deepcopy(self._children),
            version=self._version,
            audit=list(self._audit),
        )

    def restore(self, cp: Checkpoint) -> None:
        with self._lock:
            self._objects = copy.deepcopy(cp.objects)
            self._children = copy.deepcopy(cp.children)
            self._version = cp.version
            self._audit = list(cp.audit)

    def snapshot(self) -> "ModelStore":
        """Immutable deep copy at the current version."""
        with self._lock:
            snap = ModelStore()
            snap._objects = copy.deepcopy(self._objects)
            snap._children = copy.deepcopy(self._children)
            snap._version = self._version
            snap._audit = list(self._audit)
            snap._frozen = True
            return snap

    # --- tree reads ----------------------------------------------------------

    def get_model_tree(self, root_ref: str, depth: int | None = None) -> dict:
        """Nested snapshot of the subtree under root_ref.

        depth=0 returns the root node alone; None means unlimited.
        """
        snap = self.snapshot()
        root = snap.get(root_ref)
        return snap._node_dict(root, depth)

    def _node_dict(self, obj: ManagedObject, depth: int | None) -> dict:
        node = {
            "ref": obj.ref,
            "kind": obj.kind,
            "version": obj.version,
            "attributes": serialize.attrs_to_dict(obj.kind, obj.attrs),
        }
        if depth is None or depth > 0:
            next_depth = None if depth is None else depth - 1
            children = [self._node_dict(c, next_depth) for c in self.children_of(obj.ref)]
            if children:
                node["children"] = children
        return node

    # --- replay ----------------------------------------------------------------

    @classmethod
    def replay(cls, audit: list[dict]) -> "ModelStore":
        """Rebuild a store from an audit log (validation re-applied per step)."""
        store = cls()
        for record in audit:
            op = record["op"]
            if op == "create":
                attrs = serialize.attrs_from_dict(record["kind"], record["payload"])
                store.create_object(record["parentRef"], record["kind"], attrs)
            elif op == "update":
                deltas = serialize.attr_deltas_from_dict(record["kind"], record["payload"])
                store.update_object(record["ref"], deltas)
            elif op == "delete":
                store.delete_object(record["ref"])
            else:
                raise InvariantViolation([f"unknown audit op: {op}"])
        return store
