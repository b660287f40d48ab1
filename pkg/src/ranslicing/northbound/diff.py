"""Structural diff between two exported model documents.

Compares the object trees by reference path, reporting additions, removals
and per-attribute changes. Meta fields (objectVersion, auditLog) are ignored
so that two semantically equal models diff clean even when their histories
differ.
"""

from __future__ import annotations

CHILD_KEYS = ("managedElements", "gnbFunctions", "cells", "cellSlices", "ranSlices")
ID_KEYS = (
    "subnetworkId",
    "elementId",
    "functionId",
    "cellId",
    "cellSliceId",
    "ranSliceId",
)
IGNORED_KEYS = {"objectVersion"}


def _node_id(node: dict) -> str:
    for key in ID_KEYS:
        if key in node:
            return str(node[key])
    return "?"


def _flatten(node: dict, prefix: str, out: dict) -> None:
    path = f"{prefix}/{_node_id(node)}" if prefix else _node_id(node)
    attrs = {
        k: v
        for k, v in node.items()
        if k not in CHILD_KEYS and k not in IGNORED_KEYS and k != "meta"
    }
    out[path] = attrs
    for child_key in CHILD_KEYS:
        for child in node.get(child_key, []):
            _flatten(child, path, out)


def diff_models(a: dict, b: dict) -> dict:
    """Diff two export_model() documents; returns added/removed/changed."""
    flat_a: dict[str, dict] = {}
    flat_b: dict[str, dict] = {}
    _flatten(a, "", flat_a)
    _flatten(b, "", flat_b)

    added = sorted(set(flat_b) - set(flat_a))
    removed = sorted(set(flat_a) - set(flat_b))
    changed = []
    for path in sorted(set(flat_a) & set(flat_b)):
        attrs_a, attrs_b = flat_a[path], flat_b[path]
        fields = []
        for key in sorted(set(attrs_a) | set(attrs_b)):
            va, vb = attrs_a.get(key), attrs_b.get(key)
            if va != vb:
                fields.append({"field": key, "before": va, "after": vb})
        if fields:
            changed.append({"path": path, "fields": fields})

    return {
        "added": added,
        "removed": removed,
        "changed": changed,
        "identical": not (added or removed or changed),
    }
