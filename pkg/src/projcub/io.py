"""Flat-file persistence for cubature formulas.

A formula is stored as a JSON document with a fixed schema:

* ``schema_version`` — integer, currently 1 (bump on any format change),
* ``field`` — "R", "C" or "H",
* ``m`` — dimension, ``index`` — the even index p,
* ``nodes`` — node-major array; each node is an m-list of delta-lists of
  reals (entry-major, coordinate-major),
* ``weights`` — list of positive reals,
* ``metadata`` — construction trace (rules applied, source counts, seeds).

Every real is written as a full-precision decimal with 17 significant
digits, which identifies an IEEE double uniquely: write-then-read
reproduces the formula bit-exactly.  Nodes are stored canonicalized (first
entry of modulus above 1e-12 made real positive); documents produced by the
constructors already are, and ``formula_to_document`` canonicalizes
otherwise.  Reading validates structure, finiteness and weight positivity —
it never rescales or renormalizes; numerical quality is the verifier's job.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field as dc_field

import numpy as np

from .construct import CubatureFormula
from .fields import canonicalize_all, parse_field, scalar_abs

__all__ = [
    "SCHEMA_VERSION",
    "FormulaDocument",
    "MalformedDocumentError",
    "formula_to_document",
    "formula_from_document",
    "write_formula",
    "read_formula",
    "document_to_json",
    "document_from_json",
]

SCHEMA_VERSION = 1
_CANON_PIVOT_TOL = 1e-12


class MalformedDocumentError(Exception):
    """The on-disk document is not a valid formula document."""


@dataclass(frozen=True)
class FormulaDocument:
    """In-memory form of the JSON schema (plain lists, JSON-ready)."""

    schema_version: int
    field: str
    m: int
    index: int
    nodes: list
    weights: list
    metadata: dict = dc_field(default_factory=dict)


def _nodes_canonical(field, nodes: np.ndarray) -> bool:
    mods = scalar_abs(nodes)
    first = np.argmax(mods > _CANON_PIVOT_TOL, axis=1)
    piv = nodes[np.arange(nodes.shape[0]), first, :]
    if not np.all(piv[:, 0] > 0.0):
        return False
    return bool(np.all(piv[:, 1:] == 0.0))


def formula_to_document(formula: CubatureFormula) -> FormulaDocument:
    """Package a formula for serialization (canonicalizing if needed)."""
    nodes = formula.nodes
    if not _nodes_canonical(formula.field, nodes):
        nodes = canonicalize_all(formula.field, nodes)
    return FormulaDocument(
        schema_version=SCHEMA_VERSION,
        field=formula.field.name,
        m=formula.m,
        index=formula.index,
        nodes=nodes.tolist(),
        weights=formula.weights.tolist(),
        metadata=dict(formula.metadata),
    )


def formula_from_document(doc: FormulaDocument) -> CubatureFormula:
    """Rebuild the formula exactly as stored (no renormalization)."""
    field = parse_field(doc.field)
    nodes = np.array(doc.nodes, dtype=float)
    weights = np.array(doc.weights, dtype=float)
    return CubatureFormula(
        field=field,
        m=doc.m,
        index=doc.index,
        nodes=nodes,
        weights=weights,
        metadata=dict(doc.metadata),
    )


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _emit_nodes(nodes: list) -> str:
    node_strs = []
    for node in nodes:
        entry_strs = (
            "[" + ",".join(_fmt(c) for c in entry) + "]" for entry in node
        )
        node_strs.append("[" + ",".join(entry_strs) + "]")
    return "[\n    " + ",\n    ".join(node_strs) + "\n  ]"


def document_to_json(doc: FormulaDocument) -> str:
    """Serialize with explicit 17-significant-digit reals."""
    meta = json.dumps(doc.metadata, sort_keys=True, allow_nan=False)
    weights = "[" + ",".join(_fmt(w) for w in doc.weights) + "]"
    return (
        "{\n"
        f'  "schema_version": {int(doc.schema_version)},\n'
        f'  "field": {json.dumps(doc.field)},\n'
        f'  "m": {int(doc.m)},\n'
        f'  "index": {int(doc.index)},\n'
        f'  "nodes": {_emit_nodes(doc.nodes)},\n'
        f'  "weights": {weights},\n'
        f'  "metadata": {meta}\n'
        "}\n"
    )


def document_from_json(text: str) -> FormulaDocument:
    """Parse and validate a document; raises MalformedDocumentError."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocumentError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise MalformedDocumentError("document root must be an object")
    required = {"schema_version", "field", "m", "index", "nodes", "weights"}
    missing = required - raw.keys()
    if missing:
        raise MalformedDocumentError(f"missing keys: {sorted(missing)}")
    version = raw["schema_version"]
    if version != SCHEMA_VERSION:
        raise MalformedDocumentError(
            f"unsupported schema_version {version!r} (supported: {SCHEMA_VERSION})"
        )
    if raw["field"] not in ("R", "C", "H"):
        raise MalformedDocumentError(f"unknown field {raw['field']!r}")
    field = parse_field(raw["field"])
    try:
        m = int(raw["m"])
        index = int(raw["index"])
    except (TypeError, ValueError) as exc:
        raise MalformedDocumentError("m and index must be integers") from exc
    if m < 1 or index < 2 or index % 2 != 0:
        raise MalformedDocumentError(
            f"need m >= 1 and even index >= 2, got m={m}, index={index}"
        )
    try:
        nodes = np.array(raw["nodes"], dtype=float)
        weights = np.array(raw["weights"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise MalformedDocumentError(f"non-numeric array content: {exc}") from exc
    if nodes.ndim != 3 or nodes.shape[1] != m or nodes.shape[2] != field.delta:
        raise MalformedDocumentError(
            f"nodes must have shape (n, {m}, {field.delta}), got {nodes.shape}"
        )
    if weights.ndim != 1 or weights.shape[0] != nodes.shape[0]:
        raise MalformedDocumentError(
            f"weights must be one per node, got {weights.shape} for {nodes.shape[0]} nodes"
        )
    if nodes.shape[0] == 0:
        raise MalformedDocumentError("empty formula")
    if not np.all(np.isfinite(nodes)) or not np.all(np.isfinite(weights)):
        raise MalformedDocumentError("non-finite node or weight values")
    if not np.all(weights > 0.0):
        raise MalformedDocumentError("weights must be strictly positive")
    metadata = raw.get("metadata", {})
    if not isinstance(metadata, dict):
        raise MalformedDocumentError("metadata must be an object")
    return FormulaDocument(
        schema_version=SCHEMA_VERSION,
        field=raw["field"],
        m=m,
        index=index,
        nodes=raw["nodes"],
        weights=raw["weights"],
        metadata=metadata,
    )


def write_formula(formula: CubatureFormula, path: str | os.PathLike) -> None:
    doc = formula_to_document(formula)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(document_to_json(doc))


def read_formula(path: str | os.PathLike) -> CubatureFormula:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise MalformedDocumentError(f"cannot read {path}: {exc}") from exc
    return formula_from_document(document_from_json(text))
