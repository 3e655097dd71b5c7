"""Linear systems as signed directed graphs, and their JSONL dataset form.

Node i carries the rhs entry b_i; every nonzero matrix entry a_ij becomes
one directed edge i -> j whose weight keeps the full complex value, so the
sign partition (positive vs negative edges) and the magnitude are both
recoverable.  Diagonal entries become self-loops.  The JSONL dataset file
written here is the hand-off surface to the learned-initializer trainer;
predictions come back through the separate predictions-file contract.
"""

import json
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .problem import LinearSystem
from .simulator import ParamSet

Edge = Tuple[int, int, complex]


def edge_sign(weight: complex) -> int:
    """+1 or -1 by the real part, falling back to the imaginary part."""
    re = weight.real
    if re != 0.0:
        return 1 if re > 0.0 else -1
    if weight.imag == 0.0:
        raise ValueError("zero weight carries no sign")
    return 1 if weight.imag > 0.0 else -1


@dataclass
class SignedDirectedGraph:
    nodes: np.ndarray
    edges: List[Edge]

    def __post_init__(self):
        self.nodes = np.ascontiguousarray(self.nodes, dtype=np.complex128)
        self.edges = sorted(
            (int(i), int(j), complex(w)) for i, j, w in self.edges
        )
        for i, j, w in self.edges:
            if w == 0:
                raise ValueError(f"edge ({i}, {j}) has zero weight")

    @property
    def node_count(self) -> int:
        return self.nodes.shape[0]

    def positive_edges(self) -> List[Edge]:
        return [e for e in self.edges if edge_sign(e[2]) > 0]

    def negative_edges(self) -> List[Edge]:
        return [e for e in self.edges if edge_sign(e[2]) < 0]


@dataclass
class DatasetRecord:
    """One graph plus optional ground-truth angles and run metadata."""

    id: str
    qubits: int
    graph: SignedDirectedGraph
    label: Optional[ParamSet] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.label is not None and self.label.angles.shape != (self.qubits, 3):
            raise ValueError(
                f"label shape {self.label.angles.shape} does not match ({self.qubits}, 3)"
            )


def encode(sys: LinearSystem) -> SignedDirectedGraph:
    """Graph view of one instance: rhs on nodes, matrix entries on edges."""
    rows, cols, vals = sys.nonzeros()
    edges = [(int(i), int(j), complex(v)) for i, j, v in zip(rows, cols, vals)]
    return SignedDirectedGraph(nodes=sys.rhs.copy(), edges=edges)


def decode_structure(g: SignedDirectedGraph, dim: int):
    """Rebuild (matrix, rhs) arrays from a graph; inverse of encode."""
    if g.node_count != dim:
        raise ValueError(f"graph has {g.node_count} nodes, expected {dim}")
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    for i, j, w in g.edges:
        if not (0 <= i < dim and 0 <= j < dim):
            raise ValueError(f"edge index ({i}, {j}) outside dimension {dim}")
        matrix[i, j] = w
    return matrix, g.nodes.copy()


def record_from_system(sys: LinearSystem, label: Optional[ParamSet] = None,
                       meta: Optional[dict] = None) -> DatasetRecord:
    return DatasetRecord(
        id=sys.id, qubits=sys.qubits, graph=encode(sys),
        label=label, meta=dict(meta or {}),
    )


def _record_to_obj(rec: DatasetRecord) -> dict:
    label = None
    if rec.label is not None:
        label = [float(v) for v in rec.label.flat()]
    return {
        "id": rec.id,
        "qubits": rec.qubits,
        "nodes": [[float(v.real), float(v.imag)] for v in rec.graph.nodes],
        "edges": [[i, j, float(w.real), float(w.imag)] for i, j, w in rec.graph.edges],
        "label": label,
        "meta": rec.meta,
    }


def export_dataset(records, path) -> None:
    """Write records as JSON Lines; stable bytes for identical inputs."""
    seen = set()
    for rec in records:
        if rec.id in seen:
            raise ValueError(f"duplicate record id {rec.id!r}")
        seen.add(rec.id)
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(_record_to_obj(rec), sort_keys=True) + "\n")


def import_dataset(path) -> List[DatasetRecord]:
    """Read a JSONL dataset; errors carry the 1-based line number."""
    records = []
    seen = set()
    with open(path) as fh:
        for ln, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {ln}: {exc.msg}") from exc
            try:
                rec = _record_from_obj(obj)
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}: line {ln}: {exc}") from exc
            if rec.id in seen:
                raise ValueError(f"{path}: line {ln}: duplicate record id {rec.id!r}")
            seen.add(rec.id)
            records.append(rec)
    return records


def _record_from_obj(obj: dict) -> DatasetRecord:
    qubits = int(obj["qubits"])
    nodes = np.array([complex(re, im) for re, im in obj["nodes"]])
    edges = [(int(i), int(j), complex(re, im)) for i, j, re, im in obj["edges"]]
    label = None
    if obj.get("label") is not None:
        flat = np.asarray(obj["label"], dtype=np.float64)
        if flat.shape != (3 * qubits,):
            raise ValueError(
                f"label has {flat.size} values, expected {3 * qubits}"
            )
        label = ParamSet(qubits, flat.reshape(qubits, 3))
    return DatasetRecord(
        id=str(obj["id"]), qubits=qubits,
        graph=SignedDirectedGraph(nodes=nodes, edges=edges),
        label=label, meta=dict(obj.get("meta") or {}),
    )
