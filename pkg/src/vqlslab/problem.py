"""Linear-system instances: generation, Matrix Market ingestion, storage.

An instance directory holds matrix.mtx, rhs.json ([re, im] pairs) and
meta.json; a corpus is a directory of such directories plus a manifest
written by the command line tools.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

import numpy as np

__all__ = [
    "LinearSystem",
    "DatasetSplit",
    "MatrixMarketError",
    "gen_random_system",
    "load_matrix_market",
    "write_matrix_market",
    "normalize_system",
    "split_dataset",
    "save_instance",
    "load_instance",
]

MAX_QUBITS = 12


class MatrixMarketError(ValueError):
    """Malformed Matrix Market input; message carries the offending line."""


@dataclass
class LinearSystem:
    qubits: int
    matrix: np.ndarray
    rhs: np.ndarray
    id: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.matrix = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        self.rhs = np.ascontiguousarray(self.rhs, dtype=np.complex128)
        n = 1 << self.qubits
        if self.qubits < 1:
            raise ValueError("qubits must be >= 1")
        if self.matrix.shape != (n, n):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match 2^{self.qubits}"
            )
        if self.rhs.shape != (n,):
            raise ValueError(f"rhs shape {self.rhs.shape} does not match dim {n}")
        row_mass = np.abs(self.matrix).sum(axis=1)
        if np.any(row_mass == 0.0):
            bad = int(np.argmax(row_mass == 0.0))
            raise ValueError(f"matrix row {bad} is entirely zero")

    @property
    def dim(self) -> int:
        return 1 << self.qubits

    def nonzeros(self):
        """Sparse coordinate view (rows, cols, values) for export."""
        rows, cols = np.nonzero(self.matrix)
        return rows, cols, self.matrix[rows, cols]


@dataclass
class DatasetSplit:
    train: List[str]
    val: List[str]
    test: List[str]


def gen_random_system(q: int, density: float, seed: int) -> LinearSystem:
    """Random diagonally-dominant sparse instance, deterministic in inputs.

    Diagonal entries are uniform in [1, 2); ceil(density * N^2) distinct
    off-diagonal positions (capped at the N^2 - N available) get values
    uniform in [-1, 1) excluding zero; rhs is uniform in [-1, 1) per entry,
    normalized to unit 2-norm.
    """
    if not 2 <= q <= MAX_QUBITS:
        raise ValueError(f"q={q} outside supported range [2, {MAX_QUBITS}]")
    if not 0.0 < density <= 1.0:
        raise ValueError(f"density={density} outside (0, 1]")
    n = 1 << q
    rng = np.random.default_rng(seed)

    matrix = np.zeros((n, n), dtype=np.complex128)
    matrix[np.arange(n), np.arange(n)] = rng.uniform(1.0, 2.0, n)

    available = n * n - n
    count = min(math.ceil(density * n * n), available)
    # sample distinct off-diagonal slots; slot s maps to the s-th position
    # of the row-major matrix with the diagonal deleted
    if count > available // 2:
        slots = rng.permutation(available)[:count]
    else:
        chosen = []
        seen = set()
        while len(chosen) < count:
            s = int(rng.integers(available))
            if s not in seen:
                seen.add(s)
                chosen.append(s)
        slots = np.array(chosen, dtype=np.int64)
    for s in slots:
        i = s // (n - 1)
        r = s % (n - 1)
        j = r if r < i else r + 1
        val = 0.0
        while val == 0.0:
            val = rng.uniform(-1.0, 1.0)
        matrix[i, j] = val

    rhs = rng.uniform(-1.0, 1.0, n).astype(np.complex128)
    rhs /= np.linalg.norm(rhs)

    return LinearSystem(
        qubits=q,
        matrix=matrix,
        rhs=rhs,
        id=f"q{q}_d{density:g}_s{seed}",
        meta={"source": "synthetic", "original_dim": n, "seed": int(seed), "density": float(density)},
    )


# ---------------------------------------------------------------------------
# Matrix Market
# ---------------------------------------------------------------------------

_FIELDS = {"real", "complex", "integer"}
_SYMMETRIES = {"general", "symmetric", "skew-symmetric", "hermitian"}


def _mm_fail(lineno, message):
    raise MatrixMarketError(f"line {lineno}: {message}")


def _parse_matrix_market(path: Path, max_dim: int = None) -> np.ndarray:
    with open(path, "r") as fh:
        lines = fh.read().splitlines()
    if not lines:
        _mm_fail(1, "empty file")
    header = lines[0].split()
    if len(header) != 5 or header[0] != "%%MatrixMarket" or header[1].lower() != "matrix":
        _mm_fail(1, f"bad header {lines[0]!r}")
    layout, fieldkind, symmetry = (h.lower() for h in header[2:5])
    if layout not in ("coordinate", "array"):
        _mm_fail(1, f"unsupported layout {layout!r}")
    if fieldkind not in _FIELDS:
        _mm_fail(1, f"unsupported field {fieldkind!r} (values are required)")
    if symmetry not in _SYMMETRIES:
        _mm_fail(1, f"unsupported symmetry {symmetry!r}")

    # skip comments, find the size line
    pos = 1
    while pos < len(lines) and (lines[pos].startswith("%") or not lines[pos].strip()):
        pos += 1
    if pos >= len(lines):
        _mm_fail(len(lines), "missing size line")
    size_line = pos
    parts = lines[pos].split()

    def _size(tok, what):
        try:
            value = int(tok)
        except ValueError:
            _mm_fail(size_line + 1, f"non-integer {what} {tok!r}")
        if value <= 0:
            _mm_fail(size_line + 1, f"non-positive {what} {tok!r}")
        return value

    if layout == "coordinate":
        if len(parts) != 3:
            _mm_fail(size_line + 1, f"expected 'rows cols nnz', got {lines[pos]!r}")
        rows, cols, nnz = (_size(t, w) for t, w in zip(parts, ("rows", "cols", "nnz")))
    else:
        if len(parts) != 2:
            _mm_fail(size_line + 1, f"expected 'rows cols', got {lines[pos]!r}")
        rows, cols = (_size(t, w) for t, w in zip(parts, ("rows", "cols")))
        nnz = None
    if rows != cols:
        _mm_fail(size_line + 1, f"matrix is {rows}x{cols}, expected square")
    if max_dim is not None and rows > max_dim:
        raise ValueError(
            f"dimension {rows} exceeds the desk-scale cap {max_dim} (2^{MAX_QUBITS})"
        )

    per_value = 2 if fieldkind == "complex" else 1
    matrix = np.zeros((rows, cols), dtype=np.complex128)

    def _value(tokens, lineno):
        try:
            if per_value == 2:
                return complex(float(tokens[0]), float(tokens[1]))
            return complex(float(tokens[0]))
        except (ValueError, IndexError):
            _mm_fail(lineno, f"bad value tokens {tokens!r}")

    data_lines = [
        (k + 1, lines[k])
        for k in range(pos + 1, len(lines))
        if lines[k].strip() and not lines[k].startswith("%")
    ]

    if layout == "coordinate":
        if len(data_lines) != nnz:
            _mm_fail(len(lines), f"expected {nnz} entries, found {len(data_lines)}")
        for lineno, raw in data_lines:
            toks = raw.split()
            if len(toks) != 2 + per_value:
                _mm_fail(lineno, f"expected {2 + per_value} tokens, got {raw!r}")
            try:
                i, j = int(toks[0]) - 1, int(toks[1]) - 1
            except ValueError:
                _mm_fail(lineno, f"bad indices in {raw!r}")
            if not (0 <= i < rows and 0 <= j < cols):
                _mm_fail(lineno, f"index ({i + 1}, {j + 1}) outside {rows}x{cols}")
            if symmetry != "general" and j > i:
                _mm_fail(lineno, "entries above the diagonal in symmetric storage")
            matrix[i, j] = _value(toks[2:], lineno)
    else:
        if symmetry == "general":
            coords = [(i, j) for j in range(cols) for i in range(rows)]
        else:
            coords = [(i, j) for j in range(cols) for i in range(j, rows)]
        if len(data_lines) != len(coords):
            _mm_fail(len(lines), f"expected {len(coords)} array values, found {len(data_lines)}")
        for (i, j), (lineno, raw) in zip(coords, data_lines):
            toks = raw.split()
            if len(toks) != per_value:
                _mm_fail(lineno, f"expected {per_value} tokens, got {raw!r}")
            matrix[i, j] = _value(toks, lineno)

    if symmetry == "symmetric":
        matrix = matrix + matrix.T - np.diag(np.diag(matrix))
    elif symmetry == "hermitian":
        matrix = matrix + matrix.conj().T - np.diag(np.diag(matrix))
    elif symmetry == "skew-symmetric":
        matrix = matrix - matrix.T
    return matrix


def write_matrix_market(path, matrix: np.ndarray):
    """Coordinate-format writer; values via repr so binary-exact roundtrips."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    rows, cols = np.nonzero(matrix)
    values = matrix[rows, cols]
    is_complex = bool(np.any(values.imag != 0.0))
    fieldkind = "complex" if is_complex else "real"
    out = [f"%%MatrixMarket matrix coordinate {fieldkind} general"]
    out.append(f"{matrix.shape[0]} {matrix.shape[1]} {len(values)}")
    for i, j, v in zip(rows, cols, values):
        if is_complex:
            out.append(f"{i + 1} {j + 1} {float(v.real)!r} {float(v.imag)!r}")
        else:
            out.append(f"{i + 1} {j + 1} {float(v.real)!r}")
    Path(path).write_text("\n".join(out) + "\n")


def _build_rhs(policy: str, original_dim: int, padded_dim: int) -> np.ndarray:
    rhs = np.zeros(padded_dim, dtype=np.complex128)
    if policy == "ones":
        rhs[:original_dim] = 1.0
    elif policy.startswith("random:"):
        seed = int(policy.split(":", 1)[1])
        rng = np.random.default_rng(seed)
        rhs[:original_dim] = rng.uniform(-1.0, 1.0, original_dim)
    elif policy.startswith("file:"):
        raw = json.loads(Path(policy.split(":", 1)[1]).read_text())
        if len(raw) != original_dim:
            raise ValueError(
                f"rhs file has {len(raw)} entries, matrix has dimension {original_dim}"
            )
        rhs[:original_dim] = [complex(re, im) for re, im in raw]
    else:
        raise ValueError(
            f"unknown rhs policy {policy!r} (expected ones, random:<seed>, file:<path>)"
        )
    norm = np.linalg.norm(rhs)
    if norm == 0.0:
        raise ValueError("rhs policy produced the zero vector")
    return rhs / norm


def load_matrix_market(path, rhs_policy: str = "ones") -> LinearSystem:
    """Ingest a .mtx file, embed into the smallest 2^q >= dim, attach a rhs.

    Padding rows/columns carry an identity diagonal so the padded system's
    solution restricts to the original one; padded rhs entries are zero.
    """
    path = Path(path)
    original = _parse_matrix_market(path, max_dim=1 << MAX_QUBITS)
    original_dim = original.shape[0]

    row_mass = np.abs(original).sum(axis=1)
    if np.any(row_mass == 0.0):
        bad = int(np.argmax(row_mass == 0.0))
        raise ValueError(f"row {bad + 1} of {path.name} is zero: singular by construction")

    q = max(1, math.ceil(math.log2(original_dim)))
    padded_dim = 1 << q
    matrix = np.eye(padded_dim, dtype=np.complex128)
    matrix[:original_dim, :original_dim] = original
    rhs = _build_rhs(rhs_policy, original_dim, padded_dim)

    return LinearSystem(
        qubits=q,
        matrix=matrix,
        rhs=rhs,
        id=path.stem,
        meta={
            "source": f"suitesparse:{path.stem}",
            "original_dim": int(original_dim),
            "rhs_policy": rhs_policy,
            "seed": None,
        },
    )


def normalize_system(sys: LinearSystem) -> LinearSystem:
    """Unit-norm rhs and O(1) matrix entries; normalized costs are unchanged."""
    rhs_norm = float(np.linalg.norm(sys.rhs))
    if rhs_norm < 1e-300:
        raise ValueError("rhs is zero, cannot normalize")
    frob = float(np.linalg.norm(sys.matrix))
    matrix_scale = sys.dim / frob
    rhs_scale = 1.0 / rhs_norm
    meta = dict(sys.meta)
    meta["matrix_scale"] = matrix_scale
    meta["rhs_scale"] = rhs_scale
    return LinearSystem(
        qubits=sys.qubits,
        matrix=sys.matrix * matrix_scale,
        rhs=sys.rhs * rhs_scale,
        id=sys.id,
        meta=meta,
    )


def split_dataset(ids: List[str], seed: int) -> DatasetSplit:
    """Deterministic shuffled 8:1:1 partition (floor on train, extra to val)."""
    if len(ids) < 10:
        raise ValueError(f"need at least 10 ids to split, got {len(ids)}")
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate ids in split input")
    order = list(np.random.default_rng(seed).permutation(len(ids)))
    shuffled = [ids[k] for k in order]
    n_train = int(0.8 * len(ids))
    rest = len(ids) - n_train
    n_val = (rest + 1) // 2
    return DatasetSplit(
        train=shuffled[:n_train],
        val=shuffled[n_train : n_train + n_val],
        test=shuffled[n_train + n_val :],
    )


# ---------------------------------------------------------------------------
# instance directories
# ---------------------------------------------------------------------------

def save_instance(sys: LinearSystem, directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_matrix_market(directory / "matrix.mtx", sys.matrix)
    rhs_pairs = [[float(v.real), float(v.imag)] for v in sys.rhs]
    (directory / "rhs.json").write_text(json.dumps(rhs_pairs))
    meta = dict(sys.meta)
    meta["id"] = sys.id
    meta["qubits"] = sys.qubits
    (directory / "meta.json").write_text(json.dumps(meta, indent=1, sort_keys=True))


def load_instance(directory) -> LinearSystem:
    directory = Path(directory)
    matrix = _parse_matrix_market(directory / "matrix.mtx")
    raw = json.loads((directory / "rhs.json").read_text())
    rhs = np.array([complex(re, im) for re, im in raw], dtype=np.complex128)
    meta = json.loads((directory / "meta.json").read_text())
    qubits = int(meta.pop("qubits"))
    instance_id = meta.pop("id")
    return LinearSystem(qubits=qubits, matrix=matrix, rhs=rhs, id=instance_id, meta=meta)
