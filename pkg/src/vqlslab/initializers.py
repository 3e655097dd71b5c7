"""Starting-angle strategies for the optimization loop.

Four self-contained baselines (uniform, pca, minnorm, rowmean) plus a
loader for externally predicted angles.  Every strategy returns a
ParamSet with q x 3 finite angles in [0, 2*pi).

The classical vectors behind pca and rowmean have dimension N = 2^q, not
3q, so a fixed embedding turns them into angles: take 3q entries of the
vector cyclically (truncating when N >= 3q), then affine-map them so the
minimum lands on 0 and the maximum on the largest double below 2*pi.
A constant vector carries no shape information and maps to all-pi.
minnorm instead fits each qubit of the normalized classical solution:
its single-qubit reduced state has a Bloch direction (theta, phi), and
angles (theta, phi, 0) reproduce that direction exactly, because with a
zero third slot the ansatz's entangler rings cancel and the circuit
prepares the product of per-qubit Rz(phi) Ry(theta) |0> factors.
"""

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .problem import LinearSystem
from .simulator import ParamSet

TWO_PI = 2.0 * np.pi
# top of the half-open angle interval
_TOP = np.nextafter(TWO_PI, 0.0)

_TAGS = ("uniform", "pca", "minnorm", "rowmean", "predicted")


@dataclass(frozen=True)
class InitStrategy:
    """Dispatch tag plus the per-tag extras (seed, predictions path)."""

    tag: str
    seed: Optional[int] = None
    path: Optional[str] = None

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise ValueError(f"unknown strategy tag {self.tag!r}")
        if self.tag == "uniform" and self.seed is None:
            raise ValueError("uniform strategy requires a seed")
        if self.tag == "predicted" and self.path is None:
            raise ValueError("predicted strategy requires a predictions path")


def _cycle_take(values: np.ndarray, count: int) -> np.ndarray:
    # np.resize truncates or repeats cyclically, both of which we want
    return np.resize(np.asarray(values, dtype=np.float64), count)


def _affine_angles(values: np.ndarray, q: int) -> np.ndarray:
    lo = values.min()
    hi = values.max()
    # relative tolerance so svd ulp noise on a constant vector stays constant
    if hi - lo <= 1e-12 * max(abs(lo), abs(hi)):
        return np.full((q, 3), np.pi)
    return ((values - lo) / (hi - lo) * _TOP).reshape(q, 3)


def init_uniform(q: int, seed: int) -> ParamSet:
    """Angles i.i.d. uniform on [0, 2*pi), deterministic in seed."""
    if q < 1:
        raise ValueError("q must be >= 1")
    rng = np.random.default_rng(seed)
    return ParamSet(q, rng.uniform(0.0, TWO_PI, (q, 3)))


def init_pca(sys: LinearSystem) -> ParamSet:
    """Angles from the leading right singular vector of Re(A)."""
    real = np.ascontiguousarray(sys.matrix.real)
    if not real.any():
        raise ValueError("matrix has zero real part, no principal component")
    _, _, vh = np.linalg.svd(real)
    v = vh[0]
    # fix the sign ambiguity: largest-magnitude entry positive
    if v[np.argmax(np.abs(v))] < 0.0:
        v = -v
    return ParamSet(sys.qubits, _affine_angles(_cycle_take(v, 3 * sys.qubits), sys.qubits))


def init_minnorm(sys: LinearSystem, variant: str = "pinv") -> ParamSet:
    """Per-qubit Bloch fit of the classical minimum-norm solution.

    variant "pinv" targets pinv(A) b (singular values below 1e-10 of the
    largest treated as zero); variant "adjoint" targets A^dagger b.
    """
    if variant == "pinv":
        x = np.linalg.pinv(sys.matrix, rcond=1e-10) @ sys.rhs
    elif variant == "adjoint":
        x = sys.matrix.conj().T @ sys.rhs
    else:
        raise ValueError(f"unknown minnorm variant {variant!r}")
    nrm = np.linalg.norm(x)
    if nrm < 1e-14:
        raise ValueError("rhs is orthogonal to the range of the matrix")
    x = x / nrm

    q = sys.qubits
    angles = np.zeros((q, 3))
    for j in range(q):
        view = x.reshape(1 << j, 2, 1 << (q - 1 - j))
        rho = np.einsum("lsr,ltr->st", view, view.conj())
        rx = 2.0 * rho[0, 1].real
        ry = -2.0 * rho[0, 1].imag
        rz = (rho[0, 0] - rho[1, 1]).real
        angles[j, 0] = np.arctan2(np.hypot(rx, ry), rz)
        if rx * rx + ry * ry >= 1e-20:
            angles[j, 1] = np.mod(np.arctan2(ry, rx), TWO_PI)
    return ParamSet(q, angles)


def init_rowmean(sys: LinearSystem) -> ParamSet:
    """Angles from block averages of the row means of Re(A)."""
    q = sys.qubits
    r = sys.matrix.real.mean(axis=1)
    if r.size < 3 * q:
        r = _cycle_take(r, 3 * q)
    blocks = np.array_split(r, 3 * q)
    means = np.array([block.mean() for block in blocks])
    return ParamSet(q, _affine_angles(means, q))


def load_predicted(path, instance_id: str) -> ParamSet:
    """Angles for one instance from a predictions file.

    The file is JSON Lines, one record per line:
    {"id": str, "qubits": int, "params": [[f, f, f] x q]}.
    Angles are reduced mod 2*pi into [0, 2*pi).
    """
    record = None
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            candidate = json.loads(line)
            if candidate.get("id") == instance_id:
                record = candidate
                break
    if record is None:
        raise ValueError(f"no prediction for id {instance_id!r} in {path}")
    q = int(record["qubits"])
    params = np.asarray(record["params"], dtype=np.float64)
    if params.shape != (q, 3):
        raise ValueError(
            f"prediction for {instance_id!r} has shape {params.shape}, expected ({q}, 3)"
        )
    if not np.all(np.isfinite(params)):
        raise ValueError(f"prediction for {instance_id!r} has non-finite entries")
    return ParamSet(q, np.mod(params, TWO_PI))


def initialize(strategy: InitStrategy, sys: LinearSystem) -> ParamSet:
    """Run the strategy the tag names against one instance."""
    if strategy.tag == "uniform":
        return init_uniform(sys.qubits, strategy.seed)
    if strategy.tag == "pca":
        return init_pca(sys)
    if strategy.tag == "minnorm":
        return init_minnorm(sys)
    if strategy.tag == "rowmean":
        return init_rowmean(sys)
    return load_predicted(strategy.path, sys.id)
