"""Exact statevector simulation of the ansatz V(alpha) and b-preparation.

Qubit j addresses bit (q - 1 - j) of the amplitude index, so qubit 0 is the
leftmost factor of a Kronecker product and labels read left to right.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels

__all__ = [
    "StateVector",
    "ParamSet",
    "BPrepOperator",
    "prepare_zero",
    "apply_ry",
    "apply_rz",
    "apply_cz",
    "ansatz_state",
    "build_bprep",
    "apply_bprep_adjoint",
]


@dataclass
class StateVector:
    """A 2^q amplitude buffer, mutated in place by gate application."""

    qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.qubits < 1:
            raise ValueError("need at least one qubit")
        if self.amplitudes.shape != (1 << self.qubits,):
            raise ValueError(
                f"amplitude buffer has shape {self.amplitudes.shape}, "
                f"expected ({1 << self.qubits},)"
            )

    @property
    def dim(self) -> int:
        return 1 << self.qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.qubits, self.amplitudes.copy())

    def to_json(self):
        """Amplitudes as [re, im] pairs, for debugging dumps."""
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]


@dataclass
class ParamSet:
    """Ansatz angles, one row per qubit, three rotation slots per row."""

    qubits: int
    angles: np.ndarray

    def __post_init__(self):
        self.angles = np.ascontiguousarray(self.angles, dtype=np.float64)
        if self.angles.shape != (self.qubits, 3):
            raise ValueError(
                f"angles have shape {self.angles.shape}, expected ({self.qubits}, 3)"
            )
        if not np.all(np.isfinite(self.angles)):
            raise ValueError("angles must be finite")

    def copy(self) -> "ParamSet":
        return ParamSet(self.qubits, self.angles.copy())

    def flat(self) -> np.ndarray:
        return self.angles.reshape(-1)


@dataclass
class BPrepOperator:
    """Householder form of U_b with U_b|0...0> = |b>.

    U_b = phase * (I - 2 w w†); the reflection is its own inverse, so the
    adjoint costs one inner product and one axpy.  identity=True means
    U_b = phase * I (b was e_0 up to phase).
    """

    qubits: int
    phase: complex
    identity: bool = False
    w: Optional[np.ndarray] = field(default=None)

    @property
    def dim(self) -> int:
        return 1 << self.qubits


def prepare_zero(q: int) -> StateVector:
    """|0...0> on q qubits."""
    if q < 1:
        raise ValueError("need at least one qubit")
    amps = np.zeros(1 << q, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(q, amps)


def _check_qubit(v: StateVector, qubit: int):
    if not 0 <= qubit < v.qubits:
        raise IndexError(f"qubit {qubit} out of range for {v.qubits}-qubit state")


def apply_ry(v: StateVector, qubit: int, theta: float) -> StateVector:
    _check_qubit(v, qubit)
    kernels.apply_ry_amps(v.amplitudes, v.qubits, qubit, float(theta))
    return v


def apply_rz(v: StateVector, qubit: int, theta: float) -> StateVector:
    _check_qubit(v, qubit)
    kernels.apply_rz_amps(v.amplitudes, v.qubits, qubit, float(theta))
    return v


def apply_cz(v: StateVector, i: int, j: int) -> StateVector:
    _check_qubit(v, i)
    _check_qubit(v, j)
    if i == j:
        raise ValueError("CZ needs two distinct qubits")
    kernels.apply_cz_amps(v.amplitudes, v.qubits, i, j)
    return v


def ansatz_state(p: ParamSet) -> StateVector:
    """V(alpha)|0...0> for the fixed hardware-efficient layout.

    Layers, in application order: Ry(angles[:,0]) on every qubit, then
    Rz(angles[:,1]) on every qubit, then a CZ ring (0-1, 1-2, ..., (q-1)-0;
    a single CZ at q=2, none at q=1), then Ry(angles[:,2]) on every qubit,
    then a second CZ ring.  All-zero angles give the identity circuit.

    Both rings sit after the Rz wall: CZ and Rz are simultaneously diagonal,
    so a ring on each side of the Rz wall would commute through it and
    cancel, leaving a product circuit with no entanglement.
    """
    amps = kernels.ansatz_amps(p.angles, p.qubits)
    return StateVector(p.qubits, amps)


def build_bprep(b: np.ndarray) -> BPrepOperator:
    """Householder operator taking |0...0> to the unit vector b."""
    b = np.ascontiguousarray(b, dtype=np.complex128)
    n = b.shape[0]
    if n < 2 or (n & (n - 1)) != 0:
        raise ValueError(f"b has length {n}, expected a power of two >= 2")
    if abs(np.linalg.norm(b) - 1.0) > 1e-10:
        raise ValueError("b must have unit 2-norm")
    q = int(n).bit_length() - 1

    # rotate the global phase so the |0...0> component is real and nonnegative
    phi = float(np.angle(b[0])) if b[0] != 0 else 0.0
    phase = complex(np.exp(1j * phi))
    b_prime = b * np.conj(phase)

    residual = b_prime.copy()
    residual[0] -= 1.0
    res_norm = np.linalg.norm(residual)
    if res_norm < 1e-12:
        return BPrepOperator(qubits=q, phase=phase, identity=True)
    w = -residual / res_norm
    return BPrepOperator(qubits=q, phase=phase, identity=False, w=w)


def apply_bprep_adjoint(u: BPrepOperator, v: np.ndarray) -> np.ndarray:
    """U_b† v in O(N) from the Householder form."""
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (u.dim,):
        raise ValueError(f"vector has shape {v.shape}, expected ({u.dim},)")
    out = v * np.conj(u.phase)
    if not u.identity:
        out -= (2.0 * np.vdot(u.w, out)) * u.w
    return out
