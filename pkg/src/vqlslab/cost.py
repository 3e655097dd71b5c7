"""Loss functions that score a candidate state against a linear system.

Both losses compare psi = A x to the target direction b without ever
normalizing psi explicitly:

    global:  raw = <psi|psi> - |<b|psi>|^2
    local:   raw = <phi|phi> - (1/q) sum_j Pi_j(phi),  phi = U_b^dagger psi

where Pi_j(phi) sums |phi_k|^2 over the indices whose j-th qubit is 0.
The normalized variant divides by <psi|psi>, landing in [0, 1]: zero
exactly when A x is parallel to b, one when the overlap vanishes.  The
local flavor replaces the rank-one projector onto b with a mean of
single-qubit projectors, which keeps its gradients alive on large
registers while never exceeding the global value.

Gradients with respect to the ansatz angles come from exact quarter-turn
parameter shifts on the raw numerator and denominator separately,
combined with the quotient rule; a central-difference fallback exists
for cross-checking.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .pauli import PauliDecomposition, apply_decomposition
from .problem import LinearSystem
from .simulator import BPrepOperator, ParamSet, StateVector, apply_bprep_adjoint, build_bprep

# below this squared norm the normalized cost is numerically meaningless
DEGENERATE_NORM_SQ = 1e-14

_KINDS = ("global", "local")


class DegenerateCostError(ValueError):
    """A x collapsed to (numerically) zero, so cost ratios are undefined."""


@dataclass(frozen=True)
class CostReport:
    """One cost evaluation: raw numerator, normalized value, denominator."""

    kind: str
    raw: float
    normalized: float
    psi_norm_sq: float

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown cost kind {self.kind!r}")
        if not (-1e-9 <= self.normalized <= 1.0 + 1e-9):
            raise ValueError(f"normalized cost {self.normalized} outside [0, 1]")


def _matvec(system: LinearSystem, amps: np.ndarray,
            decomposition: Optional[PauliDecomposition]) -> np.ndarray:
    if decomposition is not None:
        return apply_decomposition(decomposition, amps)
    return system.matrix @ amps


def _raw_global(system: LinearSystem, psi: np.ndarray) -> tuple[float, float]:
    den = np.vdot(psi, psi).real
    if den < DEGENERATE_NORM_SQ:
        raise DegenerateCostError(f"squared norm of A x is {den:.3e}")
    overlap = np.vdot(system.rhs, psi)
    return den - (overlap.real ** 2 + overlap.imag ** 2), den


def _raw_local(system: LinearSystem, psi: np.ndarray,
               u: BPrepOperator) -> tuple[float, float]:
    den = np.vdot(psi, psi).real
    if den < DEGENERATE_NORM_SQ:
        raise DegenerateCostError(f"squared norm of A x is {den:.3e}")
    phi = apply_bprep_adjoint(u, psi)
    weights = kernels.zero_bit_weights(phi, system.qubits)
    return den - weights.mean(), den


def global_cost(system: LinearSystem, state: StateVector,
                decomposition: Optional[PauliDecomposition] = None) -> CostReport:
    """Score of A|state> against the rank-one projector onto b."""
    psi = _matvec(system, state.amplitudes, decomposition)
    raw, den = _raw_global(system, psi)
    return CostReport("global", raw, raw / den, den)


def local_cost(system: LinearSystem, state: StateVector, u: BPrepOperator,
               decomposition: Optional[PauliDecomposition] = None) -> CostReport:
    """Score of A|state> against the qubit-averaged projector, via u = U_b."""
    psi = _matvec(system, state.amplitudes, decomposition)
    raw, den = _raw_local(system, psi, u)
    return CostReport("local", raw, raw / den, den)


def _evaluate(system: LinearSystem, angles: np.ndarray, kind: str,
              u: Optional[BPrepOperator],
              decomposition: Optional[PauliDecomposition]) -> tuple[float, float]:
    amps = kernels.ansatz_amps(angles, system.qubits)
    psi = _matvec(system, amps, decomposition)
    if kind == "global":
        return _raw_global(system, psi)
    return _raw_local(system, psi, u)


def _require_kind(kind: str) -> None:
    if kind not in _KINDS:
        raise ValueError(f"unknown cost kind {kind!r}")


def cost_gradient(system: LinearSystem, params: ParamSet, kind: str,
                  u: Optional[BPrepOperator] = None,
                  decomposition: Optional[PauliDecomposition] = None) -> np.ndarray:
    """Exact gradient of the normalized cost, shaped like params.angles.

    Every angle enters the circuit through a single rotation gate, so both
    the raw cost and the denominator obey the two-point parameter-shift
    rule df/dt = (f(t + pi/2) - f(t - pi/2)) / 2.  The normalized gradient
    then follows from the quotient rule, using one unshifted evaluation
    plus two per angle.
    """
    _require_kind(kind)
    if kind == "local" and u is None:
        u = build_bprep(system.rhs)
    raw0, den0 = _evaluate(system, params.angles, kind, u, decomposition)
    grad = np.empty_like(params.angles)
    work = params.angles.copy()
    for j in range(params.qubits):
        for slot in range(3):
            original = work[j, slot]
            work[j, slot] = original + 0.5 * np.pi
            raw_p, den_p = _evaluate(system, work, kind, u, decomposition)
            work[j, slot] = original - 0.5 * np.pi
            raw_m, den_m = _evaluate(system, work, kind, u, decomposition)
            work[j, slot] = original
            d_raw = 0.5 * (raw_p - raw_m)
            d_den = 0.5 * (den_p - den_m)
            grad[j, slot] = (d_raw * den0 - raw0 * d_den) / (den0 * den0)
    return grad


def finite_diff_gradient(system: LinearSystem, params: ParamSet, kind: str,
                         u: Optional[BPrepOperator] = None, h: float = 1e-5,
                         decomposition: Optional[PauliDecomposition] = None) -> np.ndarray:
    """Central-difference gradient of the normalized cost, step h per angle."""
    _require_kind(kind)
    if h <= 0.0:
        raise ValueError(f"step must be positive, got {h}")
    if kind == "local" and u is None:
        u = build_bprep(system.rhs)
    grad = np.empty_like(params.angles)
    work = params.angles.copy()
    for j in range(params.qubits):
        for slot in range(3):
            original = work[j, slot]
            work[j, slot] = original + h
            raw_p, den_p = _evaluate(system, work, kind, u, decomposition)
            work[j, slot] = original - h
            raw_m, den_m = _evaluate(system, work, kind, u, decomposition)
            work[j, slot] = original
            grad[j, slot] = (raw_p / den_p - raw_m / den_m) / (2.0 * h)
    return grad
