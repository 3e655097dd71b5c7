"""Pauli-string decomposition A = sum_l c_l P_l and O(N)-per-term application.

Labels are strings over {I, X, Y, Z} with qubit 0 leftmost, matching the
Kronecker-product order used by the simulator.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from . import kernels

__all__ = [
    "PauliString",
    "PauliTerm",
    "PauliDecomposition",
    "decompose",
    "reconstruct",
    "apply_term",
    "apply_decomposition",
    "to_json",
    "from_json",
]

_CHARS = "IXYZ"
_CHAR_INDEX = {ch: k for k, ch in enumerate(_CHARS)}

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class PauliString:
    label: str

    def __post_init__(self):
        if not self.label:
            raise ValueError("empty Pauli label")
        bad = set(self.label) - set(_CHARS)
        if bad:
            raise ValueError(f"invalid Pauli characters {sorted(bad)} in {self.label!r}")

    @property
    def qubits(self) -> int:
        return len(self.label)

    def masks(self):
        """(x_mask, zy_mask, phase_y): bit masks over amplitude indices.

        X and Y flip their bit; Z and Y pick up (−1)^bit; each Y contributes
        a factor i on top of the sign, collected into phase_y = i^(#Y).
        """
        q = len(self.label)
        x_mask = 0
        zy_mask = 0
        n_y = 0
        for j, ch in enumerate(self.label):
            bit = 1 << (q - 1 - j)
            if ch in ("X", "Y"):
                x_mask |= bit
            if ch in ("Z", "Y"):
                zy_mask |= bit
            if ch == "Y":
                n_y += 1
        return x_mask, zy_mask, 1j ** (n_y % 4)


@dataclass(frozen=True)
class PauliTerm:
    coeff: complex
    string: PauliString


@dataclass
class PauliDecomposition:
    qubits: int
    terms: List[PauliTerm]
    _packed: tuple = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        seen = set()
        for t in self.terms:
            if t.string.qubits != self.qubits:
                raise ValueError(
                    f"term {t.string.label!r} has {t.string.qubits} qubits, "
                    f"decomposition has {self.qubits}"
                )
            if t.string.label in seen:
                raise ValueError(f"duplicate Pauli string {t.string.label!r}")
            seen.add(t.string.label)

    def packed(self):
        """Mask/coefficient arrays in fixed term order, built once."""
        if self._packed is None:
            n = len(self.terms)
            coeffs = np.empty(n, dtype=np.complex128)
            x_masks = np.empty(n, dtype=np.int64)
            zy_masks = np.empty(n, dtype=np.int64)
            phases = np.empty(n, dtype=np.complex128)
            for k, t in enumerate(self.terms):
                fx, zy, py = t.string.masks()
                coeffs[k] = t.coeff
                x_masks[k] = fx
                zy_masks[k] = zy
                phases[k] = py
            self._packed = (coeffs, x_masks, zy_masks, phases)
        return self._packed


def _qubit_count(n: int) -> int:
    q = int(n).bit_length() - 1
    if n < 2 or (1 << q) != n:
        raise ValueError(f"dimension {n} is not a power of two >= 2")
    return q


def _index_to_label(index: int, q: int) -> str:
    chars = []
    for j in range(q - 1, -1, -1):
        chars.append(_CHARS[(index >> (2 * j)) & 3])
    return "".join(chars)


def _label_to_index(label: str) -> int:
    index = 0
    for ch in label:
        index = (index << 2) | _CHAR_INDEX[ch]
    return index


def decompose(a: np.ndarray, tol: float = DEFAULT_TOL) -> PauliDecomposition:
    """All 4^q coefficients c_l = Tr(P_l A)/N via the recursive block
    transform, O(N^2 log N) total; terms with |c_l| <= tol are dropped.

    Each level splits every block M = [[m00, m01], [m10, m11]] into the four
    single-qubit coefficients (m00+m11)/2, (m01+m10)/2, i(m01−m10)/2,
    (m00−m11)/2, so after q levels the flat output is indexed base 4 with
    digit j (most significant first) naming the Pauli on qubit j.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    q = _qubit_count(n)

    blocks = a.astype(np.complex128).reshape(1, n, n)
    for _ in range(q):
        m, d, _ = blocks.shape
        h = d // 2
        tl = blocks[:, :h, :h]
        tr = blocks[:, :h, h:]
        bl = blocks[:, h:, :h]
        br = blocks[:, h:, h:]
        nxt = np.empty((m, 4, h, h), dtype=np.complex128)
        nxt[:, 0] = (tl + br) * 0.5
        nxt[:, 1] = (tr + bl) * 0.5
        nxt[:, 2] = (tr - bl) * 0.5j
        nxt[:, 3] = (tl - br) * 0.5
        blocks = nxt.reshape(m * 4, h, h)

    coeffs = blocks.reshape(-1)
    keep = np.flatnonzero(np.abs(coeffs) > tol)
    terms = [
        PauliTerm(complex(coeffs[k]), PauliString(_index_to_label(int(k), q)))
        for k in keep
    ]
    return PauliDecomposition(qubits=q, terms=terms)


def reconstruct(d: PauliDecomposition) -> np.ndarray:
    """Dense sum c_l P_l, via the inverse of the decompose block transform."""
    q = d.qubits
    vec = np.zeros(4**q, dtype=np.complex128)
    for t in d.terms:
        vec[_label_to_index(t.string.label)] = t.coeff

    blocks = vec.reshape(-1, 1, 1)
    for _ in range(q):
        m = blocks.shape[0] // 4
        h = blocks.shape[1]
        g = blocks.reshape(m, 4, h, h)
        ci, cx, cy, cz = g[:, 0], g[:, 1], g[:, 2], g[:, 3]
        out = np.empty((m, 2 * h, 2 * h), dtype=np.complex128)
        out[:, :h, :h] = ci + cz
        out[:, :h, h:] = cx - 1j * cy
        out[:, h:, :h] = cx + 1j * cy
        out[:, h:, h:] = ci - cz
        blocks = out
    return blocks[0]


def apply_term(s: PauliString, v) -> np.ndarray:
    """P_s v by bit-indexed traversal, O(N)."""
    amps = np.ascontiguousarray(getattr(v, "amplitudes", v), dtype=np.complex128)
    if amps.shape != (1 << s.qubits,):
        raise ValueError(
            f"vector has shape {amps.shape}, expected ({1 << s.qubits},) "
            f"for label {s.label!r}"
        )
    fx, zy, phase_y = s.masks()
    return kernels.pauli_term_amps(amps, fx, zy, phase_y)


def apply_decomposition(d: PauliDecomposition, v) -> np.ndarray:
    """sum_l c_l (P_l v) with a fixed term order for bit-reproducibility."""
    amps = np.ascontiguousarray(getattr(v, "amplitudes", v), dtype=np.complex128)
    if amps.shape != (1 << d.qubits,):
        raise ValueError(f"vector has shape {amps.shape}, expected ({1 << d.qubits},)")
    coeffs, x_masks, zy_masks, phases = d.packed()
    if len(d.terms) == 0:
        return np.zeros_like(amps)
    return kernels.pauli_sum_amps(coeffs, x_masks, zy_masks, phases, amps)


def to_json(d: PauliDecomposition) -> dict:
    """JSON-ready dict: {qubits, terms: [[re, im, label], ...]} sorted by label."""
    terms = sorted(d.terms, key=lambda t: t.string.label)
    return {
        "qubits": d.qubits,
        "terms": [[float(t.coeff.real), float(t.coeff.imag), t.string.label] for t in terms],
    }


def from_json(payload: dict) -> PauliDecomposition:
    terms = [
        PauliTerm(complex(re, im), PauliString(label))
        for re, im, label in payload["terms"]
    ]
    return PauliDecomposition(qubits=int(payload["qubits"]), terms=terms)
