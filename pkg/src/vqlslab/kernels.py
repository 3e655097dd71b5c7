"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Backend selection: the VQLS_BENCH_BACKEND environment variable picks
"numba", "numpy", or "auto" (default: numba when importable).  Tests and
the benchmark switch at runtime via set_backend().

Index convention used everywhere: qubit j addresses bit (q - 1 - j) of the
amplitude index, i.e. qubit 0 is the leftmost factor of a Kronecker product.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


# ---------------------------------------------------------------------------
# pure numpy implementations
# ---------------------------------------------------------------------------

def _axis_view(amps, qubits, qubit):
    # (left, 2, right) view with the target qubit on the middle axis
    left = 1 << qubit
    right = 1 << (qubits - 1 - qubit)
    return amps.reshape(left, 2, right)


def _ry_numpy(amps, qubits, qubit, theta):
    c = np.cos(0.5 * theta)
    s = np.sin(0.5 * theta)
    view = _axis_view(amps, qubits, qubit)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = c * a0 - s * a1
    view[:, 1, :] = s * a0 + c * a1


def _rz_numpy(amps, qubits, qubit, theta):
    view = _axis_view(amps, qubits, qubit)
    view[:, 0, :] *= np.exp(-0.5j * theta)
    view[:, 1, :] *= np.exp(0.5j * theta)


def _cz_numpy(amps, qubits, qubit_a, qubit_b):
    lo, hi = sorted((qubit_a, qubit_b))
    left = 1 << lo
    mid = 1 << (hi - lo - 1)
    right = 1 << (qubits - 1 - hi)
    view = amps.reshape(left, 2, mid, 2, right)
    view[:, 1, :, 1, :] *= -1.0


def _cz_ring_numpy(amps, qubits):
    if qubits == 1:
        return
    if qubits == 2:
        _cz_numpy(amps, qubits, 0, 1)
        return
    for j in range(qubits):
        _cz_numpy(amps, qubits, j, (j + 1) % qubits)


def _ansatz_numpy(angles, qubits):
    amps = np.zeros(1 << qubits, dtype=np.complex128)
    amps[0] = 1.0
    for j in range(qubits):
        _ry_numpy(amps, qubits, j, angles[j, 0])
    for j in range(qubits):
        _rz_numpy(amps, qubits, j, angles[j, 1])
    _cz_ring_numpy(amps, qubits)
    for j in range(qubits):
        _ry_numpy(amps, qubits, j, angles[j, 2])
    _cz_ring_numpy(amps, qubits)
    return amps


def _pauli_numpy(amps, x_mask, zy_mask, phase_y):
    n = amps.shape[0]
    idx = np.arange(n)
    parity = np.bitwise_count(idx & zy_mask) & 1
    phase = phase_y * (1.0 - 2.0 * parity)
    out = np.empty_like(amps)
    out[idx ^ x_mask] = phase * amps
    return out


def _pauli_sum_numpy(coeffs, x_masks, zy_masks, phases_y, amps):
    n = amps.shape[0]
    idx = np.arange(n)
    out = np.zeros_like(amps)
    for t in range(coeffs.shape[0]):
        parity = np.bitwise_count(idx & zy_masks[t]) & 1
        phase = (coeffs[t] * phases_y[t]) * (1.0 - 2.0 * parity)
        np.add.at(out, idx ^ x_masks[t], phase * amps)
    return out


def _zero_bit_weights_numpy(amps, qubits):
    w = np.empty(qubits)
    for j in range(qubits):
        view = _axis_view(amps, qubits, j)
        w[j] = np.sum(np.abs(view[:, 0, :]) ** 2)
    return w


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if numba is not None:
    _njit = numba.njit(cache=True, nogil=True)

    @_njit
    def _ry_numba(amps, qubits, qubit, theta):
        c = np.cos(0.5 * theta)
        s = np.sin(0.5 * theta)
        bit = 1 << (qubits - 1 - qubit)
        n = amps.shape[0]
        for k in range(n):
            if k & bit:
                continue
            k1 = k | bit
            a0 = amps[k]
            a1 = amps[k1]
            amps[k] = c * a0 - s * a1
            amps[k1] = s * a0 + c * a1

    @_njit
    def _rz_numba(amps, qubits, qubit, theta):
        p0 = np.exp(-0.5j * theta)
        p1 = np.exp(0.5j * theta)
        bit = 1 << (qubits - 1 - qubit)
        n = amps.shape[0]
        for k in range(n):
            if k & bit:
                amps[k] *= p1
            else:
                amps[k] *= p0

    @_njit
    def _cz_numba(amps, qubits, qubit_a, qubit_b):
        bit_a = 1 << (qubits - 1 - qubit_a)
        bit_b = 1 << (qubits - 1 - qubit_b)
        n = amps.shape[0]
        for k in range(n):
            if (k & bit_a) and (k & bit_b):
                amps[k] = -amps[k]

    @_njit
    def _cz_ring_numba(amps, qubits):
        if qubits == 1:
            return
        if qubits == 2:
            _cz_numba(amps, qubits, 0, 1)
            return
        for j in range(qubits):
            _cz_numba(amps, qubits, j, (j + 1) % qubits)

    @_njit
    def _ansatz_numba(angles, qubits):
        amps = np.zeros(1 << qubits, dtype=np.complex128)
        amps[0] = 1.0
        for j in range(qubits):
            _ry_numba(amps, qubits, j, angles[j, 0])
        for j in range(qubits):
            _rz_numba(amps, qubits, j, angles[j, 1])
        _cz_ring_numba(amps, qubits)
        for j in range(qubits):
            _ry_numba(amps, qubits, j, angles[j, 2])
        _cz_ring_numba(amps, qubits)
        return amps

    @_njit
    def _parity64(x):
        x ^= x >> 32
        x ^= x >> 16
        x ^= x >> 8
        x ^= x >> 4
        x ^= x >> 2
        x ^= x >> 1
        return x & 1

    @_njit
    def _pauli_numba(amps, x_mask, zy_mask, phase_y):
        n = amps.shape[0]
        out = np.empty_like(amps)
        for k in range(n):
            if _parity64(k & zy_mask):
                out[k ^ x_mask] = -phase_y * amps[k]
            else:
                out[k ^ x_mask] = phase_y * amps[k]
        return out

    @_njit
    def _pauli_sum_numba(coeffs, x_masks, zy_masks, phases_y, amps):
        n = amps.shape[0]
        out = np.zeros_like(amps)
        for t in range(coeffs.shape[0]):
            cp = coeffs[t] * phases_y[t]
            fx = x_masks[t]
            zy = zy_masks[t]
            for k in range(n):
                if _parity64(k & zy):
                    out[k ^ fx] -= cp * amps[k]
                else:
                    out[k ^ fx] += cp * amps[k]
        return out

    @_njit
    def _zero_bit_weights_numba(amps, qubits):
        n = amps.shape[0]
        w = np.zeros(qubits)
        for k in range(n):
            p = amps[k].real ** 2 + amps[k].imag ** 2
            for j in range(qubits):
                if not (k >> (qubits - 1 - j)) & 1:
                    w[j] += p
        return w


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

def _resolve(name):
    name = (name or "auto").strip().lower()
    if name in ("", "auto"):
        return "numba" if numba is not None else "numpy"
    if name == "numba":
        if numba is None:
            raise RuntimeError("VQLS_BENCH_BACKEND=numba but numba is not importable")
        return "numba"
    if name == "numpy":
        return "numpy"
    raise ValueError(f"unknown backend {name!r} (expected auto, numba, or numpy)")


_backend = _resolve(os.environ.get("VQLS_BENCH_BACKEND", "auto"))


def active_backend():
    """Name of the backend currently answering kernel calls."""
    return _backend


def available_backends():
    return ("numba", "numpy") if numba is not None else ("numpy",)


def set_backend(name):
    """Switch kernel implementations at runtime; returns the previous name."""
    global _backend
    previous = _backend
    _backend = _resolve(name)
    return previous


def apply_ry_amps(amps, qubits, qubit, theta):
    if _backend == "numba":
        _ry_numba(amps, qubits, qubit, theta)
    else:
        _ry_numpy(amps, qubits, qubit, theta)


def apply_rz_amps(amps, qubits, qubit, theta):
    if _backend == "numba":
        _rz_numba(amps, qubits, qubit, theta)
    else:
        _rz_numpy(amps, qubits, qubit, theta)


def apply_cz_amps(amps, qubits, qubit_a, qubit_b):
    if _backend == "numba":
        _cz_numba(amps, qubits, qubit_a, qubit_b)
    else:
        _cz_numpy(amps, qubits, qubit_a, qubit_b)


def ansatz_amps(angles, qubits):
    if _backend == "numba":
        return _ansatz_numba(angles, qubits)
    return _ansatz_numpy(angles, qubits)


def pauli_term_amps(amps, x_mask, zy_mask, phase_y):
    if _backend == "numba":
        return _pauli_numba(amps, x_mask, zy_mask, phase_y)
    return _pauli_numpy(amps, x_mask, zy_mask, phase_y)


def pauli_sum_amps(coeffs, x_masks, zy_masks, phases_y, amps):
    if _backend == "numba":
        return _pauli_sum_numba(coeffs, x_masks, zy_masks, phases_y, amps)
    return _pauli_sum_numpy(coeffs, x_masks, zy_masks, phases_y, amps)


def zero_bit_weights(amps, qubits):
    """Probability mass with qubit j in |0>, for each j, of an unnormalized state."""
    if _backend == "numba":
        return _zero_bit_weights_numba(amps, qubits)
    return _zero_bit_weights_numpy(amps, qubits)
