"""Dense reference implementations used as test oracles.

Everything here is deliberately naive: explicit Kronecker products, dense
unitary composition, dense projectors. The production code must agree with
these, not share code with them.
"""

import numpy as np

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_all(mats):
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def label_matrix(label):
    """Dense matrix of a Pauli string, qubit 0 leftmost."""
    return kron_all([PAULI[ch] for ch in label])


def all_labels(q):
    labels = [""]
    for _ in range(q):
        labels = [s + ch for s in labels for ch in "IXYZ"]
    return labels


def trace_decompose(a):
    """Coefficient table via the explicit trace formula, O(4^q) products."""
    n = a.shape[0]
    q = n.bit_length() - 1
    out = {}
    for label in all_labels(q):
        c = np.trace(label_matrix(label) @ a) / n
        out[label] = c
    return out


def ry_matrix(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz_matrix(theta):
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def single_qubit_on(q, j, gate):
    return kron_all([gate if k == j else PAULI["I"] for k in range(q)])


def cz_matrix(q, i, j):
    n = 1 << q
    d = np.ones(n, dtype=complex)
    bi, bj = 1 << (q - 1 - i), 1 << (q - 1 - j)
    for k in range(n):
        if (k & bi) and (k & bj):
            d[k] = -1.0
    return np.diag(d)


def cz_ring_matrix(q):
    n = 1 << q
    out = np.eye(n, dtype=complex)
    if q == 1:
        return out
    if q == 2:
        return cz_matrix(2, 0, 1)
    for j in range(q):
        out = cz_matrix(q, j, (j + 1) % q) @ out
    return out


def ansatz_matrix(angles, q):
    """Dense composition of the documented layer order:
    Ry(slot 0) wall, Rz(slot 1) wall, CZ ring, Ry(slot 2) wall, CZ ring."""
    ry0 = kron_all([ry_matrix(angles[j, 0]) for j in range(q)])
    rz1 = kron_all([rz_matrix(angles[j, 1]) for j in range(q)])
    ry2 = kron_all([ry_matrix(angles[j, 2]) for j in range(q)])
    ring = cz_ring_matrix(q)
    return ring @ ry2 @ ring @ rz1 @ ry0


def ansatz_oracle(angles, q):
    e0 = np.zeros(1 << q, dtype=complex)
    e0[0] = 1.0
    return ansatz_matrix(np.asarray(angles, dtype=float), q) @ e0


def householder_matrix(b):
    """Dense U_b with U_b e_0 = b: phase-rotated Householder reflection."""
    b = np.asarray(b, dtype=complex)
    n = b.shape[0]
    phi = np.angle(b[0]) if b[0] != 0 else 0.0
    bp = b * np.exp(-1j * phi)
    e0 = np.zeros(n, dtype=complex)
    e0[0] = 1.0
    u = e0 - bp
    nu = np.linalg.norm(u)
    if nu < 1e-12:
        return np.exp(1j * phi) * np.eye(n, dtype=complex)
    w = u / nu
    return np.exp(1j * phi) * (np.eye(n, dtype=complex) - 2.0 * np.outer(w, w.conj()))


def global_cost_oracle(a, b, x):
    """(raw, normalized, den) from the dense quadratic forms."""
    psi = a @ x
    den = np.vdot(psi, psi).real
    raw = den - abs(np.vdot(b, psi)) ** 2
    return raw, raw / den, den


def zero_projector(q, j):
    p0 = np.array([[1, 0], [0, 0]], dtype=complex)
    return single_qubit_on(q, j, p0)


def local_cost_oracle(a, b, x):
    """(raw, normalized, den) via the dense effective-Hamiltonian build."""
    n = a.shape[0]
    q = n.bit_length() - 1
    ub = householder_matrix(b)
    proj_avg = np.zeros((n, n), dtype=complex)
    for j in range(q):
        proj_avg += zero_projector(q, j)
    proj_avg /= q
    h = a.conj().T @ ub @ (np.eye(n) - proj_avg) @ ub.conj().T @ a
    raw = np.vdot(x, h @ x).real
    psi = a @ x
    den = np.vdot(psi, psi).real
    return raw, raw / den, den


def random_unit(rng, n, complex_valued=True):
    v = rng.standard_normal(n)
    if complex_valued:
        v = v + 1j * rng.standard_normal(n)
    v = v.astype(complex)
    return v / np.linalg.norm(v)


def bloch_angles_oracle(x, q):
    """Per-qubit (theta, phi) of the single-qubit reduced states of x."""
    rho_angles = []
    psi = np.asarray(x, dtype=complex).reshape([2] * q)
    for j in range(q):
        m = np.moveaxis(psi, j, 0).reshape(2, -1)
        rho = m @ m.conj().T
        rx = 2 * rho[0, 1].real
        ry = -2 * rho[0, 1].imag
        rz = (rho[0, 0] - rho[1, 1]).real
        theta = np.arctan2(np.hypot(rx, ry), rz)
        phi = np.arctan2(ry, rx) if rx * rx + ry * ry >= 1e-20 else 0.0
        rho_angles.append((theta, phi))
    return rho_angles
