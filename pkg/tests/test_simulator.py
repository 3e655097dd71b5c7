import numpy as np
import pytest

from vqlslab import simulator as sim

from oracles import ansatz_matrix, ansatz_oracle, householder_matrix, random_unit


def test_prepare_zero():
    v = sim.prepare_zero(1)
    assert np.allclose(v.amplitudes, [1.0, 0.0])
    v = sim.prepare_zero(2)
    assert np.allclose(v.amplitudes, [1.0, 0.0, 0.0, 0.0])
    assert v.norm() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        sim.prepare_zero(0)


def test_ry_half_turn_flips():
    v = sim.apply_ry(sim.prepare_zero(1), 0, np.pi)
    assert np.allclose(v.amplitudes, [0.0, 1.0], atol=1e-15)


def test_rz_phases_zero_state():
    theta = 0.731
    v = sim.apply_rz(sim.prepare_zero(1), 0, theta)
    assert np.allclose(v.amplitudes, [np.exp(-0.5j * theta), 0.0])
    assert abs(v.amplitudes[0]) == pytest.approx(1.0)


def test_cz_signs():
    one_one = sim.StateVector(2, np.array([0, 0, 0, 1], dtype=complex))
    sim.apply_cz(one_one, 0, 1)
    assert np.allclose(one_one.amplitudes, [0, 0, 0, -1])
    zero = sim.prepare_zero(2)
    sim.apply_cz(zero, 0, 1)
    assert np.allclose(zero.amplitudes, [1, 0, 0, 0])


def test_gate_index_validation():
    v = sim.prepare_zero(2)
    with pytest.raises(IndexError):
        sim.apply_ry(v, 2, 0.1)
    with pytest.raises(IndexError):
        sim.apply_rz(v, -1, 0.1)
    with pytest.raises(ValueError):
        sim.apply_cz(v, 1, 1)


def test_gates_preserve_norm():
    rng = np.random.default_rng(41)
    v = sim.StateVector(3, random_unit(rng, 8))
    for _ in range(30):
        op = rng.integers(3)
        if op == 0:
            sim.apply_ry(v, int(rng.integers(3)), rng.uniform(-7, 7))
        elif op == 1:
            sim.apply_rz(v, int(rng.integers(3)), rng.uniform(-7, 7))
        else:
            i, j = rng.choice(3, size=2, replace=False)
            sim.apply_cz(v, int(i), int(j))
        assert abs(v.norm() - 1.0) < 1e-12


def test_ansatz_zero_angles_is_identity():
    for q in (1, 2, 3, 5):
        v = sim.ansatz_state(sim.ParamSet(q, np.zeros((q, 3))))
        want = np.zeros(1 << q)
        want[0] = 1.0
        assert np.allclose(v.amplitudes, want, atol=1e-15)


def test_ansatz_single_qubit_ry():
    v = sim.ansatz_state(sim.ParamSet(1, np.array([[np.pi / 2, 0.0, 0.0]])))
    assert np.allclose(v.amplitudes, np.array([1.0, 1.0]) / np.sqrt(2))


def test_ansatz_matches_dense_oracle_q2():
    rng = np.random.default_rng(43)
    for _ in range(20):
        angles = rng.uniform(0, 2 * np.pi, (2, 3))
        got = sim.ansatz_state(sim.ParamSet(2, angles)).amplitudes
        assert np.allclose(got, ansatz_oracle(angles, 2), atol=1e-12)


def test_ansatz_matches_dense_oracle_q3():
    rng = np.random.default_rng(47)
    for _ in range(20):
        angles = rng.uniform(-np.pi, 3 * np.pi, (3, 3))
        got = sim.ansatz_state(sim.ParamSet(3, angles)).amplitudes
        assert np.linalg.norm(got - ansatz_oracle(angles, 3)) < 1e-12


def test_ansatz_entangles():
    # the slot-2 wall between the rings must be able to leave the product manifold
    rng = np.random.default_rng(7)
    best = 0.0
    for _ in range(5):
        angles = rng.uniform(0, 2 * np.pi, (2, 3))
        v = sim.ansatz_state(sim.ParamSet(2, angles)).amplitudes
        schmidt = np.linalg.svd(v.reshape(2, 2), compute_uv=False)
        best = max(best, schmidt[1])
    assert best > 0.1


def test_ansatz_continuity():
    rng = np.random.default_rng(53)
    angles = rng.uniform(0, 2 * np.pi, (3, 3))
    base = sim.ansatz_state(sim.ParamSet(3, angles)).amplitudes
    for q_idx in range(3):
        for slot in range(3):
            bumped = angles.copy()
            bumped[q_idx, slot] += 1e-7
            other = sim.ansatz_state(sim.ParamSet(3, bumped)).amplitudes
            assert np.linalg.norm(other - base) <= 1e-6


def test_ansatz_two_pi_periodic_up_to_phase():
    rng = np.random.default_rng(59)
    angles = rng.uniform(0, 2 * np.pi, (3, 3))
    base = sim.ansatz_state(sim.ParamSet(3, angles)).amplitudes
    for q_idx in range(3):
        for slot in range(3):
            shifted = angles.copy()
            shifted[q_idx, slot] += 2 * np.pi
            other = sim.ansatz_state(sim.ParamSet(3, shifted)).amplitudes
            fid = abs(np.vdot(base, other)) ** 2
            assert fid == pytest.approx(1.0, abs=1e-10)


def test_paramset_validation():
    with pytest.raises(ValueError):
        sim.ParamSet(2, np.zeros((2, 2)))
    with pytest.raises(ValueError):
        sim.ParamSet(2, np.full((2, 3), np.nan))


def test_bprep_basis_state_identity_flag():
    b = np.zeros(4, dtype=complex)
    b[0] = 1.0
    u = sim.build_bprep(b)
    assert u.identity


def test_bprep_uniform_superposition():
    b = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
    u = sim.build_bprep(b)
    e0 = np.array([1.0, 0.0], dtype=complex)
    # adjoint of the adjoint gives U_b e_0 via unitarity of the reflection
    dense = householder_matrix(b)
    assert np.allclose(dense @ e0, b, atol=1e-12)
    assert np.allclose(dense.conj().T @ dense, np.eye(2), atol=1e-12)
    assert np.allclose(sim.apply_bprep_adjoint(u, b), e0, atol=1e-12)


def test_bprep_global_phase_of_basis_state():
    b = np.zeros(2, dtype=complex)
    b[0] = 1j
    u = sim.build_bprep(b)
    assert u.identity
    assert u.phase == pytest.approx(1j)
    out = sim.apply_bprep_adjoint(u, b)
    assert np.allclose(np.abs(out), [1.0, 0.0])


def test_bprep_rejects_non_unit():
    with pytest.raises(ValueError):
        sim.build_bprep(np.array([1.0, 1.0], dtype=complex))


def test_bprep_maps_zero_to_b():
    rng = np.random.default_rng(61)
    for q in (1, 2, 3):
        for _ in range(10):
            b = random_unit(rng, 1 << q)
            u = sim.build_bprep(b)
            # U_b|0> = b  <=>  U_b† b = |0>, both checked against the dense form
            phi = sim.apply_bprep_adjoint(u, b)
            e0 = np.zeros(1 << q)
            e0[0] = 1.0
            assert np.allclose(np.abs(phi), e0, atol=1e-10)
            dense = householder_matrix(b)
            assert np.linalg.norm(dense[:, 0] - b) < 1e-10


def test_bprep_adjoint_matches_dense():
    rng = np.random.default_rng(67)
    for _ in range(20):
        b = random_unit(rng, 8)
        v = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        u = sim.build_bprep(b)
        want = householder_matrix(b).conj().T @ v
        assert np.allclose(sim.apply_bprep_adjoint(u, v), want, atol=1e-12)


def test_bprep_identity_flag_passthrough():
    b = np.zeros(4, dtype=complex)
    b[0] = 1.0
    u = sim.build_bprep(b)
    v = np.arange(4, dtype=complex)
    assert np.allclose(sim.apply_bprep_adjoint(u, v), v)


def test_bprep_adjoint_dimension_mismatch():
    b = np.array([1.0, 0.0], dtype=complex)
    with pytest.raises(ValueError):
        sim.apply_bprep_adjoint(sim.build_bprep(b), np.zeros(4, dtype=complex))


def test_state_json_dump():
    v = sim.prepare_zero(1)
    assert v.to_json() == [[1.0, 0.0], [0.0, 0.0]]
