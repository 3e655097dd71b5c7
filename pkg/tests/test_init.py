import numpy as np
import pytest
from scipy import stats

from vqlslab import cost, initializers, problem
from vqlslab.simulator import StateVector, ansatz_state

from oracles import bloch_angles_oracle, random_unit

TWO_PI = 2.0 * np.pi
# largest double below 2*pi; the affine maps send the max value here
TOP = np.nextafter(TWO_PI, 0.0)


def make_system(q, matrix, rhs=None):
    n = 1 << q
    if rhs is None:
        rhs = np.zeros(n)
        rhs[0] = 1.0
    return problem.LinearSystem(q, np.asarray(matrix, complex), np.asarray(rhs, complex), "t", {})


# ---------------------------------------------------------------------------
# uniform
# ---------------------------------------------------------------------------

def test_uniform_range_and_shape():
    p = initializers.init_uniform(3, 42)
    assert p.angles.shape == (3, 3)
    assert np.all(p.angles >= 0.0)
    assert np.all(p.angles < TWO_PI)


def test_uniform_deterministic_in_seed():
    a = initializers.init_uniform(4, 7)
    b = initializers.init_uniform(4, 7)
    assert np.array_equal(a.angles, b.angles)
    c = initializers.init_uniform(4, 8)
    assert not np.array_equal(a.angles, c.angles)


def test_uniform_distribution_statistics():
    draws = np.stack(
        [initializers.init_uniform(4, seed).angles for seed in range(10_000)]
    )
    slot_means = draws.mean(axis=0)
    assert np.all(np.abs(slot_means - np.pi) < 0.1)
    pooled = draws.reshape(-1)
    _, pvalue = stats.kstest(pooled, "uniform", args=(0.0, TWO_PI))
    assert pvalue > 0.001


# ---------------------------------------------------------------------------
# pca
# ---------------------------------------------------------------------------

def test_pca_dominant_diagonal_q2():
    sys = make_system(2, np.diag([5.0, 1.0, 1.0, 1.0]))
    p = initializers.init_pca(sys)
    # leading right singular vector e_0, cycled to 6 entries (1,0,0,0,1,0),
    # then min->0 and max->TOP
    expected = np.array([[TOP, 0.0, 0.0], [0.0, TOP, 0.0]])
    assert np.allclose(p.angles, expected, atol=1e-12)


def test_pca_sign_convention_q1():
    sys = make_system(1, np.diag([-5.0, 1.0]))
    p = initializers.init_pca(sys)
    # singular vector normalized so its largest-magnitude entry is positive
    expected = np.array([[TOP, 0.0, TOP]])
    assert np.allclose(p.angles, expected, atol=1e-12)


def test_pca_constant_component_gives_all_pi():
    sys = make_system(2, np.ones((4, 4)))
    p = initializers.init_pca(sys)
    assert np.allclose(p.angles, np.pi)


def test_pca_rejects_zero_real_part():
    sys = make_system(1, 1j * np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(ValueError):
        initializers.init_pca(sys)


def test_pca_scale_invariant():
    rng = np.random.default_rng(11)
    a = rng.standard_normal((16, 16))
    b = random_unit(rng, 16)
    base = initializers.init_pca(make_system(4, a, b))
    scaled = initializers.init_pca(make_system(4, 3.0 * a, b))
    assert np.allclose(base.angles, scaled.angles, atol=1e-12)


def test_pca_deterministic():
    rng = np.random.default_rng(13)
    sys = make_system(3, rng.standard_normal((8, 8)))
    a = initializers.init_pca(sys)
    b = initializers.init_pca(sys)
    assert np.array_equal(a.angles, b.angles)


# ---------------------------------------------------------------------------
# minnorm
# ---------------------------------------------------------------------------

def test_minnorm_identity_basis_target():
    sys = make_system(2, np.eye(4))
    p = initializers.init_minnorm(sys)
    assert np.allclose(p.angles, 0.0, atol=1e-12)
    rep = cost.global_cost(sys, ansatz_state(p))
    assert rep.normalized < 1e-12


def test_minnorm_uniform_superposition():
    b = np.full(4, 0.5)
    sys = make_system(2, np.eye(4), b)
    p = initializers.init_minnorm(sys)
    assert np.allclose(p.angles[:, 0], np.pi / 2, atol=1e-12)
    assert np.allclose(p.angles[:, 1], 0.0, atol=1e-12)
    assert np.allclose(p.angles[:, 2], 0.0)
    rep = cost.global_cost(sys, ansatz_state(p))
    assert rep.normalized < 0.05


def test_minnorm_basis_states_recovered():
    for k in range(4):
        b = np.zeros(4)
        b[k] = 1.0
        sys = make_system(2, np.eye(4), b)
        p = initializers.init_minnorm(sys)
        state = ansatz_state(p)
        assert abs(np.vdot(b, state.amplitudes)) ** 2 > 0.999


def test_minnorm_rejects_rhs_outside_range():
    # singular matrix with no zero rows; range is span{(1,1)}
    a = np.array([[1.0, 0.0], [1.0, 0.0]])
    b = np.array([1.0, -1.0]) / np.sqrt(2.0)
    sys = make_system(1, a, b)
    with pytest.raises(ValueError):
        initializers.init_minnorm(sys)


def test_minnorm_matches_bloch_oracle():
    rng = np.random.default_rng(17)
    for _ in range(10):
        a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        b = random_unit(rng, 8)
        sys = make_system(3, a, b)
        p = initializers.init_minnorm(sys)
        x = np.linalg.pinv(sys.matrix, rcond=1e-10) @ sys.rhs
        x /= np.linalg.norm(x)
        for j, (theta, phi) in enumerate(bloch_angles_oracle(x, 3)):
            assert p.angles[j, 0] == pytest.approx(theta, abs=1e-10)
            assert p.angles[j, 1] == pytest.approx(np.mod(phi, TWO_PI), abs=1e-10)
            assert p.angles[j, 2] == 0.0


def test_minnorm_adjoint_variant():
    a = np.array([[1.0, 1.0], [0.0, 1.0]])
    sys = make_system(1, a)
    via_pinv = initializers.init_minnorm(sys)
    via_adjoint = initializers.init_minnorm(sys, variant="adjoint")
    # pinv target is e_0 (theta 0); adjoint target is (1,1)/sqrt2 (theta pi/2)
    assert via_pinv.angles[0, 0] == pytest.approx(0.0, abs=1e-12)
    assert via_adjoint.angles[0, 0] == pytest.approx(np.pi / 2, abs=1e-12)
    with pytest.raises(ValueError):
        initializers.init_minnorm(sys, variant="transpose")


# ---------------------------------------------------------------------------
# rowmean
# ---------------------------------------------------------------------------

def test_rowmean_identity_is_constant():
    sys = make_system(2, np.eye(4))
    p = initializers.init_rowmean(sys)
    assert np.allclose(p.angles, np.pi)


def test_rowmean_monotone_rows_q4():
    scale = np.arange(1.0, 17.0)
    sys = make_system(4, np.ones((16, 16)) * scale[:, None])
    p = initializers.init_rowmean(sys)
    flat = p.angles.reshape(-1)
    assert np.all(np.diff(flat) > 0)
    assert flat[0] == 0.0
    assert flat[-1] == pytest.approx(TOP)
    assert flat[-1] < TWO_PI


def test_rowmean_cycles_when_short():
    # row means (1,2,3,4) cycled to six values (1,2,3,4,1,2)
    scale = np.arange(1.0, 5.0)
    sys = make_system(2, np.ones((4, 4)) * scale[:, None])
    p = initializers.init_rowmean(sys)
    expected = (np.array([1.0, 2.0, 3.0, 4.0, 1.0, 2.0]) - 1.0) / 3.0 * TOP
    assert np.allclose(p.angles, expected.reshape(2, 3), atol=1e-12)


def test_rowmean_scale_invariant():
    rng = np.random.default_rng(19)
    a = rng.standard_normal((8, 8))
    base = initializers.init_rowmean(make_system(3, a))
    scaled = initializers.init_rowmean(make_system(3, 7.0 * a))
    assert np.allclose(base.angles, scaled.angles, atol=1e-12)


# ---------------------------------------------------------------------------
# predicted
# ---------------------------------------------------------------------------

def write_predictions(path, records):
    import json

    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


def test_load_predicted_roundtrip(tmp_path):
    path = tmp_path / "pred.jsonl"
    params = [[0.1, 0.2, 0.3], [0.4, 0.5, 0.6]]
    write_predictions(path, [{"id": "t0", "qubits": 2, "params": params}])
    p = initializers.load_predicted(path, "t0")
    assert np.allclose(p.angles, params)


def test_load_predicted_wraps_angles(tmp_path):
    path = tmp_path / "pred.jsonl"
    write_predictions(
        path, [{"id": "t0", "qubits": 1, "params": [[7.0, -0.5, 0.0]]}]
    )
    p = initializers.load_predicted(path, "t0")
    assert p.angles[0, 0] == pytest.approx(7.0 - TWO_PI)
    assert p.angles[0, 1] == pytest.approx(TWO_PI - 0.5)
    assert np.all(p.angles >= 0.0)
    assert np.all(p.angles < TWO_PI)


def test_load_predicted_missing_id(tmp_path):
    path = tmp_path / "pred.jsonl"
    write_predictions(path, [{"id": "a", "qubits": 1, "params": [[0, 0, 0]]}])
    with pytest.raises(ValueError, match="t0"):
        initializers.load_predicted(path, "t0")


def test_load_predicted_shape_mismatch(tmp_path):
    path = tmp_path / "pred.jsonl"
    write_predictions(
        path, [{"id": "t0", "qubits": 3, "params": [[0.1, 0.2, 0.3]] * 2}]
    )
    with pytest.raises(ValueError, match="shape"):
        initializers.load_predicted(path, "t0")


def test_load_predicted_rejects_non_finite(tmp_path):
    path = tmp_path / "pred.jsonl"
    write_predictions(
        path, [{"id": "t0", "qubits": 1, "params": [[0.1, float("nan"), 0.3]]}]
    )
    with pytest.raises(ValueError, match="finite"):
        initializers.load_predicted(path, "t0")


# ---------------------------------------------------------------------------
# strategy dispatch and shared invariants
# ---------------------------------------------------------------------------

def test_strategy_validation():
    with pytest.raises(ValueError):
        initializers.InitStrategy("uniform")  # seed required
    with pytest.raises(ValueError):
        initializers.InitStrategy("predicted")  # path required
    with pytest.raises(ValueError):
        initializers.InitStrategy("sobol", seed=1)


def test_dispatch_covers_all_tags(tmp_path):
    sys = problem.gen_random_system(2, 0.2, 5)
    path = tmp_path / "pred.jsonl"
    write_predictions(
        path, [{"id": sys.id, "qubits": 2, "params": [[1.0, 2.0, 3.0]] * 2}]
    )
    tags = [
        initializers.InitStrategy("uniform", seed=3),
        initializers.InitStrategy("pca"),
        initializers.InitStrategy("minnorm"),
        initializers.InitStrategy("rowmean"),
        initializers.InitStrategy("predicted", path=str(path)),
    ]
    for strat in tags:
        p = initializers.initialize(strat, sys)
        assert p.angles.shape == (2, 3)
        assert np.all(np.isfinite(p.angles))
        assert np.all(p.angles >= 0.0)
        assert np.all(p.angles < TWO_PI)


def test_all_strategies_in_range_q4():
    sys = problem.gen_random_system(4, 0.05, 9)
    for p in (
        initializers.init_uniform(4, 1),
        initializers.init_pca(sys),
        initializers.init_minnorm(sys),
        initializers.init_rowmean(sys),
    ):
        assert p.angles.shape == (4, 3)
        assert np.all(np.isfinite(p.angles))
        assert np.all(p.angles >= 0.0)
        assert np.all(p.angles < TWO_PI)
