import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from honest_noise import diamond, zoo
from honest_noise.channels import DimensionMismatch, QuantumChannel, identity_channel, kraus_to_choi, pauli_basis

from conftest import random_channel, random_unitary

cp = pytest.importorskip("cvxpy")
seeds = st.integers(0, 2**32 - 1)


def cvxpy_diamond(ch1, ch2):
    """Independent oracle: the same primal program, solved by a general-purpose solver."""
    j = kraus_to_choi(ch1) - kraus_to_choi(ch2)
    d = ch1.dim
    w = cp.Variable((d * d, d * d), hermitian=True)
    rho = cp.Variable((d, d), hermitian=True)
    cons = [w >> 0, cp.kron(rho, np.eye(d)) - w >> 0, cp.real(cp.trace(rho)) == 1]
    prob = cp.Problem(cp.Maximize(2 * cp.real(cp.trace(j @ w))), cons)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    return prob.value


def pauli_channel(p):
    return QuantumChannel(tuple(np.sqrt(pi) * b for pi, b in zip(p, pauli_basis(1))))


def test_identical_channels():
    ch = zoo.reference_channels()["1"]
    assert diamond.diamond_distance(ch, ch) <= 1e-8
    assert diamond.diamond_lower_bound(ch, ch) == 0


def test_rotation_closed_form_any_axis(rng):
    for _ in range(5):
        n = rng.normal(size=3)
        res = diamond.diamond_distance_full(zoo.make_rotation(0.02, n / np.linalg.norm(n)), identity_channel())
        assert res.value == pytest.approx(2 * abs(np.sin(0.01)), abs=1e-6)
        assert res.gap <= 1e-8
        assert round(res.value, 4) == 0.02


def test_table_value_dephasing_vs_rotation():
    ch = zoo.reference_channels()["3,0"]
    v = diamond.diamond_distance(zoo.make_dephasing_z(np.sin(0.01)), ch)
    assert round(v, 4) == 0.0281
    assert v == pytest.approx(cvxpy_diamond(zoo.make_dephasing_z(np.sin(0.01)), ch), abs=1e-7)


@settings(max_examples=8)
@given(seeds)
def test_matches_cvxpy_on_random_qubit_channels(seed):
    rng = np.random.default_rng(seed)
    a, b = random_channel(2, rng), random_channel(2, rng, n_kraus=2)
    assert diamond.diamond_distance(a, b) == pytest.approx(cvxpy_diamond(a, b), abs=1e-6)


def test_matches_cvxpy_on_two_qubit_channels(rng):
    a, b = random_channel(4, rng, 2), random_channel(4, rng, 2)
    res = diamond.diamond_distance_full(a, b)
    assert res.value == pytest.approx(cvxpy_diamond(a, b), abs=1e-6)
    assert res.gap <= 1e-8


def test_two_qubit_reference_value():
    xx = zoo.reference_two_qubit_channel()
    q = np.sin(0.01)
    mix = QuantumChannel((np.sqrt(1 - q) * np.eye(4), np.sqrt(q) * np.kron(zoo.X, zoo.X)))
    assert diamond.diamond_distance(xx, mix) == pytest.approx(
        diamond.diamond_distance(zoo.make_dephase_axis(q, [1, 0, 0]), zoo.reference_channels()["3,4"]), abs=1e-7)


@settings(max_examples=10)
@given(seeds)
def test_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    a, b = random_channel(2, rng), random_channel(2, rng)
    u = QuantumChannel((random_unitary(2, rng),))
    assert diamond.diamond_distance(a.then(u), b.then(u)) == pytest.approx(diamond.diamond_distance(a, b), abs=1e-7)


@settings(max_examples=10)
@given(seeds)
def test_triangle_inequality(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_channel(2, rng) for _ in range(3))
    dd = diamond.diamond_distance
    assert dd(a, c) <= dd(a, b) + dd(b, c) + 1e-7


@settings(max_examples=10)
@given(seeds)
def test_bounds_sandwich_the_sdp(seed):
    rng = np.random.default_rng(seed)
    a, b = random_channel(2, rng), random_channel(2, rng)
    v = diamond.diamond_distance(a, b)
    assert 0 <= v <= 2
    assert diamond.maximally_entangled_lower_bound(a, b) <= v + 1e-7
    lb = diamond.diamond_lower_bound(a, b, n_restarts=8, seed=seed % 1000)
    assert lb <= v + 1e-6
    assert lb >= v - 1e-4


@given(st.lists(st.floats(0, 1), min_size=8, max_size=8))
def test_pauli_pairs(ws):
    p = np.array(ws[:4]) + 1e-3
    q = np.array(ws[4:]) + 1e-3
    p, q = p / p.sum(), q / q.sum()
    a, b = pauli_channel(p), pauli_channel(q)
    v = diamond.diamond_distance(a, b)
    assert v == pytest.approx(np.abs(p - q).sum(), abs=1e-6)
    assert diamond.maximally_entangled_lower_bound(a, b) == pytest.approx(v, abs=1e-6)


def test_lower_bound_is_deterministic():
    a = zoo.reference_channels()["3,2"]
    b = pauli_channel([0.985, 0.005, 0.005, 0.005])
    assert diamond.diamond_lower_bound(a, b, seed=3) == diamond.diamond_lower_bound(a, b, seed=3)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        diamond.diamond_distance(identity_channel(1), identity_channel(2))
    with pytest.raises(DimensionMismatch):
        diamond.diamond_norm_choi(np.zeros((3, 3)) + np.eye(3))


def test_solver_failure_is_loud(monkeypatch):
    real = diamond.sdp.solve
    monkeypatch.setattr(diamond.sdp, "solve", lambda prob, **kw: real(prob, max_iter=2, **kw))
    with pytest.raises(diamond.SolverFailure, match="max-iter"):
        diamond.diamond_distance(zoo.make_rotation(0.3, [0, 0, 1]), identity_channel())
