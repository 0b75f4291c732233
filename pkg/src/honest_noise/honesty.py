"""The honesty constraint: an approximation must never make a state look
better preserved than the true channel does.

For one qubit, ``||(L - I)(rho)||_1`` is the Euclidean length of
``(1 - M) r - t`` on Bloch vectors, so the constraint over all pure states is
the quadratic-form condition ``A >= B`` with

    A = (1 - M_A)^T (1 - M_A)
    B = (1 - M)^T (1 - M)                                   (unital)
    B = (1 - M)^T (1 - M) + (|t|^2 + 2 |v|) 1,  v = (1 - M)^T t   (non-unital)

The non-unital form is only sufficient, and it only covers unit Bloch
vectors: at the maximally mixed state a non-unital channel moves the state
by ``|t|`` while any unital approximation leaves it fixed. For more than one
qubit the same matrices are formed on the generalised coherence vector,
where ``A >= B`` is not known to imply the state-level inequality; such
certificates are tagged ``multi-qubit-conjectural``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .channels import (
    DimensionMismatch,
    QuantumChannel,
    bloch_map,
    haar_random_kets,
    pauli_basis,
    pure_state,
    state_from_bloch,
)

CERT_TOL = 1e-9
UNITAL_TOL = 1e-12


class NotUnital(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HonestyCertificate:
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    min_eig_a_minus_b: float
    tol: float
    mode: str  # "unital" | "non-unital" | "multi-qubit-conjectural"
    witness: np.ndarray = field(repr=False)

    @property
    def passed(self) -> bool:
        return self.min_eig_a_minus_b >= -self.tol

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def witness_state(self) -> np.ndarray | None:
        """Pure state along the most-violated Bloch direction (one qubit only)."""
        if self.witness.size != 3:
            return None
        return state_from_bloch(self.witness / np.linalg.norm(self.witness))


@dataclass(frozen=True)
class NonUnitalData:
    t: np.ndarray
    v: np.ndarray


def io_distinguishability(ch: QuantumChannel, rho) -> float | np.ndarray:
    """``||ch(rho) - rho||_1``; ``rho`` may be a stack of states."""
    rho = np.asarray(rho)
    if rho.shape[-2:] != (ch.dim, ch.dim):
        raise DimensionMismatch(f"state of shape {rho.shape} for a {ch.dim}-dimensional channel")
    out = linalg.hermitian_trace_norm(ch(rho) - rho)
    return float(out) if np.ndim(out) == 0 else out


def build_A(m_a) -> np.ndarray:
    m_a = np.asarray(m_a, dtype=float)
    if m_a.ndim != 2 or m_a.shape[0] != m_a.shape[1]:
        raise linalg.NonSquare(f"Bloch matrix must be square, got {m_a.shape}")
    e = np.eye(m_a.shape[0]) - m_a
    a = e.T @ e
    return 0.5 * (a + a.T)


def nonunital_data(ch: QuantumChannel) -> NonUnitalData:
    bm = bloch_map(ch)
    v = (np.eye(bm.t.size) - bm.m).T @ bm.t
    return NonUnitalData(bm.t.copy(), v)


def build_B_unital(ch: QuantumChannel, tol: float = 1e-9) -> np.ndarray:
    bm = bloch_map(ch)
    if np.linalg.norm(bm.t) > tol:
        raise NotUnital(f"channel has translation |t| = {np.linalg.norm(bm.t):.3e}")
    return build_A(bm.m)


def build_B_nonunital(ch: QuantumChannel) -> np.ndarray:
    bm = bloch_map(ch)
    data = nonunital_data(ch)
    shift = float(data.t @ data.t + 2.0 * np.linalg.norm(data.v))
    return build_A(bm.m) + shift * np.eye(bm.t.size)


def build_B(ch: QuantumChannel) -> tuple[np.ndarray, bool]:
    """``B`` for ``ch`` and whether the unital form applies."""
    bm = bloch_map(ch)
    if np.linalg.norm(bm.t) <= UNITAL_TOL:
        return build_A(bm.m), True
    return build_B_nonunital(ch), False


def certify(m_a, ch: QuantumChannel, tol: float = CERT_TOL, b: np.ndarray | None = None) -> HonestyCertificate:
    """Check ``A(m_a) - B(ch) >= 0``. ``b`` may be passed to skip recomputing ``B``."""
    m_a = np.asarray(m_a, dtype=float)
    size = 4**ch.n_qubits - 1
    if m_a.shape != (size, size):
        raise DimensionMismatch(f"Bloch matrix {m_a.shape} for a {ch.n_qubits}-qubit channel needs {size}x{size}")
    if b is None:
        b, unital = build_B(ch)
    else:
        unital = np.linalg.norm(bloch_map(ch).t) <= UNITAL_TOL
    a = build_A(m_a)
    w, v = np.linalg.eigh(a - b)
    if ch.n_qubits > 1:
        mode = "multi-qubit-conjectural"
    else:
        mode = "unital" if unital else "non-unital"
    return HonestyCertificate(a, b, float(w[0]), tol, mode, v[:, 0].copy())


def certify_channel(approx: QuantumChannel, ch: QuantumChannel, tol: float = CERT_TOL) -> HonestyCertificate:
    if approx.dim != ch.dim:
        raise DimensionMismatch("approximation and channel act on different dimensions")
    bm = bloch_map(approx)
    return certify(bm.m, ch, tol)


def pauli_eigenstates(n_qubits: int) -> np.ndarray:
    """All ``6**n`` product states built from single-qubit X, Y, Z eigenstates."""
    singles = []
    for p in pauli_basis(1)[1:]:
        _, vecs = np.linalg.eigh(p)
        singles.extend([vecs[:, 0], vecs[:, 1]])
    kets = [np.ones(1, dtype=complex)]
    for _ in range(n_qubits):
        kets = [np.kron(k, s) for k in kets for s in singles]
    return pure_state(np.array(kets))


@dataclass(frozen=True)
class EmpiricalReport:
    max_violation: float
    witness: np.ndarray | None
    n_samples: int
    seed: int

    def honest(self, tol: float = 1e-8) -> bool:
        return self.max_violation <= tol


def empirical_honesty_check(approx: QuantumChannel, ch: QuantumChannel, n_samples: int = 10_000,
                            seed: int = 0, batch: int = 4096) -> EmpiricalReport:
    """Largest ``||(ch - I) rho||_1 - ||(approx - I) rho||_1`` over sampled pure states.

    Samples are the Pauli eigenstate grid plus ``n_samples`` Haar-random pure
    states from a generator seeded with ``seed``. Positive values are
    violations; the worst state is returned as the witness.
    """
    if approx.dim != ch.dim:
        raise DimensionMismatch("approximation and channel act on different dimensions")
    rng = np.random.default_rng(seed)
    best = -np.inf
    witness = None

    def scan(states):
        nonlocal best, witness
        diff = io_distinguishability(ch, states) - io_distinguishability(approx, states)
        k = int(np.argmax(diff))
        if diff[k] > best:
            best = float(diff[k])
            witness = states[k].copy()

    scan(pauli_eigenstates(ch.n_qubits))
    left = n_samples
    while left > 0:
        count = min(batch, left)
        scan(pure_state(haar_random_kets(ch.dim, count, rng)))
        left -= count
    if best > -np.inf and abs(best) < 1e-15:
        best = 0.0
    return EmpiricalReport(best, witness, n_samples, seed)
