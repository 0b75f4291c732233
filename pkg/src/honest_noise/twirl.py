"""Pauli twirling: keep the diagonal of the process matrix."""
from __future__ import annotations

import numpy as np

from . import linalg
from .channels import QuantumChannel, haar_random_kets, kraus_to_chi, pauli_basis, pure_state


def pauli_twirl(ch: QuantumChannel) -> QuantumChannel:
    """The Pauli channel whose chi is the diagonal of ``ch``'s chi."""
    diag = kraus_to_chi(ch).diag
    if diag.min() < -1e-12:
        raise ValueError(f"chi diagonal has negative entry {diag.min():.3e}; input is not CP")
    basis = pauli_basis(ch.n_qubits)
    ops = tuple(np.sqrt(max(w, 0.0)) * p for w, p in zip(diag, basis) if w > 0.0)
    return QuantumChannel(ops, label=f"twirl({ch.label})" if ch.label else "twirl")


def group_average_twirl(ch: QuantumChannel) -> QuantumChannel:
    """``rho -> 4**-n sum_P P ch(P rho P) P`` as an explicit Kraus list (test oracle)."""
    basis = pauli_basis(ch.n_qubits)
    scale = 1.0 / np.sqrt(len(basis))
    ops = tuple(scale * (p @ k @ p) for p in basis for k in ch.kraus)
    return QuantumChannel(ops)


def twirl_equivalence_check(ch: QuantumChannel, n_samples: int = 100, seed: int = 0) -> float:
    """Max trace-norm gap between the group-average and chi-diagonal twirls on random states."""
    rng = np.random.default_rng(seed)
    states = pure_state(haar_random_kets(ch.dim, n_samples, rng))
    diff = group_average_twirl(ch)(states) - pauli_twirl(ch)(states)
    return float(np.max(linalg.hermitian_trace_norm(diff)))
