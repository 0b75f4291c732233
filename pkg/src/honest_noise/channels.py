"""Channel data model and conversions between Kraus, Choi, chi (process
matrix in the Pauli basis), Pauli transfer matrix and Bloch affine form.

Conventions
-----------
* Pauli labels are ordered ``I, X, Y, Z`` per qubit, most significant qubit
  first, so for two qubits index 5 is ``XX``.
* ``chi`` is normalised so that ``Lambda(rho) = sum_mn chi[m, n] P_m rho P_n^dag``
  with ``trace(chi) == 1`` for trace-preserving maps.
* ``ptm[i, j] = tr(P_i Lambda(P_j)) / 2**n``.
* The Bloch (coherence) vector of ``rho`` has entries ``tr(P_i rho)`` for the
  non-identity Paulis, so a one-qubit state is ``(I + r . sigma) / 2``.
* The Choi matrix is ``sum_ij |i><j| (x) Lambda(|i><j|)`` (input first).
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg

TP_TOL = 1e-9
STATE_TRACE_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS_1Q = (I2, X, Y, Z)
PAULI_LETTERS = "IXYZ"


class InvalidChannel(ValueError):
    pass


class InvalidChi(ValueError):
    pass


class NotTracePreserving(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


def pauli_labels(n_qubits: int) -> list[str]:
    return ["".join(t) for t in itertools.product(PAULI_LETTERS, repeat=n_qubits)]


@functools.lru_cache(maxsize=None)
def _pauli_basis(n_qubits: int) -> np.ndarray:
    mats = [linalg.kron(*t) for t in itertools.product(PAULIS_1Q, repeat=n_qubits)]
    basis = np.array(mats)
    basis.setflags(write=False)
    return basis


def pauli_basis(n_qubits: int) -> np.ndarray:
    """All ``4**n`` n-qubit Pauli matrices, shape ``(4**n, 2**n, 2**n)``."""
    return _pauli_basis(n_qubits)


def pauli(label: str) -> np.ndarray:
    """Matrix for a Pauli string such as ``"XZ"``."""
    try:
        return linalg.kron(*(PAULIS_1Q[PAULI_LETTERS.index(c)] for c in label.upper()))
    except ValueError:
        raise ValueError(f"bad Pauli label {label!r}") from None


def n_qubits_of(dim: int) -> int:
    n = int(round(np.log2(dim)))
    if 2**n != dim or n < 1:
        raise DimensionMismatch(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """A map ``rho -> sum_k K_k rho K_k^dag`` given by its Kraus operators.

    Construction checks trace preservation unless ``check=False``; the
    unchecked form exists so diagnostics can describe broken inputs.
    """

    kraus: tuple
    label: str = ""
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        ops = [linalg.as_matrix(k) for k in self.kraus]
        if not ops:
            raise InvalidChannel("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        for k in ops:
            if k.shape != (d, d):
                raise InvalidChannel(f"Kraus operators must all be {d}x{d}, got {k.shape}")
        n_qubits_of(d)
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", tuple(ops))
        if self.check:
            defect = self.tp_defect()
            if defect > TP_TOL:
                raise InvalidChannel(f"not trace preserving: |sum K^dag K - I| = {defect:.3e}")

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def n_qubits(self) -> int:
        return n_qubits_of(self.dim)

    def tp_defect(self) -> float:
        s = sum(k.conj().T @ k for k in self.kraus)
        return float(np.max(np.abs(s - np.eye(self.dim))))

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        """Apply to a density matrix or a stack of them (shape ``(..., d, d)``)."""
        rho = np.asarray(rho)
        if rho.shape[-2:] != (self.dim, self.dim):
            raise DimensionMismatch(f"state shape {rho.shape} incompatible with dimension {self.dim}")
        k = np.stack(self.kraus)
        return np.einsum("kab,...bc,kdc->...ad", k, rho, k.conj())

    def adjoint(self, op: np.ndarray) -> np.ndarray:
        """Heisenberg-picture action ``sum_k K_k^dag op K_k``."""
        k = np.stack(self.kraus)
        return np.einsum("kba,...bc,kcd->...ad", k.conj(), op, k)

    def then(self, other: "QuantumChannel") -> "QuantumChannel":
        """The composition ``other o self`` (apply ``self`` first)."""
        if other.dim != self.dim:
            raise DimensionMismatch("cannot compose channels of different dimension")
        return QuantumChannel(tuple(b @ a for b in other.kraus for a in self.kraus),
                              check=self.check and other.check)


def identity_channel(n_qubits: int = 1) -> QuantumChannel:
    return QuantumChannel((np.eye(2**n_qubits, dtype=complex),), label="identity")


def unitary_channel(u: np.ndarray, label: str = "") -> QuantumChannel:
    return QuantumChannel((np.asarray(u, dtype=complex),), label=label)


@dataclass(frozen=True, eq=False)
class ChiMatrix:
    n_qubits: int
    chi: np.ndarray

    def __post_init__(self):
        m = linalg.as_matrix(self.chi)
        if m.shape != (4**self.n_qubits, 4**self.n_qubits):
            raise InvalidChi(f"chi for {self.n_qubits} qubit(s) must be {4**self.n_qubits} square")
        m.setflags(write=False)
        object.__setattr__(self, "chi", m)

    @property
    def diag(self) -> np.ndarray:
        return np.real(np.diag(self.chi)).copy()

    def entry(self, row: str, col: str | None = None) -> complex:
        labels = pauli_labels(self.n_qubits)
        col = row if col is None else col
        return complex(self.chi[labels.index(row.upper()), labels.index(col.upper())])


@dataclass(frozen=True, eq=False)
class PauliTransferMatrix:
    n_qubits: int
    r: np.ndarray

    def __post_init__(self):
        m = np.array(self.r, dtype=float, copy=True)
        m.setflags(write=False)
        object.__setattr__(self, "r", m)


@dataclass(frozen=True, eq=False)
class BlochAffineMap:
    """``r -> m @ r + t`` on (generalised) Bloch vectors."""

    m: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=float, copy=True)
        t = np.array(self.t, dtype=float, copy=True).reshape(-1)
        if m.shape != (t.size, t.size):
            raise ValueError(f"shape mismatch: m {m.shape}, t {t.shape}")
        m.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "t", t)

    @property
    def is_unital(self) -> bool:
        return bool(np.linalg.norm(self.t) <= 1e-9)

    def __call__(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return r @ self.m.T + self.t


# -- conversions -------------------------------------------------------------

def kraus_to_choi(ch: QuantumChannel) -> np.ndarray:
    # (I (x) K)|Omega> has components K[a, i] at index (i, a)
    vecs = np.stack([k.T.reshape(-1) for k in ch.kraus])
    return vecs.T @ vecs.conj()


def kraus_coefficients(ch: QuantumChannel) -> np.ndarray:
    """Pauli expansion ``K_k = sum_m c[k, m] P_m``."""
    basis = pauli_basis(ch.n_qubits)
    k = np.stack(ch.kraus)
    # tr(P_m K) / d, Paulis are Hermitian
    return np.einsum("mab,kba->km", basis, k) / ch.dim


def kraus_to_chi(ch: QuantumChannel) -> ChiMatrix:
    c = kraus_coefficients(ch)
    return ChiMatrix(ch.n_qubits, c.T @ c.conj())


def chi_to_kraus(chi: ChiMatrix, cutoff: float = 1e-14) -> QuantumChannel:
    """Canonical Kraus form from the eigendecomposition of chi.

    Operators come in ascending eigenvalue order, each with its first
    non-negligible Pauli coefficient real and positive. Eigenvalues below
    ``cutoff`` are dropped.
    """
    w, v = np.linalg.eigh(linalg.hermitian_part(chi.chi, 1e-9))
    if w[0] < -1e-9:
        raise InvalidChi(f"chi has negative eigenvalue {w[0]:.3e}; map is not CP")
    basis = pauli_basis(chi.n_qubits)
    ops = []
    for lam, vec in zip(w, v.T):
        if lam <= cutoff:
            continue
        lead = vec[np.argmax(np.abs(vec) > 1e-12)]
        vec = vec * (abs(lead) / lead)
        ops.append(np.sqrt(lam) * np.einsum("m,mab->ab", vec, basis))
    if not ops:
        raise InvalidChi("chi is zero")
    return QuantumChannel(tuple(ops))


@functools.lru_cache(maxsize=None)
def _chi_ptm_tensor(n_qubits: int) -> np.ndarray:
    """``T[i, j, m, n] = tr(P_i P_m P_j P_n) / 2**n`` (real up to rounding)."""
    b = pauli_basis(n_qubits)
    t = np.einsum("iab,mbc,jcd,nda->ijmn", b, b, b, b, optimize=True) / 2**n_qubits
    t.setflags(write=False)
    return t


def chi_to_ptm(chi: ChiMatrix) -> PauliTransferMatrix:
    t = _chi_ptm_tensor(chi.n_qubits)
    r = np.einsum("ijmn,mn->ij", t, chi.chi)
    if np.max(np.abs(r.imag)) > 1e-9:
        raise InvalidChi("chi does not describe a Hermiticity-preserving map")
    return PauliTransferMatrix(chi.n_qubits, r.real)


def ptm_to_chi(ptm: PauliTransferMatrix) -> ChiMatrix:
    n = ptm.n_qubits
    d2 = 4**n
    t = _chi_ptm_tensor(n).reshape(d2 * d2, d2 * d2)
    chi = np.linalg.solve(t, ptm.r.reshape(-1).astype(complex)).reshape(d2, d2)
    return ChiMatrix(n, 0.5 * (chi + chi.conj().T))


def kraus_to_ptm(ch: QuantumChannel) -> PauliTransferMatrix:
    b = pauli_basis(ch.n_qubits)
    images = ch(b)
    r = np.einsum("iab,jba->ij", b, images) / ch.dim
    return PauliTransferMatrix(ch.n_qubits, r.real)


def ptm_to_bloch(ptm: PauliTransferMatrix, tol: float = TP_TOL) -> BlochAffineMap:
    r = ptm.r
    first = np.zeros(r.shape[0])
    first[0] = 1.0
    if np.max(np.abs(r[0] - first)) > tol:
        raise NotTracePreserving(f"PTM first row is {r[0][:4]}..., expected (1, 0, ...)")
    return BlochAffineMap(r[1:, 1:], r[1:, 0])


def bloch_map(ch: QuantumChannel) -> BlochAffineMap:
    return ptm_to_bloch(kraus_to_ptm(ch))


def average_fidelity(chi: ChiMatrix) -> float:
    """Haar-averaged ``<psi| Lambda(|psi><psi|) |psi>``: ``(d chi_00 + 1)/(d + 1)``."""
    d = 2**chi.n_qubits
    return float((d * chi.chi[0, 0].real + 1.0) / (d + 1.0))


@dataclass(frozen=True)
class CptpReport:
    tp_defect: float
    choi_min_eig: float
    passed: bool

    def __str__(self):
        verdict = "pass" if self.passed else "FAIL"
        return f"CPTP {verdict}: TP defect {self.tp_defect:.3e}, min Choi eigenvalue {self.choi_min_eig:.3e}"


def validate_cptp(ch, tol: float = TP_TOL) -> CptpReport:
    """Trace-preservation defect and complete-positivity margin.

    ``ch`` is a :class:`QuantumChannel` or a Choi matrix (any Hermitian
    ``d**2 x d**2`` array, so that differences of channels can be examined).
    """
    if isinstance(ch, QuantumChannel):
        choi = kraus_to_choi(ch)
        d = ch.dim
    else:
        choi = np.asarray(ch, dtype=complex)
        d = int(round(np.sqrt(choi.shape[0])))
    # partial trace over the output factor must be the identity
    tr_out = np.einsum("iaja->ij", choi.reshape(d, d, d, d))
    defect = float(np.max(np.abs(tr_out - np.eye(d))))
    emin = float(linalg.eigvalsh(choi)[0])
    return CptpReport(defect, emin, defect <= tol and emin >= -linalg.PSD_TOL)


# -- states --------------------------------------------------------------------

def density_matrix(rho, tol: float = STATE_TRACE_TOL) -> np.ndarray:
    """Validate and return a density matrix (Hermitian, unit trace, PSD)."""
    rho = linalg.hermitian_part(linalg.as_matrix(rho), 1e-9)
    n_qubits_of(rho.shape[0])
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError(f"density matrix trace is {np.trace(rho).real:.12f}")
    if not linalg.is_psd(rho):
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def state_from_bloch(r) -> np.ndarray:
    """Density matrix ``(I + sum_i r_i P_i) / 2**n`` from a coherence vector."""
    r = np.asarray(r, dtype=float)
    n = n_qubits_of(int(round(np.sqrt(r.shape[-1] + 1))))
    b = pauli_basis(n)
    return (np.eye(2**n) + np.einsum("...i,iab->...ab", r, b[1:])) / 2**n


def bloch_vector(rho) -> np.ndarray:
    rho = np.asarray(rho)
    n = n_qubits_of(rho.shape[-1])
    return np.einsum("iab,...ba->...i", pauli_basis(n)[1:], rho).real


def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi, axis=-1, keepdims=True)
    return np.einsum("...a,...b->...ab", psi, psi.conj())


def haar_random_kets(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(count, dim)) + 1j * rng.normal(size=(count, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def xz_plane_state(alpha) -> np.ndarray:
    """Pure qubit state(s) with Bloch vector at angle ``alpha`` from +z in the x-z plane."""
    alpha = np.asarray(alpha, dtype=float)
    r = np.stack([np.sin(alpha), np.zeros_like(alpha), np.cos(alpha)], axis=-1)
    return state_from_bloch(r)
