"""Dense linear algebra for the small (<= 32 x 32) matrices that show up in
one- and two-qubit channel problems.

Matrices are plain ``numpy.ndarray`` values. Every function returns a fresh
array and never mutates its inputs.
"""
from __future__ import annotations

import numpy as np

HERMITICITY_TOL = 1e-10
PSD_TOL = 1e-9
JACOBI_TOL = 1e-15
JACOBI_MAX_SWEEPS = 100


class LinalgError(ValueError):
    pass


class NonSquare(LinalgError):
    pass


class NotHermitian(LinalgError):
    pass


def as_matrix(m, dtype=complex) -> np.ndarray:
    """Copy ``m`` into a 2-d array, rejecting NaN/Inf entries."""
    a = np.array(m, dtype=dtype, copy=True)
    if a.ndim != 2:
        raise LinalgError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise LinalgError("matrix has non-finite entries")
    return a


def _require_square(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonSquare(f"matrix must be square, got shape {m.shape}")


def hermitian_part(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Return ``(m + m^H)/2`` after checking ``m`` is Hermitian within ``tol``."""
    m = np.asarray(m)
    _require_square(m)
    asym = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if asym > tol:
        raise NotHermitian(f"matrix deviates from Hermitian by {asym:.3e} > {tol:.1e}")
    return 0.5 * (m + m.conj().T)


def eig_hermitian(m, tol: float = HERMITICITY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ``(w, v)`` with ``w`` ascending and ``m == v @ diag(w) @ v^H``.
    """
    a = hermitian_part(np.asarray(m, dtype=complex), tol).astype(complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(np.max(np.abs(a)) if n else 0.0, 1e-300)

    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        if off <= JACOBI_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= JACOBI_TOL * scale * 1e-3:
                    continue
                phase = apq / mag
                # reduce to the real symmetric 2x2 problem [[app, mag], [mag, aqq]]
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # columns p, q of the unitary G with (G^H a G)[p, q] == 0
                gp = c
                gq = -s * np.conj(phase)
                hp = s * phase
                hq = c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = gp * col_p + gq * col_q
                a[:, q] = hp * col_p + hq * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = np.conj(gp) * row_p + np.conj(gq) * row_q
                a[q, :] = np.conj(hp) * row_p + np.conj(hq) * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = gp * vp + gq * vq
                v[:, q] = hp * vp + hq * vq
    else:
        raise LinalgError("Jacobi iteration did not converge")

    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eigvalsh(m) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (LAPACK; used in hot loops)."""
    return np.linalg.eigvalsh(0.5 * (m + np.conj(np.swapaxes(m, -1, -2))))


def trace_norm(m) -> float:
    """Sum of singular values."""
    m = np.asarray(m)
    _require_square(m)
    if m.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def hermitian_trace_norm(m) -> np.ndarray:
    """Trace norm of (a stack of) Hermitian matrices via ``sum |eigenvalues|``."""
    return np.sum(np.abs(eigvalsh(np.asarray(m))), axis=-1)


def is_psd(m, tol: float = PSD_TOL) -> bool:
    return bool(min_eig(m) >= -tol)


def min_eig(m) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    h = hermitian_part(np.asarray(m))
    if h.size == 0:
        return 0.0
    return float(eigvalsh(h)[0])


def kron(*ms) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in ms:
        out = np.kron(out, np.asarray(m))
    return out


def is_unitary(u, tol: float = HERMITICITY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def psd_sqrt(m) -> np.ndarray:
    """Square root of a PSD matrix; tiny negative eigenvalues are clipped."""
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
