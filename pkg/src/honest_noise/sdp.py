"""A small dense primal-dual interior-point solver for complex Hermitian SDPs.

Standard form, with ``X`` block diagonal::

    primal:  minimize  <C, X>   s.t.  <A_i, X> = b_i,  X >= 0
    dual:    maximize  b . y    s.t.  sum_i y_i A_i + S = C,  S >= 0

``<P, Q> = Re tr(P^H Q)``. Search directions use Nesterov-Todd scaling and a
Mehrotra predictor-corrector step. The solver targets problems whose blocks
are at most a few dozen rows wide; the Schur complement is formed densely
while the constraint operators may be sparse.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

GAP_TOL = 1e-9
FEAS_TOL = 1e-9
MAX_ITER = 200
STEP_FACTOR = 0.95
DENSE_BLOCK_LIMIT = 64
MERGE_LIMIT = 16  # problems whose blocks total at most this many rows run as one block


class SolverFailure(RuntimeError):
    pass


@dataclass(eq=False)
class SdpProblem:
    """``c`` holds one Hermitian matrix per block; ``a`` holds one
    ``(m, n_b * n_b)`` matrix per block whose rows are row-major
    vectorisations of Hermitian constraint matrices."""

    c: list
    a: list
    b: np.ndarray
    block_dims: tuple = field(init=False)

    def __post_init__(self):
        self.c = [np.asarray(ci, dtype=complex) for ci in self.c]
        self.b = np.asarray(self.b, dtype=float)
        self.block_dims = tuple(ci.shape[0] for ci in self.c)
        if len(self.a) != len(self.c):
            raise ValueError("need one constraint operator per block")
        for ci, ai, n in zip(self.c, self.a, self.block_dims):
            if ci.shape != (n, n) or np.max(np.abs(ci - ci.conj().T), initial=0.0) > 1e-12:
                raise ValueError("objective blocks must be square Hermitian")
            if ai.shape != (self.b.size, n * n):
                raise ValueError(f"constraint block has shape {ai.shape}, expected {(self.b.size, n * n)}")
        self._offsets = None
        total = sum(self.block_dims)
        if len(self.c) > 1 and total <= MERGE_LIMIT:
            # iterates stay block diagonal, so one padded block is exact and cheaper
            self._offsets = np.concatenate([[0], np.cumsum(self.block_dims)])
            self._groups = [_Group.merged(self, total)]
        else:
            self._groups = [_Group(self, n) for n in sorted(set(self.block_dims))]

    @property
    def m(self) -> int:
        return self.b.size


class _Group:
    """Blocks of equal size, stacked so per-block linear algebra runs batched."""

    def __init__(self, problem: SdpProblem, n: int, c=None, a=None):
        self.n = n
        if c is None:
            self.index = [i for i, d in enumerate(problem.block_dims) if d == n]
            c = [problem.c[i] for i in self.index]
            a = [problem.a[i] for i in self.index]
        else:
            self.index = [0]
        self.k = len(self.index)
        self.c = np.stack(c)
        blocks = a
        self.sparse = n * n > DENSE_BLOCK_LIMIT and all(sp.issparse(a) for a in blocks)
        if self.sparse:
            blocks = [sp.csr_array(a, dtype=complex) for a in blocks]
            self.a_conj = [a.conj().tocsr() for a in blocks]
            self.a_t = [a.T.tocsr() for a in blocks]
        else:
            dense = np.stack([a.toarray() if sp.issparse(a) else np.asarray(a) for a in blocks], axis=1)
            dense = dense.astype(complex)  # (m, k, n*n)
            self.a4 = dense.reshape(dense.shape[0], self.k, n, n)
            self.a_conj = dense.conj().reshape(dense.shape[0], -1)
            self.a_t = np.ascontiguousarray(dense.reshape(dense.shape[0], -1).T)

    @classmethod
    def merged(cls, problem: SdpProblem, total: int) -> "_Group":
        c = np.zeros((total, total), dtype=complex)
        a = np.zeros((problem.m, total, total), dtype=complex)
        start = 0
        for ci, ai, n in zip(problem.c, problem.a, problem.block_dims):
            sl = slice(start, start + n)
            c[sl, sl] = ci
            a[:, sl, sl] = (ai.toarray() if sp.issparse(ai) else np.asarray(ai)).reshape(-1, n, n)
            start += n
        return cls(problem, total, [c], [a.reshape(problem.m, -1)])

    def op(self, x: np.ndarray) -> np.ndarray:
        if self.sparse:
            return sum(np.real(a @ xi.reshape(-1)) for a, xi in zip(self.a_conj, x))
        return np.real(self.a_conj @ x.reshape(-1))

    def gram(self) -> np.ndarray:
        """``op(adj(.))`` as a dense ``m x m`` matrix."""
        if self.sparse:
            g = sum((a @ at) for a, at in zip(self.a_conj, self.a_t))
            return np.real(g.toarray() if sp.issparse(g) else g)
        return np.real(self.a_conj @ self.a_t)

    def adj(self, y: np.ndarray) -> np.ndarray:
        if self.sparse:
            return np.stack([(a @ y).reshape(self.n, self.n) for a in self.a_t])
        return (self.a_t @ y).reshape(self.k, self.n, self.n)

    def schur(self, w: np.ndarray) -> np.ndarray:
        """``M[i, j] = sum_b <A_i, W_b A_j W_b>``."""
        if self.sparse:
            # vec(W A W) = (W kron conj(W)) vec(A) keeps the sparse rows sparse
            nn = self.n * self.n
            kr = np.einsum("kac,kbd->kabcd", w, w.conj()).reshape(self.k, nn, nn)
            out = 0
            for a_conj, a_t, kb in zip(self.a_conj, self.a_t, kr):
                left = a_conj @ kb
                out = out + np.real(a_t.T @ left.T).T
            return out
        waw = w @ self.a4 @ w
        return np.real(self.a_conj @ waw.reshape(waw.shape[0], -1).T)


@dataclass
class SdpSolution:
    primal_value: float
    dual_value: float
    gap: float
    iterations: int
    status: str
    primal_infeasibility: float
    dual_infeasibility: float
    x: list = field(repr=False)
    y: np.ndarray = field(repr=False)
    s: list = field(repr=False)


def _inner(xs, ys) -> float:
    return float(sum(np.real(np.vdot(x, y)) for x, y in zip(xs, ys)))


def _herm(m):
    return 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))


def _ct(m):
    return np.conj(np.swapaxes(m, -1, -2))


def _nt_scaling(x, s):
    """Batched ``(g, ginv, v, lx^-1, ls^-1)`` with ``g^-1 x g^-H = g^H s g = diag(v)``
    and ``lx``, ``ls`` the Cholesky factors of ``x`` and ``s``."""
    k = x.shape[0]
    # one batched call each for both factors
    l = np.linalg.cholesky(np.concatenate((x, s)))
    lx, ls = l[:k], l[k:]
    l_inv = np.linalg.inv(l)
    lx_inv, ls_inv = l_inv[:k], l_inv[k:]
    _, sv, vh = np.linalg.svd(_ct(ls) @ lx)
    v = _ct(vh)
    root = np.sqrt(sv)
    g = (lx @ v) / root[:, None, :]
    ginv = (root[:, :, None] * vh) @ lx_inv
    return g, ginv, sv, lx_inv, ls_inv


def _max_steps(lx_inv, dx, ls_inv, ds) -> tuple[float, float]:
    """Largest ``a`` with ``x + a dx >= 0`` and ``b`` with ``s + b ds >= 0``, where
    ``lx_inv``, ``ls_inv`` invert the Cholesky factors of ``x`` and ``s``."""
    linv = np.concatenate((lx_inv, ls_inv))
    # eigvalsh reads one triangle, so the product needs no symmetrising
    lam = np.linalg.eigvalsh(linv @ np.concatenate((dx, ds)) @ _ct(linv))[:, 0]
    k = dx.shape[0]
    lp, ld = lam[:k].min(), lam[k:].min()
    return (np.inf if lp >= 0 else -1.0 / lp), (np.inf if ld >= 0 else -1.0 / ld)


def solve(problem: SdpProblem, gap_tol: float = GAP_TOL, feas_tol: float = FEAS_TOL,
          max_iter: int = MAX_ITER) -> SdpSolution:
    """Solve ``problem``; the returned status is ``optimal``, ``max-iter`` or ``stalled``."""
    groups = problem._groups
    n_total = sum(problem.block_dims)
    c_norm = max(1.0, max(np.max(np.abs(ci)) for ci in problem.c))
    b_norm = max(1.0, np.max(np.abs(problem.b)))
    x = [np.tile(np.eye(g.n, dtype=complex), (g.k, 1, 1)) * b_norm for g in groups]
    s = [np.tile(np.eye(g.n, dtype=complex), (g.k, 1, 1)) * c_norm for g in groups]
    y = np.zeros(problem.m)

    def op(xs):
        return sum(g.op(xi) for g, xi in zip(groups, xs))

    def adj(v):
        return [g.adj(v) for g in groups]

    # A A^* is well conditioned; used to keep primal steps on A dx = rp
    gram = sla.cho_factor(sum(g.gram() for g in groups) + 1e-14 * np.eye(problem.m), check_finite=False)

    def residuals(x, y, s):
        rp = problem.b - op(x)
        rd = [g.c - si - ai for g, si, ai in zip(groups, s, adj(y))]
        return rp, rd

    status = "max-iter"
    prev = (x, y, s)
    it = 0
    for it in range(1, max_iter + 1):
        rp, rd = residuals(x, y, s)
        pobj = _inner([g.c for g in groups], x)
        dobj = float(problem.b @ y)
        comp = _inner(x, s)
        pinf = np.linalg.norm(rp) / b_norm
        dinf = max(np.max(np.abs(r)) for r in rd) / c_norm
        if pinf <= feas_tol and dinf <= feas_tol and abs(pobj - dobj) <= gap_tol and comp <= gap_tol:
            status = "optimal"
            break

        try:
            scal = [_nt_scaling(xi, si) for xi, si in zip(x, s)]
        except np.linalg.LinAlgError:
            # iterate left the cone through roundoff; keep the last good point
            x, y, s = prev
            status = "stalled"
            break
        ws = [sc[0] @ _ct(sc[0]) for sc in scal]
        schur = sum(g.schur(w) for g, w in zip(groups, ws))
        schur = 0.5 * (schur + schur.T)
        try:
            factor = sla.cho_factor(schur, check_finite=False)
            solve_m = lambda r: sla.cho_solve(factor, r, check_finite=False)  # noqa: E731
        except np.linalg.LinAlgError:
            solve_m = lambda r: np.linalg.lstsq(schur, r, rcond=None)[0]  # noqa: E731

        base_rhs = rp + op([w @ r @ w for w, r in zip(ws, rd)])

        def direction(rc):
            r = base_rhs - op(rc)
            dy = solve_m(r)
            dy = dy + solve_m(r - schur @ dy)  # one refinement step
            ds = [_herm(r - a) for r, a in zip(rd, adj(dy))]
            dx = [_herm(c - w @ d @ w) for c, w, d in zip(rc, ws, ds)]
            # the Schur solve loses accuracy near the optimum; repair A dx = rp
            # only when it matters, since the repair ignores the cone geometry
            err = rp - op(dx)
            if np.linalg.norm(err) > 0.1 * feas_tol * b_norm:
                z = sla.cho_solve(gram, err, check_finite=False)
                dx = [d + a for d, a in zip(dx, adj(z))]
            return dx, dy, ds

        def steps(dx, ds):
            pairs = [_max_steps(sc[3], dxi, sc[4], dsi) for sc, dxi, dsi in zip(scal, dx, ds)]
            ap = min(1.0, STEP_FACTOR * min(p for p, _ in pairs))
            ad = min(1.0, STEP_FACTOR * min(d for _, d in pairs))
            return ap, ad

        mu = comp / n_total
        dx_a, _, ds_a = direction([-xi for xi in x])
        ap, ad = steps(dx_a, ds_a)
        mu_aff = _inner([xi + ap * d for xi, d in zip(x, dx_a)], [si + ad * d for si, d in zip(s, ds_a)]) / n_total
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0

        rc = []
        for (gg, ginv, v, _, _), dxa, dsa in zip(scal, dx_a, ds_a):
            prod = (ginv @ dxa @ _ct(ginv)) @ (_ct(gg) @ dsa @ gg)
            rhs = -(prod + _ct(prod))
            diag = np.arange(v.shape[1])
            rhs[:, diag, diag] += 2.0 * (sigma * mu - v * v)
            d = rhs / (v[:, :, None] + v[:, None, :])
            rc.append(gg @ d @ _ct(gg))
        dx, dy, ds = direction(rc)
        ap, ad = steps(dx, ds)
        ap = ad = min(ap, ad)
        if max(ap, ad) < 1e-12:
            status = "stalled"
            break
        prev = (x, y, s)
        x = [_herm(xi + ap * d) for xi, d in zip(x, dx)]
        y = y + ad * dy
        s = [_herm(si + ad * d) for si, d in zip(s, ds)]

    rp, rd = residuals(x, y, s)
    pobj = _inner([g.c for g in groups], x)
    dobj = float(problem.b @ y)

    def unstack(stacks):
        if problem._offsets is not None:
            big, off = stacks[0][0], problem._offsets
            return [big[off[i]:off[i + 1], off[i]:off[i + 1]].copy() for i in range(len(off) - 1)]
        out = [None] * len(problem.block_dims)
        for g, st in zip(groups, stacks):
            for i, blk in zip(g.index, st):
                out[i] = blk
        return out

    return SdpSolution(
        primal_value=pobj,
        dual_value=dobj,
        gap=abs(pobj - dobj),
        iterations=it,
        status=status,
        primal_infeasibility=float(np.linalg.norm(rp) / b_norm),
        dual_infeasibility=float(max(np.max(np.abs(r)) for r in rd) / c_norm),
        x=unstack(x),
        y=y,
        s=unstack(s),
    )


def hermitian_basis(n: int) -> sp.csr_array:
    """Orthonormal basis of ``n x n`` Hermitian matrices as sparse rows of length ``n*n``."""
    rows, cols, vals = [], [], []
    k = 0
    r2 = 1.0 / np.sqrt(2.0)
    for a in range(n):
        rows.append(k)
        cols.append(a * n + a)
        vals.append(1.0)
        k += 1
    for a in range(n):
        for b in range(a + 1, n):
            rows += [k, k]
            cols += [a * n + b, b * n + a]
            vals += [r2, r2]
            k += 1
            rows += [k, k]
            cols += [a * n + b, b * n + a]
            vals += [1j * r2, -1j * r2]
            k += 1
    return sp.csr_array((np.array(vals, dtype=complex), (rows, cols)), shape=(n * n, n * n))
