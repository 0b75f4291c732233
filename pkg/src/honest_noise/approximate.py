"""Closest honest mixture-of-unitaries approximation of a channel.

The search minimises ``||Lambda_A - Lambda||_dia`` over probability vectors
on a fixed unitary mixing set subject to the certificate ``A >= B``. The
feasible set is not convex in the probabilities, so the optimiser is a
multi-start Nelder-Mead search (iterates projected onto the probability
simplex, the constraint enforced by an exact penalty on the negative part of
``min eig(A - B)``) followed by a bisection that walks each candidate onto
the constraint boundary along the ray toward the identity mixture.

Along that ray ``1 - M(tau) = tau (1 - M(1))``, so ``A(tau) = tau**2 A(1)``
and feasibility is monotone in ``tau``, which is what makes the bisection
well defined.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import diamond, honesty
from .channels import (
    DimensionMismatch,
    QuantumChannel,
    kraus_to_choi,
    kraus_to_chi,
    kraus_to_ptm,
    pauli,
    pauli_basis,
    pauli_labels,
)
from .linalg import is_unitary
from .zoo import HADAMARD, Z_PI_2, axis_pauli

log = logging.getLogger(__name__)

TIE_TOL = 1e-8
PRUNE_FRACTION = 0.1


class Infeasible(RuntimeError):
    pass


@dataclass(frozen=True)
class OptimizerOptions:
    seed: int = 0
    restarts: int = 16
    max_iter: int = 2000  # function evaluations per Nelder-Mead run
    penalty: float = 1e3
    cert_tol: float = honesty.CERT_TOL
    empirical_samples: int = 10_000

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True, eq=False)
class MixtureChannel:
    """``rho -> sum_i probs[i] U_i rho U_i^dag``."""

    ops: tuple
    probs: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        ops = tuple(np.array(u, dtype=complex) for u in self.ops)
        probs = np.array(self.probs, dtype=float)
        if len(ops) != probs.size:
            raise ValueError("need one probability per unitary")
        if probs.min() < -1e-15 or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities {probs} are not a distribution")
        for u in ops:
            if not is_unitary(u):
                raise ValueError("mixing operators must be unitary")
        probs = np.clip(probs, 0.0, None)
        probs.setflags(write=False)
        labels = tuple(self.labels) if self.labels else tuple(f"U{i}" for i in range(len(ops)))
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "labels", labels)

    def channel(self) -> QuantumChannel:
        kraus = tuple(np.sqrt(p) * u for p, u in zip(self.probs, self.ops) if p > 0)
        return QuantumChannel(kraus, label="mixture")

    @property
    def chi_diag(self) -> np.ndarray:
        return kraus_to_chi(self.channel()).diag

    def as_dict(self) -> dict:
        return {label: float(p) for label, p in zip(self.labels, self.probs)}


@dataclass
class RestartTrace:
    restart: int
    start: np.ndarray
    probs: np.ndarray
    diamond_dist: float
    min_eig: float
    evaluations: int


@dataclass(eq=False)
class ApproximationResult:
    mixture: MixtureChannel
    chi_diag: np.ndarray
    diamond_dist: float
    certificate: honesty.HonestyCertificate
    duality_gap: float
    options: OptimizerOptions
    restarts: list = field(default_factory=list)
    evaluations: int = 0
    empirical: honesty.EmpiricalReport | None = None

    @property
    def channel(self) -> QuantumChannel:
        return self.mixture.channel()


# -- mixing sets -----------------------------------------------------------------

def pauli_set(n_qubits: int = 1) -> tuple[list, list]:
    return list(pauli_basis(n_qubits)), pauli_labels(n_qubits)


def named_mixing_set(name: str) -> tuple[list, list]:
    """``pauli``, ``pauli+H`` or ``pauli+Z90`` (single qubit)."""
    ops, labels = pauli_set(1)
    if name == "pauli":
        return ops, labels
    if name == "pauli+H":
        return ops + [HADAMARD], labels + ["H"]
    if name == "pauli+Z90":
        return ops + [Z_PI_2], labels + ["Z90"]
    raise KeyError(f"unknown mixing set {name!r}")


def _identity_first(ops, labels):
    d = ops[0].shape[0]
    for i, u in enumerate(ops):
        phase = u[0, 0]
        if abs(abs(phase) - 1) < 1e-12 and np.allclose(u, phase * np.eye(d), atol=1e-12):
            order = [i] + [j for j in range(len(ops)) if j != i]
            return [ops[j] for j in order], [labels[j] for j in order]
    raise ValueError("the mixing set must contain the identity")


def project_capped_simplex(z: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``{q >= 0, sum(q) <= 1}``."""
    q = np.clip(z, 0.0, None)
    if q.sum() <= 1.0:
        return q
    # projection onto the probability simplex sum(q) == 1
    u = np.sort(z)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.nonzero(u - css / np.arange(1, z.size + 1) > 0)[0][-1]
    return np.clip(z - css[k] / (k + 1), 0.0, None)


class _Objective:
    """Penalised diamond distance over the non-identity weights ``q``."""

    def __init__(self, ch: QuantumChannel, ops: list, opts: OptimizerOptions):
        self.ch = ch
        self.opts = opts
        self.chois = np.stack([kraus_to_choi(QuantumChannel((u,))) for u in ops])
        self.target = kraus_to_choi(ch)
        self.blochs = np.stack([kraus_to_ptm(QuantumChannel((u,))).r[1:, 1:] for u in ops])
        self.b, _ = honesty.build_B(ch)
        self._cache: dict = {}
        self.evaluations = 0

    @staticmethod
    def probs(q: np.ndarray) -> np.ndarray:
        return np.concatenate([[max(0.0, 1.0 - q.sum())], q])

    def min_eig(self, p: np.ndarray) -> float:
        m = np.tensordot(p, self.blochs, axes=1)
        return float(np.linalg.eigvalsh(honesty.build_A(m) - self.b)[0])

    def diamond(self, p: np.ndarray) -> float:
        key = tuple(np.round(p, 15))
        if key not in self._cache:
            self.evaluations += 1
            j = np.tensordot(p, self.chois, axes=1) - self.target
            self._cache[key] = diamond.diamond_norm_choi(j).value
        return self._cache[key]

    def __call__(self, z: np.ndarray) -> float:
        q = project_capped_simplex(z)
        p = self.probs(q)
        violation = max(0.0, -self.min_eig(p))
        return self.diamond(p) + self.opts.penalty * (violation + np.abs(z - q).sum())

    def ray_point(self, p: np.ndarray, tau: float) -> np.ndarray:
        e0 = np.zeros_like(p)
        e0[0] = 1.0
        out = e0 + tau * (p - e0)
        out[0] = max(out[0], 0.0)
        return out / out.sum()

    def boundary_scale(self, p: np.ndarray, lo: float, hi: float) -> float:
        """Smallest feasible ``tau`` in ``[lo, hi]`` (``hi`` must be feasible)."""
        for _ in range(200):
            if hi - lo <= 1e-13 * max(1.0, hi):
                break
            mid = 0.5 * (lo + hi)
            if self.min_eig(self.ray_point(p, mid)) >= 0.0:
                hi = mid
            else:
                lo = mid
        return hi

    def snap_to_boundary(self, p: np.ndarray) -> np.ndarray | None:
        """Feasible point on the ray through ``p`` with ``min eig(A - B) == 0``, if any."""
        tau_max = 1.0 / (1.0 - p[0]) if p[0] < 1.0 else 1.0
        if self.min_eig(p) >= 0.0:
            return self.ray_point(p, self.boundary_scale(p, 0.0, 1.0))
        if tau_max > 1.0 and self.min_eig(self.ray_point(p, tau_max)) >= 0.0:
            return self.ray_point(p, self.boundary_scale(p, 1.0, tau_max))
        return None


def _start_point(obj: _Objective, k: int, rng: np.random.Generator, restart: int) -> np.ndarray:
    u = np.full(k, 1.0 / k) if restart == 0 else rng.dirichlet(np.ones(k))
    p = obj.probs(u)
    snapped = obj.snap_to_boundary(p)
    if snapped is None:
        return u
    q = snapped[1:]
    if restart > 0:
        q = q * (1.0 + rng.uniform(0.0, 1.0))
    return project_capped_simplex(q)


def _run_restart(obj: _Objective, k: int, restart: int, opts: OptimizerOptions) -> RestartTrace:
    rng = np.random.default_rng([opts.seed, restart])
    q0 = _start_point(obj, k, rng, restart)
    before = obj.evaluations
    step = max(0.25 * float(q0.max()), 1e-4)
    simplex = np.vstack([q0] + [q0 + step * e for e in np.eye(k)])
    res = minimize(
        obj,
        q0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "maxfev": opts.max_iter,
            "xatol": 1e-5,
            "fatol": 1e-7,
            "adaptive": k > 4,
        },
    )
    p = obj.probs(project_capped_simplex(res.x))
    candidates = [p]
    # optima often sit on a face of the simplex that Nelder-Mead only approaches;
    # also try the point with small weights dropped
    pruned = p.copy()
    pruned[1:][pruned[1:] < PRUNE_FRACTION * pruned[1:].max(initial=0.0)] = 0.0
    pruned[0] = 1.0 - pruned[1:].sum()
    for c in (p, pruned):
        snapped = obj.snap_to_boundary(c)
        if snapped is not None:
            candidates.append(snapped)
    feasible = [c for c in candidates if obj.min_eig(c) >= -opts.cert_tol]
    pool = feasible or candidates
    best = min(pool, key=obj.diamond)
    return RestartTrace(restart, obj.probs(q0), best, obj.diamond(best), obj.min_eig(best),
                        obj.evaluations - before)


def _pick(traces: list, chi00) -> RestartTrace:
    best = min(t.diamond_dist for t in traces)
    tied = [t for t in traces if t.diamond_dist <= best + TIE_TOL]
    return min(tied, key=lambda t: (-round(chi00(t.probs), 12), tuple(t.probs)))


def approximate(ch: QuantumChannel, mixing_set, opts: OptimizerOptions | None = None,
                labels=None) -> ApproximationResult:
    """Closest honest mixture over ``mixing_set`` (a list of unitaries containing the identity)."""
    opts = opts or OptimizerOptions()
    ops = [np.asarray(u, dtype=complex) for u in mixing_set]
    labels = list(labels) if labels is not None else [f"U{i}" for i in range(len(ops))]
    for u in ops:
        if u.shape != (ch.dim, ch.dim):
            raise DimensionMismatch(f"mixing operator of shape {u.shape} for a {ch.dim}-dimensional channel")
    ops, labels = _identity_first(ops, labels)
    k = len(ops) - 1

    ptm = kraus_to_ptm(ch).r
    if np.max(np.abs(ptm - np.eye(ptm.shape[0]))) <= 1e-12:
        p = np.zeros(len(ops))
        p[0] = 1.0
        mix = MixtureChannel(tuple(ops), p, tuple(labels))
        cert = honesty.certify_channel(mix.channel(), ch, opts.cert_tol)
        return ApproximationResult(mix, mix.chi_diag, 0.0, cert, 0.0, opts, [], 0,
                                   _paired_check(mix, ch, opts))

    obj = _Objective(ch, ops, opts)

    def chi00(p):
        return float(sum(pi * abs(np.trace(u)) ** 2 for pi, u in zip(p, ops)) / ch.dim**2)

    traces = [_run_restart(obj, k, r, opts) for r in range(max(1, opts.restarts))]
    for t in traces:
        log.debug("restart %d: diamond %.6g, min eig %.3g, %d evals", t.restart, t.diamond_dist, t.min_eig,
                  t.evaluations)
    best = _pick([t for t in traces if t.min_eig >= -opts.cert_tol] or traces, chi00)

    mix = MixtureChannel(tuple(ops), best.probs, tuple(labels))
    cert = honesty.certify(np.tensordot(best.probs, obj.blochs, axes=1), ch, opts.cert_tol, b=obj.b)
    if not cert.passed:
        raise Infeasible(f"no honest mixture found; best min eig(A - B) = {cert.min_eig_a_minus_b:.3e}")
    full = diamond.diamond_distance_full(mix.channel(), ch)
    return ApproximationResult(mix, mix.chi_diag, full.value, cert, full.gap, opts, traces, obj.evaluations,
                               _paired_check(mix, ch, opts))


def _paired_check(mix: MixtureChannel, ch: QuantumChannel, opts: OptimizerOptions):
    # multi-qubit certificates are conjectural, so always back them with sampling
    if ch.n_qubits == 1:
        return None
    return honesty.empirical_honesty_check(mix.channel(), ch, opts.empirical_samples, opts.seed)


def approximate_pauli(ch: QuantumChannel, opts: OptimizerOptions | None = None) -> ApproximationResult:
    ops, labels = pauli_set(ch.n_qubits)
    return approximate(ch, ops, opts, labels)


def approximate_two_qubit_sparse(ch: QuantumChannel, support, opts: OptimizerOptions | None = None
                                 ) -> ApproximationResult:
    """Pauli approximation restricted to the two-qubit Pauli strings in ``support``."""
    if ch.n_qubits != 2:
        raise DimensionMismatch("sparse two-qubit approximation needs a two-qubit channel")
    support = [s.upper() for s in support]
    if "II" not in support:
        raise ValueError("support must include II")
    return approximate(ch, [pauli(s) for s in support], opts, support)


def exact_dephasing_match(theta: float, axis) -> MixtureChannel:
    """Dephasing about ``axis`` whose input-output distinguishability equals that of the
    rotation by ``theta`` about the same axis, for every state."""
    p = abs(np.sin(theta / 2))
    n_sigma = axis_pauli(axis)
    return MixtureChannel((np.eye(2, dtype=complex), n_sigma), np.array([1 - p, p]), ("I", "n.sigma"))
