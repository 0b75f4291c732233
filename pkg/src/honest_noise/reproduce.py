"""Recompute the reference tables and the Bloch-plane visualisation data."""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import golden
from .approximate import (
    ApproximationResult,
    OptimizerOptions,
    approximate,
    approximate_pauli,
    approximate_two_qubit_sparse,
    exact_dephasing_match,
    named_mixing_set,
)
from .channels import bloch_vector, kraus_to_chi, pauli_labels, xz_plane_state
from .diamond import diamond_distance
from .honesty import io_distinguishability
from .twirl import pauli_twirl
from .zoo import FIG1_DEFAULTS, REFERENCE_PARAMS, make_rotation, reference_channels, reference_two_qubit_channel, xz_axis

TABLE1_ROWS = ("1", "2", "3,0", "3,1", "3,2", "3,3", "3,4")
TABLE4_ROWS = ("1", "3,0", "3,1", "3,2")
N_XZ_POINTS = 360
N_ALPHA_POINTS = 181


@dataclass(frozen=True)
class Comparison:
    cell: golden.GoldenCell
    computed: float
    tol: float

    @property
    def deviation(self) -> float:
        return abs(self.computed - self.cell.value)

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tol


@functools.lru_cache(maxsize=None)
def pauli_approximation(row: str, opts: OptimizerOptions = OptimizerOptions()) -> ApproximationResult:
    return approximate_pauli(reference_channels()[row], opts)


@functools.lru_cache(maxsize=None)
def z90_approximation(opts: OptimizerOptions = OptimizerOptions()) -> ApproximationResult:
    ops, labels = named_mixing_set("pauli+Z90")
    return approximate(reference_channels()["3,0"], ops, opts, labels)


@functools.lru_cache(maxsize=None)
def two_qubit_approximation(opts: OptimizerOptions = OptimizerOptions()) -> ApproximationResult:
    return approximate_two_qubit_sparse(reference_two_qubit_channel(), ["II", "XX"], opts)


def twirl_distance(row: str) -> float:
    ch = reference_channels()[row]
    return diamond_distance(ch, pauli_twirl(ch))


def _chi_cells(res: ApproximationResult) -> dict:
    return {f"chi{i}{i}": float(res.chi_diag[i]) for i in range(4)} | {"diamond": res.diamond_dist}


def computed_values(table: int, opts: OptimizerOptions = OptimizerOptions()) -> dict:
    """``{(row, quantity): value}`` for every reference cell of ``table``."""
    out = {}
    if table == 1:
        for row in TABLE1_ROWS:
            out |= {(row, q): v for q, v in _chi_cells(pauli_approximation(row, opts)).items()}
    elif table == 2:
        chs = reference_channels()
        out[("1", "chi00")] = kraus_to_chi(chs["1"]).diag[0]
        out[("2", "chi00")] = kraus_to_chi(chs["2"]).diag[0]
        # every rotation shares chi00 = cos^2(theta / 2); use the z-axis one
        out[("3,j", "chi00")] = kraus_to_chi(chs["3,0"]).diag[0]
    elif table == 3:
        out |= {("3,0", q): v for q, v in _chi_cells(z90_approximation(opts)).items()}
    elif table == 4:
        for row in TABLE4_ROWS:
            out[(row, "twirl_diamond")] = twirl_distance(row)
            out[(row, "pauli_diamond")] = pauli_approximation(row, opts).diamond_dist
    elif table == 5:
        res = two_qubit_approximation(opts)
        chi = kraus_to_chi(res.channel).diag
        labels = pauli_labels(2)
        out[("2q", "chi_II")] = chi[labels.index("II")]
        out[("2q", "chi_XX")] = chi[labels.index("XX")]
        out[("2q", "diamond")] = res.diamond_dist
    else:
        raise KeyError(f"no reference table {table}")
    return {k: float(v) for k, v in out.items()}


def compare_table(table: int, tol: float | None = None,
                  opts: OptimizerOptions = OptimizerOptions()) -> list[Comparison]:
    tol = golden.DEFAULT_TOL[table] if tol is None else tol
    values = computed_values(table, opts)
    return [Comparison(c, values[(c.row, c.quantity)], tol) for c in golden.cells(table)]


# -- Bloch-plane data --------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def fig1_channels(j: int, opts: OptimizerOptions = OptimizerOptions()) -> dict:
    """True rotation, its Pauli approximation, exact dephasing match and twirl."""
    theta = FIG1_DEFAULTS["theta"]
    axis = xz_axis(REFERENCE_PARAMS["axis_angles"][j])
    ch = make_rotation(theta, axis)
    return {
        "true": ch,
        "P": approximate_pauli(ch, opts).channel,
        "D": exact_dephasing_match(theta, axis).channel(),
        "t": pauli_twirl(ch),
    }


def fig1_xz_data(j: int, opts: OptimizerOptions = OptimizerOptions()) -> tuple[list, np.ndarray]:
    """Unit vectors in the x-z plane and their Bloch images under P, D and t."""
    chans = fig1_channels(j, opts)
    phi = 2 * np.pi * np.arange(N_XZ_POINTS) / N_XZ_POINTS
    states = xz_plane_state(phi)
    cols = [phi, np.sin(phi), np.cos(phi)]
    header = ["phi", "x_in", "z_in"]
    for key in ("P", "D", "t"):
        cols += list(bloch_vector(chans[key](states)).T)
        header += [f"x_{key}", f"y_{key}", f"z_{key}"]
    return header, np.column_stack(cols)


def fig1_distinguishability(j: int, opts: OptimizerOptions = OptimizerOptions()) -> tuple[list, np.ndarray]:
    """``||(L - I)(rho)||_1`` for pure x-z states at angle ``alpha`` from z, for L in P, D, t."""
    chans = fig1_channels(j, opts)
    alpha = np.linspace(0.0, np.pi, N_ALPHA_POINTS)
    states = xz_plane_state(alpha)
    cols = [alpha] + [io_distinguishability(chans[k], states) for k in ("P", "D", "t")]
    return ["alpha", "d_P", "d_D", "d_t"], np.column_stack(cols)


def ordering_violations(curves: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Grid indices where ``d_P >= d_D >= d_t`` fails by more than ``tol``.

    Points where all three curves sit within ``tol`` of zero are exempt.
    ``curves`` has columns ``alpha, d_P, d_D, d_t``.
    """
    _, dp, dd, dt = curves.T
    exempt = np.max(np.abs(curves[:, 1:]), axis=1) <= tol
    bad = ((dp < dd - tol) | (dd < dt - tol)) & ~exempt
    return np.nonzero(bad)[0]
