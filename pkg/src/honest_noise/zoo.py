"""Preset noise channels, including every channel used in the reproduced tables."""
from __future__ import annotations

import numpy as np

from .channels import I2, X, Y, Z, QuantumChannel, pauli

AXIS_TOL = 1e-12

# p, theta and the rotation-axis angles theta_k = k pi / 8 used throughout
REFERENCE_PARAMS = {
    "p": 0.01,
    "theta": 0.02,
    "n_p": (np.sin(np.pi / 8), 0.0, np.cos(np.pi / 8)),
    "axis_angles": tuple(k * np.pi / 8 for k in range(5)),
}
# larger rotation used for the Bloch-sphere visualisation data
FIG1_DEFAULTS = {
    "theta": 2 * np.arcsin(np.sqrt(0.1)),
    "js": (0, 1, 2),
}

HADAMARD = (X + Z) / np.sqrt(2)
Z_PI_2 = (I2 - 1j * Z) / np.sqrt(2)  # exp(-i pi/4 Z)


class BadProbability(ValueError):
    pass


class BadAxis(ValueError):
    pass


def _prob(p: float, upper: float = 1.0, name: str = "p") -> float:
    p = float(p)
    if not (0.0 <= p <= upper) or not np.isfinite(p):
        raise BadProbability(f"{name}={p} outside [0, {upper}]")
    return p


def unit_axis(axis) -> np.ndarray:
    n = np.asarray(axis, dtype=float).reshape(-1)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > AXIS_TOL:
        raise BadAxis(f"axis must be a unit 3-vector, got {axis}")
    return n


def xz_axis(angle: float) -> np.ndarray:
    """Unit vector in the x-z plane at ``angle`` from +z toward +x."""
    return np.array([np.sin(angle), 0.0, np.cos(angle)])


def axis_pauli(axis) -> np.ndarray:
    n = unit_axis(axis)
    return n[0] * X + n[1] * Y + n[2] * Z


def rotation_unitary(theta: float, axis) -> np.ndarray:
    """``exp(-i theta/2 n . sigma)``."""
    return np.cos(theta / 2) * I2 - 1j * np.sin(theta / 2) * axis_pauli(axis)


def make_dephase_axis(p: float, axis) -> QuantumChannel:
    p = _prob(p)
    return QuantumChannel((np.sqrt(1 - p) * I2, np.sqrt(p) * axis_pauli(axis)), label=f"dephase-axis(p={p:g})")


def make_depolarizing(p: float) -> QuantumChannel:
    """``(1 - 3p) rho + p (X rho X + Y rho Y + Z rho Z)``."""
    p = _prob(p, 1.0 / 3.0)
    return QuantumChannel(
        (np.sqrt(1 - 3 * p) * I2, np.sqrt(p) * X, np.sqrt(p) * Y, np.sqrt(p) * Z),
        label=f"depolarizing(p={p:g})",
    )


def make_rotation(theta: float, axis) -> QuantumChannel:
    return QuantumChannel((rotation_unitary(theta, axis),), label=f"rotation(theta={theta:g})")


def make_dephasing_z(p: float) -> QuantumChannel:
    p = _prob(p)
    return QuantumChannel((np.sqrt(1 - p) * I2, np.sqrt(p) * Z), label=f"dephasing-z(p={p:g})")


def make_hadamard_mixture(p: float) -> QuantumChannel:
    p = _prob(p)
    return QuantumChannel((np.sqrt(1 - p) * I2, np.sqrt(p) * HADAMARD), label=f"hadamard-mixture(p={p:g})")


def make_collective_xx(theta: float) -> QuantumChannel:
    """Two-qubit ``exp(-i theta/2 X (x) X)``."""
    xx = pauli("XX")
    u = np.cos(theta / 2) * np.eye(4) - 1j * np.sin(theta / 2) * xx
    return QuantumChannel((u,), label=f"collective-xx(theta={theta:g})")


def make_amplitude_damping(gamma: float) -> QuantumChannel:
    """Decay toward ``|0>`` (the +z pole)."""
    g = _prob(gamma, name="gamma")
    k0 = np.array([[1, 0], [0, np.sqrt(1 - g)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(g)], [0, 0]], dtype=complex)
    return QuantumChannel((k0, k1), label=f"amplitude-damping(gamma={g:g})")


def _axis_param(params: dict) -> np.ndarray:
    if "axis" in params:
        return unit_axis(params["axis"])
    if "axis_angle" in params:
        return xz_axis(float(params["axis_angle"]))
    if "k" in params:
        return xz_axis(int(params["k"]) * np.pi / 8)
    raise BadAxis("need one of 'axis', 'axis_angle' or 'k'")


PRESETS = {
    "dephase-axis": lambda q: make_dephase_axis(q["p"], _axis_param(q)),
    "depolarizing": lambda q: make_depolarizing(q["p"]),
    "rotation-axis": lambda q: make_rotation(q["theta"], _axis_param(q)),
    "dephasing-z": lambda q: make_dephasing_z(q["p"]),
    "hadamard-mixture": lambda q: make_hadamard_mixture(q["p"]),
    "collective-xx": lambda q: make_collective_xx(q["theta"]),
    "amplitude-damping": lambda q: make_amplitude_damping(q["gamma"]),
}


def make_preset(name: str, params: dict | None = None) -> QuantumChannel:
    """Build a preset by name. Missing parameters fall back to REFERENCE_PARAMS."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    q = {"p": REFERENCE_PARAMS["p"], "theta": REFERENCE_PARAMS["theta"]}
    q.update(params or {})
    try:
        ch = PRESETS[name](q)
    except KeyError as e:
        raise KeyError(f"preset {name!r} needs parameter {e.args[0]!r}") from None
    return ch


def reference_channels() -> dict[str, QuantumChannel]:
    """The single-qubit channels of the reproduced tables, keyed ``"1"``, ``"2"``, ``"3,k"``."""
    d = REFERENCE_PARAMS
    out = {
        "1": make_dephase_axis(d["p"], d["n_p"]),
        "2": make_depolarizing(d["p"]),
    }
    for k, ang in enumerate(d["axis_angles"]):
        out[f"3,{k}"] = make_rotation(d["theta"], xz_axis(ang))
    return out


def reference_two_qubit_channel() -> QuantumChannel:
    return make_collective_xx(REFERENCE_PARAMS["theta"])
