"""Coupled two-qubit Hamiltonians and the small linear-algebra kernel.

Units: hbar = 1, every energy is an angular frequency.  The two-qubit basis
is ordered {|uu>, |ud>, |du>, |dd>} (qubit A first), and single-qubit
matrices use {|u>, |d>} with sigma_z|u> = +|u>.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

HERMITIAN_RTOL = 1e-14
UNITARY_ATOL = 1e-12


class ControlState(enum.Enum):
    """State of the control qubit A."""

    UP = 1
    DOWN = -1

    @property
    def sign(self) -> int:
        return self.value


@dataclass(frozen=True)
class SystemParams:
    """Static device parameters of the coupled pair."""

    eps_a: float
    delta_a: float
    eps_b: float
    delta_b: float
    coupling: float

    def __post_init__(self):
        for name in ("eps_a", "delta_a", "eps_b", "delta_b", "coupling"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")

    def replace(self, **changes) -> "SystemParams":
        fields = dict(
            eps_a=self.eps_a,
            delta_a=self.delta_a,
            eps_b=self.eps_b,
            delta_b=self.delta_b,
            coupling=self.coupling,
        )
        fields.update(changes)
        return SystemParams(**fields)


@dataclass(frozen=True)
class Drive:
    """Harmonic field V_i cos(omega t) applied to each qubit."""

    v_a: float = 0.0
    v_b: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        for name in ("v_a", "v_b", "omega"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.omega < 0:
            raise ValueError(f"omega must be >= 0, got {self.omega!r}")

    def replace(self, **changes) -> "Drive":
        fields = dict(v_a=self.v_a, v_b=self.v_b, omega=self.omega)
        fields.update(changes)
        return Drive(**fields)

    def field_a(self, t: float) -> float:
        return self.v_a * math.cos(self.omega * t)

    def field_b(self, t: float) -> float:
        return self.v_b * math.cos(self.omega * t)


ZERO_DRIVE = Drive()

_PAULI = {
    "id": np.array([[1, 0], [0, 1]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(which: str) -> np.ndarray:
    """Return a fresh copy of the Pauli matrix ``which`` in {x, y, z, id}."""
    try:
        return _PAULI[which].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli matrix {which!r}") from None


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def qubit_hamiltonian(eps, delta, field=0.0) -> np.ndarray:
    """Single qubit ``[(eps + field) sigma_z - delta sigma_x] / 2``."""
    return 0.5 * ((eps + field) * _PAULI["z"] - delta * _PAULI["x"])


def static_hamiltonian(p: SystemParams) -> np.ndarray:
    return full_hamiltonian(p, ZERO_DRIVE, 0.0)


def drive_operator(d: Drive) -> np.ndarray:
    """The 4x4 matrix multiplying cos(omega t) in the full Hamiltonian."""
    return 0.5 * (d.v_a * kron(_PAULI["z"], _PAULI["id"]) + d.v_b * kron(_PAULI["id"], _PAULI["z"]))


def full_hamiltonian(p: SystemParams, d: Drive, t: float) -> np.ndarray:
    h_a = qubit_hamiltonian(p.eps_a, p.delta_a, d.field_a(t))
    h_b = qubit_hamiltonian(p.eps_b, p.delta_b, d.field_b(t))
    eye = _PAULI["id"]
    return kron(h_a, eye) + kron(eye, h_b) + p.coupling * kron(_PAULI["z"], _PAULI["z"])


def conditional_hamiltonian(p: SystemParams, d: Drive, s: ControlState, t: float) -> np.ndarray:
    """Qubit-B Hamiltonian for control state ``s``, valid when delta_a is negligible.

    Not enforced here: whether dropping delta_a is acceptable is the caller's call.
    """
    sign = s.sign
    bias = p.eps_b + 2 * sign * p.coupling + d.field_b(t)
    offset = sign * (p.eps_a + d.field_a(t))
    return 0.5 * (bias * _PAULI["z"] + offset * _PAULI["id"] - p.delta_b * _PAULI["x"])


def rotation(eta: float) -> np.ndarray:
    """U(eta) = [[cos eta/2, -sin eta/2], [sin eta/2, cos eta/2]].

    U(eta) h U(eta)^-1 diagonalises ``(eps sigma_z - delta sigma_x)/2`` when
    eta = atan2(delta, eps), putting the upper level first.
    """
    c, s = math.cos(eta / 2), math.sin(eta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _check_hermitian(h: np.ndarray) -> None:
    scale = max(np.max(np.abs(h)), 1.0e-300)
    if np.max(np.abs(h - h.conj().T)) > HERMITIAN_RTOL * scale:
        raise ValueError("matrix is not Hermitian within tolerance")


def propagator(h, t: float) -> np.ndarray:
    """exp(-i h t) for a time-independent Hermitian ``h``."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    _check_hermitian(h)
    if t == 0:
        return np.eye(h.shape[0], dtype=complex)
    # symmetrise so eigh sees an exactly Hermitian matrix
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def eigenvalues(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    _check_hermitian(h)
    return np.linalg.eigvalsh(0.5 * (h + h.conj().T))


def is_unitary(u, atol: float = UNITARY_ATOL) -> bool:
    u = np.asarray(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < atol)
