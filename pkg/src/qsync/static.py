"""Undriven conditional evolution of the target qubit.

With no applied field each control state leaves qubit B precessing under a
fixed 2x2 Hamiltonian, so occupation probabilities have a closed form in the
mixing angle and Larmor frequency of that block.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .hamiltonian import ControlState, SystemParams

NORM_TOL = 1e-12


@dataclass(frozen=True)
class ConditionalFrame:
    """Mixing angle ``eta`` and oscillation frequency ``omega`` of one block."""

    eta: float
    omega: float

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError(f"omega must be >= 0, got {self.omega!r}")
        if not -math.pi < self.eta <= math.pi:
            raise ValueError(f"eta must lie in (-pi, pi], got {self.eta!r}")

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega

    @property
    def amplitude(self) -> float:
        """sin^2(eta), the largest reachable transition probability."""
        return math.sin(self.eta) ** 2


@dataclass(frozen=True)
class InitialAmplitudes:
    """Real qubit-B start state a|u> + b|d>."""

    a: float
    b: float

    def __post_init__(self):
        if abs(self.a**2 + self.b**2 - 1) > NORM_TOL:
            raise ValueError(f"a^2 + b^2 must be 1, got {self.a**2 + self.b**2!r}")

    @classmethod
    def from_angle(cls, theta: float) -> "InitialAmplitudes":
        return cls(math.cos(theta), math.sin(theta))


UP = InitialAmplitudes(1.0, 0.0)
DOWN = InitialAmplitudes(0.0, 1.0)


def mixing_angle(num: float, den: float) -> float:
    """atan2 folded onto (-pi, pi]; a signed zero numerator would give -pi."""
    eta = math.atan2(num, den)
    return math.pi if eta == -math.pi else eta


def effective_bias(p: SystemParams, s: ControlState) -> float:
    return p.eps_b + 2 * s.sign * p.coupling


def static_frame(p: SystemParams, s: ControlState) -> ConditionalFrame:
    bias = effective_bias(p, s)
    if bias == 0 and p.delta_b == 0:
        raise ValueError("undefined mixing angle: delta_b and eps_b + 2sJ are both zero")
    return ConditionalFrame(eta=mixing_angle(p.delta_b, bias), omega=math.hypot(bias, p.delta_b))


def static_occupation(p: SystemParams, s: ControlState, init: InitialAmplitudes, t: float) -> float:
    """Probability P_{s,up}(t) that qubit B is found in |u> for control ``s``."""
    frame = static_frame(p, s)
    a, b = init.a, init.b
    overlap = a * math.sin(frame.eta) + b * math.cos(frame.eta)
    value = a * a + (b * b - overlap * overlap) * math.sin(0.5 * frame.omega * t) ** 2
    return min(max(value, 0.0), 1.0)


def static_occupation_down(p, s, init, t) -> float:
    return 1.0 - static_occupation(p, s, init, t)


def static_eigenvalues(p: SystemParams, s: ControlState) -> tuple[float, float]:
    """(lower, upper) eigenvalues of the undriven conditional block."""
    half_split = 0.5 * static_frame(p, s).omega
    centre = 0.5 * s.sign * p.eps_a
    return centre - half_split, centre + half_split


def static_cnot_point(delta_b: float) -> tuple[float, float]:
    """Return ``(coupling, eps_b)`` where the non-Rabi frequency is twice the Rabi one.

    At eps_b = 2J the Down branch oscillates fully at delta_b and the Up
    branch at sqrt(16 J^2 + delta_b^2); J = sqrt(3)/4 delta_b makes the
    latter exactly 2 delta_b.
    """
    if not delta_b > 0:
        raise ValueError(f"delta_b must be positive, got {delta_b!r}")
    coupling = math.sqrt(3.0) / 4.0 * delta_b
    return coupling, 2.0 * coupling
