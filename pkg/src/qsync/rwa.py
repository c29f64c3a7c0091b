"""Driven conditional oscillations in the rotating-wave approximation.

Qubit B is first rotated into the eigenbasis {|0>, |1>} of its bare
Hamiltonian (angle atan2(delta_b, eps_b)); the drive V_B cos(omega t) is then
viewed in a frame rotating at omega, which leaves a static 2x2 Hamiltonian
per control state.  The rotation exp(i omega t sigma_z / 2) does not touch
sigma_z populations, so probabilities computed here compare directly with
lab-frame populations measured in the rotated basis.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .hamiltonian import ControlState, Drive, SystemParams, pauli
from .static import ConditionalFrame, mixing_angle

DEFAULT_REGIME_THRESHOLD = 0.2


class Branch(enum.Enum):
    """Which of the two resonances the drive sits on."""

    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        return 1 if self is Branch.PLUS else -1

    @property
    def rabi_control(self) -> ControlState:
        """Control state whose block is driven on resonance."""
        return ControlState.UP if self is Branch.PLUS else ControlState.DOWN


@dataclass(frozen=True)
class RwaContext:
    omega0_b: float
    eta0_b: float
    shift: float
    drive_strength: float


@dataclass(frozen=True)
class OscillationPair:
    rabi: ConditionalFrame
    non_rabi: ConditionalFrame
    resonance_branch: Branch


@dataclass(frozen=True)
class RegimeReport:
    """Ratios that must be small for the RWA picture to hold.

    ``bias_ratio`` = eps_b V_b / Omega0_b^2, ``control_ratio`` = V_a / eps_a,
    ``coupling_ratio`` = |2J| / V_b.
    """

    bias_ratio: float
    control_ratio: float
    coupling_ratio: float
    threshold: float

    @property
    def ratios(self) -> tuple[float, float, float]:
        return self.bias_ratio, self.control_ratio, self.coupling_ratio

    @property
    def in_regime(self) -> bool:
        return all(r < self.threshold for r in self.ratios)


def bare_splitting(p: SystemParams) -> float:
    return math.hypot(p.eps_b, p.delta_b)


def rwa_context(p: SystemParams, d: Drive) -> RwaContext:
    omega0 = bare_splitting(p)
    if omega0 == 0:
        raise ValueError("qubit B has zero splitting: eps_b and delta_b are both zero")
    return RwaContext(
        omega0_b=omega0,
        eta0_b=mixing_angle(p.delta_b, p.eps_b),
        shift=2 * p.coupling * p.eps_b / omega0,
        drive_strength=p.delta_b * d.v_b / (2 * omega0),
    )


def detuning(p: SystemParams, d: Drive, s: ControlState) -> float:
    """omega - Omega0_b - 2 s J eps_b / Omega0_b."""
    ctx = rwa_context(p, d)
    return d.omega - ctx.omega0_b - s.sign * ctx.shift


def effective_hamiltonian(p: SystemParams, d: Drive, s: ControlState) -> np.ndarray:
    ctx = rwa_context(p, d)
    z_coeff = ctx.omega0_b + s.sign * ctx.shift - d.omega
    return 0.5 * (
        z_coeff * pauli("z") + s.sign * p.eps_a * pauli("id") + ctx.drive_strength * pauli("x")
    )


def conditional_frequency(p: SystemParams, d: Drive, s: ControlState) -> ConditionalFrame:
    ctx = rwa_context(p, d)
    off = d.omega - ctx.omega0_b - s.sign * ctx.shift
    omega = math.hypot(off, ctx.drive_strength)
    if omega == 0:
        raise ValueError("degenerate frame: undriven block exactly on resonance")
    return ConditionalFrame(eta=mixing_angle(ctx.drive_strength, off), omega=omega)


def transition_probability(p: SystemParams, d: Drive, s: ControlState, t: float) -> float:
    """P(|s1> <- |s0>) at time t."""
    frame = conditional_frequency(p, d, s)
    return math.sin(frame.eta) ** 2 * math.sin(0.5 * frame.omega * t) ** 2


def rabi_frequency(p: SystemParams, v_b: float) -> float:
    return abs(v_b * p.delta_b) / (2 * bare_splitting(p))


def non_rabi_frequency(p: SystemParams, v_b: float) -> float:
    omega0 = bare_splitting(p)
    return math.hypot(4 * p.coupling * p.eps_b / omega0, v_b * p.delta_b / (2 * omega0))


def non_rabi_angle(p: SystemParams, d: Drive) -> float:
    num = p.delta_b * d.v_b
    den = 8 * p.coupling * p.eps_b
    if num == 0 and den == 0:
        raise ValueError("non-Rabi angle undefined: J eps_b and delta_b V_b both vanish")
    return mixing_angle(num, den)


def resonant_frequencies(p: SystemParams) -> tuple[float, float]:
    """(omega_plus, omega_minus) = Omega0_b +/- 2 J eps_b / Omega0_b."""
    ctx = rwa_context(p, Drive())
    return ctx.omega0_b + ctx.shift, ctx.omega0_b - ctx.shift


def resonant_frequency(p: SystemParams, branch: Branch) -> float:
    plus, minus = resonant_frequencies(p)
    return plus if branch is Branch.PLUS else minus


def oscillation_pair(p: SystemParams, v_b: float, branch: Branch = Branch.PLUS) -> OscillationPair:
    """Rabi and non-Rabi frames for a drive sitting on ``branch``."""
    drive = Drive(v_b=v_b)
    non_rabi_eta = non_rabi_angle(p, drive)
    if branch is Branch.MINUS:
        # the detuning of the off-resonant block flips sign on this branch
        non_rabi_eta = mixing_angle(p.delta_b * v_b, -8 * p.coupling * p.eps_b)
    return OscillationPair(
        rabi=ConditionalFrame(eta=math.pi / 2, omega=rabi_frequency(p, v_b)),
        non_rabi=ConditionalFrame(eta=non_rabi_eta, omega=non_rabi_frequency(p, v_b)),
        resonance_branch=branch,
    )


def regime_check(p: SystemParams, d: Drive, threshold: float = DEFAULT_REGIME_THRESHOLD) -> RegimeReport:
    omega0 = bare_splitting(p)
    if omega0 == 0:
        raise ValueError("regime check needs a nonzero qubit-B splitting")
    if p.eps_a == 0:
        raise ValueError("regime check needs eps_a != 0")
    if d.v_b == 0:
        raise ValueError("regime check needs v_b != 0")
    return RegimeReport(
        bias_ratio=abs(p.eps_b * d.v_b) / omega0**2,
        control_ratio=abs(d.v_a / p.eps_a),
        coupling_ratio=abs(2 * p.coupling / d.v_b),
        threshold=threshold,
    )
