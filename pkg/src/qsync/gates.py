"""Truth tables, CNOT fidelity and the Rabi/non-Rabi synchronization formulas.

Tables are probability matrices over the inputs {|u0>, |u1>, |d0>, |d1>}:
``table[i, j]`` is the probability that input ``i`` ends in output ``j``.
Phases are not tracked.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .hamiltonian import ControlState, Drive, SystemParams
from .rwa import Branch, bare_splitting, non_rabi_angle, rabi_frequency, transition_probability

ROW_SUM_TOL = 1e-10
DEFAULT_SUPPRESSION_THRESHOLD = 0.05
BASIS_LABELS = ("up,0", "up,1", "down,0", "down,1")

_SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])
_KEEP = np.eye(2)


def _block_diag(upper, lower) -> np.ndarray:
    out = np.zeros((4, 4))
    out[:2, :2] = upper
    out[2:, 2:] = lower
    return out


def flip_block(p_flip: float) -> np.ndarray:
    return np.array([[1.0 - p_flip, p_flip], [p_flip, 1.0 - p_flip]])


class ProbabilityTableWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    values: np.ndarray
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (4, 4):
            raise ValueError(f"probability table must be 4x4, got {values.shape}")
        if np.any(values < -ROW_SUM_TOL) or np.any(values > 1 + ROW_SUM_TOL):
            raise ValueError("table entries must lie in [0, 1]")
        if np.max(np.abs(values.sum(axis=1) - 1.0)) > ROW_SUM_TOL:
            raise ValueError("table rows must sum to 1")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def conditional(cls, p_flip_up: float, p_flip_down: float, notes=()) -> "ProbabilityTable":
        return cls(_block_diag(flip_block(p_flip_up), flip_block(p_flip_down)), tuple(notes))

    def __getitem__(self, index):
        return self.values[index]

    def flip(self, s: ControlState) -> float:
        """P(|s1> <- |s0>)."""
        i = 0 if s is ControlState.UP else 2
        return float(self.values[i, i + 1])

    @property
    def is_block_diagonal(self) -> bool:
        return not np.any(self.values[:2, 2:]) and not np.any(self.values[2:, :2])


class GateTarget(enum.Enum):
    CNOT_PLUS = "cnot_plus"
    CNOT_MINUS = "cnot_minus"
    CU_PLUS = "cu_plus"
    CU_MINUS = "cu_minus"

    @property
    def branch(self) -> Branch:
        return Branch.PLUS if self in (GateTarget.CNOT_PLUS, GateTarget.CU_PLUS) else Branch.MINUS

    def ideal(self, rotation_angle: float = math.pi) -> np.ndarray:
        """Ideal truth table.

        Controlled-U targets rotate the active block by ``rotation_angle`` =
        Omega_R t; at pi they coincide with the CNOT table of the same branch.
        CNOT targets ignore the angle.
        """
        if self in (GateTarget.CNOT_PLUS, GateTarget.CNOT_MINUS):
            active = _SWAP
        else:
            active = flip_block(math.sin(0.5 * rotation_angle) ** 2)
        if self.branch is Branch.PLUS:
            return _block_diag(active, _KEEP)
        return _block_diag(_KEEP, active)


@dataclass(frozen=True)
class FidelityReport:
    fidelity: float
    at_time: float | None = None

    @property
    def error(self) -> float:
        return 1.0 - self.fidelity


def fidelity(table, target: GateTarget = GateTarget.CNOT_PLUS, at_time=None, rotation_angle=math.pi) -> FidelityReport:
    """F = Tr(table . ideal) / 4."""
    values = table.values if isinstance(table, ProbabilityTable) else np.asarray(table, dtype=float)
    value = 0.25 * float(np.trace(values @ target.ideal(rotation_angle)))
    return FidelityReport(fidelity=min(max(value, 0.0), 1.0), at_time=at_time)


def probability_table_rwa(p: SystemParams, d: Drive, t: float) -> ProbabilityTable:
    return ProbabilityTable.conditional(
        transition_probability(p, d, ControlState.UP, t),
        transition_probability(p, d, ControlState.DOWN, t),
    )


@dataclass(frozen=True)
class MatchingIndices:
    """n: non-Rabi periods beyond the flip count, l: which Rabi flip, m: repetition."""

    n: int = 1
    l: int = 1
    m: int = 1

    def __post_init__(self):
        for name in ("n", "l", "m"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")


def matching_ratio(idx: MatchingIndices) -> float:
    """Omega_nR / Omega_R required to synchronise at the l-th flip."""
    return 2.0 * (idx.n + idx.l - 1) / (2 * idx.l - 1)


def _sync_prefactor(idx: MatchingIndices) -> float:
    n, l = idx.n, idx.l
    return (2 * l - 1) / math.sqrt((2 * n - 1) * (2 * n + 4 * l - 3))


def vb_cnot(p: SystemParams, idx: MatchingIndices) -> float:
    """Drive amplitude V_B at which the frequencies obey the matching ratio."""
    if p.delta_b == 0:
        raise ValueError("delta_b must be nonzero")
    return _sync_prefactor(idx) * 8 * p.coupling * p.eps_b / p.delta_b


def cnot_frequencies(p: SystemParams, idx: MatchingIndices) -> tuple[float, float]:
    omega0 = bare_splitting(p)
    if omega0 == 0:
        raise ValueError("qubit B has zero splitting")
    scale = abs(4 * p.coupling * p.eps_b) / omega0 / math.sqrt((2 * idx.n - 1) * (2 * idx.n + 4 * idx.l - 3))
    return (2 * idx.l - 1) * scale, 2 * (idx.n + idx.l - 1) * scale


def operation_times(omega_r: float, l: int = 1, count: int = 1) -> list[float]:
    """Flip times (k - 1/2) 2 pi / omega_r for k = l, l+1, ..."""
    if not omega_r > 0:
        raise ValueError(f"omega_r must be positive, got {omega_r!r}")
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l!r}")
    period = 2 * math.pi / omega_r
    return [(k - 0.5) * period for k in range(l, l + count)]


def cu_suppression(idx: MatchingIndices) -> float:
    """sin^2 of the non-Rabi angle at V_B = vb_cnot(idx)."""
    # integer numerator and denominator: one correctly rounded division
    return (2 * idx.l - 1) ** 2 / (4 * (idx.n + idx.l - 1) ** 2)


def cu_truth_table(
    p: SystemParams,
    d: Drive,
    branch: Branch,
    t: float,
    threshold: float = DEFAULT_SUPPRESSION_THRESHOLD,
) -> ProbabilityTable:
    """Controlled-U table assuming the non-Rabi block is frozen.

    If the non-Rabi amplitude is not below ``threshold`` the table is still
    returned, with a note and a ProbabilityTableWarning.
    """
    p_rot = math.sin(0.5 * rabi_frequency(p, d.v_b) * t) ** 2
    notes = []
    leak = math.sin(non_rabi_angle(p, d)) ** 2
    if leak >= threshold:
        msg = f"non-Rabi amplitude {leak:.3g} not below suppression threshold {threshold:.3g}"
        notes.append(msg)
        warnings.warn(msg, ProbabilityTableWarning, stacklevel=2)
    if branch is Branch.PLUS:
        return ProbabilityTable.conditional(p_rot, 0.0, notes)
    return ProbabilityTable.conditional(0.0, p_rot, notes)
