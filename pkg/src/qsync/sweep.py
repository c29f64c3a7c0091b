"""Parameter sweeps and synchronization search.

A sweep evaluates one objective (gate fidelity or a conditional flip
probability) on the Cartesian product of parameter axes, using either the
RWA closed forms or the exact oracle.  Points are independent; failures are
stored as NaN and the sweep carries on.
"""
from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .gates import (
    GateTarget,
    MatchingIndices,
    cnot_frequencies,
    fidelity,
    matching_ratio,
    operation_times,
    probability_table_rwa,
    vb_cnot,
)
from .hamiltonian import ControlState, Drive, SystemParams
from .oracle import IntegrationConfig, oracle_table, oracle_tables
from .rwa import Branch, non_rabi_frequency, rabi_frequency, regime_check, resonant_frequency

AXIS_NAMES = ("v_b", "omega", "t", "j", "eps_b", "delta_b")
_PARAM_FIELDS = {"j": "coupling", "eps_b": "eps_b", "delta_b": "delta_b"}


class Backend(enum.Enum):
    RWA = "rwa"
    ORACLE = "oracle"


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown axis {self.name!r}; expected one of {AXIS_NAMES}")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"scale must be 'linear' or 'log', got {self.scale!r}")
        if self.points < 1:
            raise ValueError("an axis needs at least one point")
        if self.points == 1 and self.min != self.max:
            raise ValueError("a single-point axis needs min == max")
        if self.points >= 2 and not self.min < self.max:
            raise ValueError(f"axis {self.name!r}: min must be < max")
        if self.scale == "log" and self.min <= 0:
            raise ValueError(f"log axis {self.name!r} needs min > 0")

    def values(self) -> np.ndarray:
        if self.points == 1:
            return np.array([float(self.min)])
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.points)
        return np.linspace(self.min, self.max, self.points)


@dataclass(frozen=True)
class Objective:
    """Either ``fidelity`` against ``target`` or ``transition`` for ``control``."""

    kind: str = "fidelity"
    target: GateTarget = GateTarget.CNOT_PLUS
    control: ControlState = ControlState.UP

    def __post_init__(self):
        if self.kind not in ("fidelity", "transition"):
            raise ValueError(f"objective kind must be 'fidelity' or 'transition', got {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == "fidelity":
            return f"fidelity_{self.target.value}"
        return f"p_flip_{self.control.name.lower()}"

    def evaluate(self, table) -> float:
        if self.kind == "fidelity":
            return fidelity(table, self.target).fidelity
        return table.flip(self.control)


@dataclass(frozen=True)
class DriveTemplate:
    """Drive whose amplitude or frequency may be resolved per point.

    ``v_b`` may be a number or ``"cnot"`` (synchronised amplitude for
    ``matching``); ``omega`` may be a number, ``"plus"`` or ``"minus"``
    (the corresponding resonance of the current parameters).
    """

    v_a: float = 0.0
    v_b: float | str = 0.0
    omega: float | str = "plus"
    matching: MatchingIndices = field(default_factory=MatchingIndices)

    def resolve(self, p: SystemParams, v_b=None, omega=None) -> Drive:
        if v_b is None:
            v_b = vb_cnot(p, self.matching) if self.v_b == "cnot" else float(self.v_b)
        if omega is None:
            if self.omega in ("plus", "minus"):
                omega = resonant_frequency(p, Branch(self.omega))
            else:
                omega = float(self.omega)
        return Drive(v_a=self.v_a, v_b=v_b, omega=omega)


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple[Axis, ...]
    backend: Backend = Backend.RWA
    objective: Objective = field(default_factory=Objective)
    t: float | None = None

    def __post_init__(self):
        names = [a.name for a in self.axes]
        if not names:
            raise ValueError("a sweep needs at least one axis")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate axes in {names}")
        if "t" not in names and self.t is None:
            raise ValueError("give a 't' axis or a fixed evaluation time")


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Objective values on the grid; ``values`` has one dimension per axis."""

    axis_names: tuple[str, ...]
    coordinates: tuple[np.ndarray, ...]
    values: np.ndarray
    objective: str

    def rows(self):
        """Long format: one tuple of axis values then objective per grid point."""
        for index in np.ndindex(self.values.shape):
            coords = tuple(float(c[i]) for c, i in zip(self.coordinates, index))
            yield coords + (float(self.values[index]),)


def _point_params(p: SystemParams, point: dict) -> SystemParams:
    changes = {_PARAM_FIELDS[k]: v for k, v in point.items() if k in _PARAM_FIELDS}
    return p.replace(**changes) if changes else p


def _evaluate_times(args) -> np.ndarray:
    """Objective at every time in ``times`` for one non-time grid point."""
    p, template, point, times, backend, objective, cfg = args
    out = np.full(len(times), np.nan)
    try:
        params = _point_params(p, point)
        drive = template.resolve(params, v_b=point.get("v_b"), omega=point.get("omega"))
        if backend is Backend.ORACLE:
            order = np.argsort(times, kind="stable")
            tables = oracle_tables(params, drive, np.asarray(times)[order], cfg)
            for i, table in zip(order, tables):
                out[i] = objective.evaluate(table)
        else:
            for i, t in enumerate(times):
                try:
                    out[i] = objective.evaluate(probability_table_rwa(params, drive, t))
                except (ValueError, ArithmeticError):
                    pass
    except (ValueError, ArithmeticError, RuntimeError):
        pass
    return out


def sweep(p: SystemParams, template: DriveTemplate, spec: SweepSpec, cfg: IntegrationConfig | None = None,
          n_jobs: int = 1) -> SweepResult:
    cfg = cfg or IntegrationConfig()
    names = tuple(a.name for a in spec.axes)
    coords = tuple(a.values() for a in spec.axes)
    other = [i for i, name in enumerate(names) if name != "t"]
    t_axis = names.index("t") if "t" in names else None
    times = coords[t_axis] if t_axis is not None else np.array([spec.t], dtype=float)

    jobs = []
    for combo in itertools.product(*(range(len(coords[i])) for i in other)):
        point = {names[i]: float(coords[i][k]) for i, k in zip(other, combo)}
        jobs.append((p, template, point, times, spec.backend, spec.objective, cfg))
    if n_jobs == 1:
        results = [_evaluate_times(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs if n_jobs > 0 else None) as pool:
            results = list(pool.map(_evaluate_times, jobs))

    shape = tuple(len(c) for c in coords)
    values = np.full(shape, np.nan)
    for combo, result in zip(itertools.product(*(range(len(coords[i])) for i in other)), results):
        for k, value in enumerate(result):
            index = [0] * len(names)
            for i, c in zip(other, combo):
                index[i] = c
            if t_axis is not None:
                index[t_axis] = k
            values[tuple(index)] = value
    return SweepResult(names, coords, values, spec.objective.label)


def best_operation_point(result: SweepResult, window: dict | None = None, tie_tol: float = 1e-12):
    """Grid point maximising the objective inside ``window``.

    ``window`` maps axis names to inclusive ``(lo, hi)`` bounds.  Values within
    ``tie_tol`` of the maximum tie; ties go to the smallest t, then smallest v_b.
    """
    window = window or {}
    for name in window:
        if name not in result.axis_names:
            raise ValueError(f"window names unknown axis {name!r}")
    candidates = []
    for index in np.ndindex(result.values.shape):
        value = result.values[index]
        if np.isnan(value):
            continue
        point = {n: float(c[i]) for n, c, i in zip(result.axis_names, result.coordinates, index)}
        if all(lo <= point[n] <= hi for n, (lo, hi) in window.items()):
            candidates.append((point, float(value)))
    if not candidates:
        raise ValueError("no evaluated grid point inside the window")
    best = max(v for _, v in candidates)
    tied = [c for c in candidates if c[1] >= best - tie_tol]
    tied.sort(key=lambda c: (c[0].get("t", 0.0), c[0].get("v_b", 0.0)))
    return tied[0]


@dataclass(frozen=True)
class SyncResult:
    n: int
    l: int
    branch: str
    v_b: float
    omega_drive: float
    omega_r: float
    omega_nr: float
    t_op: float
    fidelity_rwa: float
    fidelity_oracle: float | None = None
    regime_ratios: tuple[float, float, float] | None = None

    def as_dict(self) -> dict:
        out = {
            "n": self.n,
            "l": self.l,
            "branch": self.branch,
            "v_b": self.v_b,
            "omega_drive": self.omega_drive,
            "omega_r": self.omega_r,
            "omega_nr": self.omega_nr,
            "t_op": self.t_op,
            "fidelity_rwa": self.fidelity_rwa,
            "regime_ratios": None if self.regime_ratios is None else list(self.regime_ratios),
        }
        if self.fidelity_oracle is not None:
            out["fidelity_oracle"] = self.fidelity_oracle
        return out


def _check_sync_params(p: SystemParams) -> None:
    if p.delta_b == 0:
        raise ValueError("synchronisation needs delta_b != 0")
    if p.coupling == 0 or p.eps_b == 0:
        raise ValueError("no synchronisation: J eps_b = 0 makes the Rabi and non-Rabi frequencies equal")


def find_sync(
    p: SystemParams,
    idx: MatchingIndices,
    backend: Backend = Backend.RWA,
    branch: Branch = Branch.PLUS,
    v_a: float = 0.0,
    cfg: IntegrationConfig | None = None,
    regime_threshold: float = 0.2,
) -> SyncResult:
    """Synchronised CNOT operating point for matching indices ``idx``.

    The RWA fidelity is always reported; the oracle fidelity only for the
    oracle backend.
    """
    _check_sync_params(p)
    v_b = vb_cnot(p, idx)
    omega_r, omega_nr = cnot_frequencies(p, idx)
    t_op = operation_times(omega_r, idx.l)[0]
    drive = Drive(v_a=v_a, v_b=v_b, omega=resonant_frequency(p, branch))
    target = GateTarget.CNOT_PLUS if branch is Branch.PLUS else GateTarget.CNOT_MINUS
    f_rwa = fidelity(probability_table_rwa(p, drive, t_op), target).fidelity
    f_oracle = None
    if backend is Backend.ORACLE:
        f_oracle = fidelity(oracle_table(p, drive, t_op, cfg), target).fidelity
    try:
        ratios = regime_check(p, drive, regime_threshold).ratios
    except ValueError:
        ratios = None
    return SyncResult(
        n=idx.n,
        l=idx.l,
        branch=branch.value,
        v_b=v_b,
        omega_drive=drive.omega,
        omega_r=omega_r,
        omega_nr=omega_nr,
        t_op=t_op,
        fidelity_rwa=f_rwa,
        fidelity_oracle=f_oracle,
        regime_ratios=ratios,
    )


def matching_residual(p: SystemParams, idx: MatchingIndices, v_b: float) -> float:
    """Omega_nR(V_B) - k Omega_R(V_B) with k the matching ratio."""
    return non_rabi_frequency(p, v_b) - matching_ratio(idx) * rabi_frequency(p, v_b)


def solve_vb_numeric(p: SystemParams, idx: MatchingIndices, upper: float | None = None) -> float:
    """Bisection root of the matching condition, signed like J eps_b / delta_b."""
    _check_sync_params(p)
    if upper is None:
        upper = 10 * abs(8 * p.coupling * p.eps_b / p.delta_b)
    lower = 0.0
    f_lo = matching_residual(p, idx, lower)
    f_hi = matching_residual(p, idx, upper)
    if not (f_lo > 0 > f_hi):
        raise ValueError(f"no sign change of the matching residual on (0, {upper:g}]")
    root = bisect(lambda v: matching_residual(p, idx, v), lower, upper, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                  maxiter=2000)
    return math.copysign(root, p.coupling * p.eps_b / p.delta_b)
