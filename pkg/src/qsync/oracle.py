"""Exact time-dependent integration of the driven two-qubit system.

This is the brute-force reference for every closed form in the package: it
integrates i d/dt psi = H(t) psi with the full 4x4 Hamiltonian, without
dropping any term.  The integrator is an adaptive explicit Runge-Kutta method
(Dormand-Prince 8(5,3)); every output time is hit by a step boundary, and the
state norm is monitored but never renormalised.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import DOP853
from scipy.signal import find_peaks

from .gates import ProbabilityTable
from .hamiltonian import Drive, SystemParams, drive_operator, rotation, static_hamiltonian
from .rwa import bare_splitting, rabi_frequency


class IntegrationError(RuntimeError):
    """The integrator failed or the state norm drifted past tolerance."""


@dataclass(frozen=True)
class IntegrationConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step_fraction: float = 1 / 50
    grid_spacing: float | None = None
    norm_tol: float = 1e-9

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0 and self.max_step_fraction > 0 and self.norm_tol > 0):
            raise ValueError("tolerances and step fraction must be positive")
        if self.grid_spacing is not None and not self.grid_spacing > 0:
            raise ValueError("grid_spacing must be positive")

    def max_step(self, p: SystemParams, d: Drive) -> float:
        """Fraction of the fastest of the drive period and qubit-B Larmor period."""
        periods = [math.inf]
        if d.omega > 0:
            periods.append(2 * math.pi / d.omega)
        omega0 = bare_splitting(p)
        if omega0 > 0:
            periods.append(2 * math.pi / omega0)
        return min(periods) * self.max_step_fraction


@dataclass(frozen=True, eq=False)
class EvolutionTrace:
    """States on the output grid plus populations in the lab and rotated bases.

    ``populations`` index the lab basis {|uu>, |ud>, |du>, |dd>};
    ``rotated_populations`` index {|u0>, |u1>, |d0>, |d1>} where |0>, |1> are
    the eigenstates of qubit B's bare Hamiltonian.
    """

    times: np.ndarray
    states: np.ndarray
    populations: np.ndarray
    rotated_populations: np.ndarray
    norm_drift: float
    steps: int


def qubit_b_basis_change(p: SystemParams) -> np.ndarray:
    """4x4 map from lab amplitudes to rotated-basis amplitudes."""
    eta0 = math.atan2(p.delta_b, p.eps_b)
    return np.kron(np.eye(2), rotation(eta0))


def time_grid(t_final: float, cfg: IntegrationConfig, points: int | None = None) -> np.ndarray:
    if points is not None:
        return np.linspace(0.0, t_final, points)
    if cfg.grid_spacing is None or t_final == 0:
        return np.array([0.0, t_final]) if t_final > 0 else np.array([0.0])
    count = max(int(math.ceil(t_final / cfg.grid_spacing)), 1)
    return np.linspace(0.0, t_final, count + 1)


def _integrate(p: SystemParams, d: Drive, y0: np.ndarray, times: np.ndarray, cfg: IntegrationConfig):
    """Propagate the columns of ``y0`` (4 x k) and return states (len(times), 4, k)."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("time grid must be a non-empty 1-D array")
    if times[0] < 0 or np.any(np.diff(times) < 0):
        raise ValueError("time grid must be non-negative and ascending")
    h0 = static_hamiltonian(p)
    hd = drive_operator(d)
    omega = d.omega
    width = y0.shape[1]
    driven = bool(np.any(hd))

    def rhs(t, y):
        h = h0 + math.cos(omega * t) * hd if driven else h0
        return (-1j * (h @ y.reshape(4, width))).ravel()

    max_step = cfg.max_step(p, d)
    norms0 = np.linalg.norm(y0, axis=0)
    out = np.empty((times.size, 4, width), dtype=complex)
    y = np.array(y0, dtype=complex).ravel()
    t = 0.0
    h_prev = None
    steps = 0
    drift = 0.0
    for i, target in enumerate(times):
        if target > t:
            first = None if h_prev is None else min(h_prev, target - t)
            solver = DOP853(rhs, t, y, target, max_step=max_step, rtol=cfg.rtol, atol=cfg.atol, first_step=first)
            while solver.status == "running":
                message = solver.step()
                steps += 1
                if solver.status == "failed":
                    raise IntegrationError(
                        f"integration failed at t={solver.t:.6g} (target {target:.6g}, "
                        f"last step {solver.step_size}): {message}"
                    )
                if solver.step_size is not None and solver.t < target:
                    h_prev = solver.step_size
            y = solver.y
            t = target
        state = y.reshape(4, width)
        drift = max(drift, float(np.max(np.abs(np.linalg.norm(state, axis=0) - norms0))))
        if drift > cfg.norm_tol:
            raise IntegrationError(f"norm drift {drift:.3e} exceeds {cfg.norm_tol:.1e} at t={t:.6g}")
        out[i] = state
    return out, drift, steps


def evolve(p: SystemParams, d: Drive, psi0, t_final: float, cfg: IntegrationConfig | None = None,
           times=None) -> EvolutionTrace:
    """Integrate ``psi0`` from 0 to ``t_final`` under the full driven Hamiltonian.

    ``times`` overrides the output grid (it must start at 0 and end at t_final).
    """
    cfg = cfg or IntegrationConfig()
    psi0 = np.asarray(psi0, dtype=complex).reshape(4)
    if abs(np.linalg.norm(psi0) - 1) > cfg.norm_tol:
        raise ValueError("initial state must be normalised")
    if t_final < 0:
        raise ValueError("t_final must be >= 0")
    grid = time_grid(t_final, cfg) if times is None else np.asarray(times, dtype=float)
    states, drift, steps = _integrate(p, d, psi0[:, None], grid, cfg)
    states = states[:, :, 0]
    rotated = states @ qubit_b_basis_change(p).T
    return EvolutionTrace(
        times=grid,
        states=states,
        populations=np.abs(states) ** 2,
        rotated_populations=np.abs(rotated) ** 2,
        norm_drift=drift,
        steps=steps,
    )


def _rotated_inputs(p: SystemParams) -> np.ndarray:
    """Lab-basis columns for the inputs |u0>, |u1>, |d0>, |d1>."""
    return qubit_b_basis_change(p).conj().T


def oracle_tables(p: SystemParams, d: Drive, times, cfg: IntegrationConfig | None = None) -> list[ProbabilityTable]:
    """Probability tables on an ascending time grid from one batched integration."""
    cfg = cfg or IntegrationConfig()
    if p.delta_a != 0:
        raise ValueError("conditional table undefined for delta_a != 0")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    basis = qubit_b_basis_change(p)
    states, _, _ = _integrate(p, d, _rotated_inputs(p), times, cfg)
    tables = []
    for state in states:
        # column k is the evolved input k; row j its amplitude on output j
        probs = np.abs(basis @ state) ** 2
        tables.append(ProbabilityTable(probs.T))
    return tables


def oracle_table(p: SystemParams, d: Drive, t: float, cfg: IntegrationConfig | None = None) -> ProbabilityTable:
    return oracle_tables(p, d, [t], cfg)[0]


def flip_trace(p: SystemParams, d: Drive, times, cfg: IntegrationConfig | None = None) -> np.ndarray:
    """P(|s1> <- |s0>) for s = up, down on ``times``; shape (len(times), 2)."""
    cfg = cfg or IntegrationConfig()
    if p.delta_a != 0:
        raise ValueError("conditional flip probabilities undefined for delta_a != 0")
    times = np.asarray(times, dtype=float)
    inputs = _rotated_inputs(p)[:, [0, 2]]
    states, _, _ = _integrate(p, d, inputs, times, cfg)
    rotated = np.einsum("ij,tjk->tik", qubit_b_basis_change(p), states)
    return np.stack([np.abs(rotated[:, 1, 0]) ** 2, np.abs(rotated[:, 3, 1]) ** 2], axis=1)


@dataclass(frozen=True, eq=False)
class SpectroscopyResult:
    omegas: np.ndarray
    response: np.ndarray
    peaks: np.ndarray
    peak_heights: np.ndarray
    window: float


def _peak_response(args) -> float:
    p, d, window, samples, cfg = args
    times = np.linspace(0.0, window, samples)
    return float(np.max(flip_trace(p, d, times, cfg)))


def _refine(omegas, response, i) -> float:
    """Parabolic interpolation of a sampled maximum."""
    if i == 0 or i == len(omegas) - 1:
        return float(omegas[i])
    y0, y1, y2 = response[i - 1 : i + 2]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return float(omegas[i])
    offset = 0.5 * (y0 - y2) / denom
    return float(omegas[i] + offset * (omegas[i + 1] - omegas[i]))


def spectroscopy(
    p: SystemParams,
    template: Drive,
    omegas,
    cfg: IntegrationConfig | None = None,
    samples: int = 200,
    prominence: float = 0.1,
    n_jobs: int = 1,
) -> SpectroscopyResult:
    """Sweep the drive frequency and locate transition-probability peaks.

    For each frequency the largest flip probability of either control
    branch over one nominal Rabi period 2 pi / Omega_R is recorded.
    """
    cfg = cfg or IntegrationConfig()
    omegas = np.asarray(omegas, dtype=float)
    if omegas.size == 0:
        raise ValueError("empty frequency range")
    if not np.all(np.isfinite(omegas)) or np.any(omegas <= 0):
        raise ValueError("drive frequencies must be finite and positive")
    omega_r = rabi_frequency(p, template.v_b)
    if omega_r == 0:
        raise ValueError("template drive has no Rabi frequency (v_b or delta_b is zero)")
    window = 2 * math.pi / omega_r
    jobs = [(p, template.replace(omega=float(w)), window, samples, cfg) for w in omegas]
    if n_jobs == 1:
        response = np.array([_peak_response(job) for job in jobs])
    else:
        with ProcessPoolExecutor(max_workers=n_jobs if n_jobs > 0 else None) as pool:
            response = np.array(list(pool.map(_peak_response, jobs)))
    index, _ = find_peaks(response, prominence=prominence)
    peaks = np.array([_refine(omegas, response, i) for i in index])
    return SpectroscopyResult(omegas, response, peaks, response[index], window)
