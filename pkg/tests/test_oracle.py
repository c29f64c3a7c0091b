import math

import numpy as np
import pytest

from qsync import oracle
from qsync.gates import GateTarget, MatchingIndices, fidelity, operation_times, vb_cnot
from qsync.hamiltonian import ControlState, Drive, SystemParams, ZERO_DRIVE, full_hamiltonian, propagator
from qsync.oracle import (
    IntegrationConfig,
    IntegrationError,
    evolve,
    flip_trace,
    oracle_table,
    oracle_tables,
    spectroscopy,
)
from qsync.rwa import Branch, rabi_frequency, resonant_frequencies, resonant_frequency, transition_probability
from qsync.static import InitialAmplitudes, static_frame, static_occupation

P = SystemParams(0.7, 0.0, 1.2, 0.9, 0.15)


def test_undriven_population_matches_static_closed_form():
    init = InitialAmplitudes.from_angle(0.8)
    period = static_frame(P, ControlState.UP).period
    times = np.linspace(0, period, 31)
    trace = evolve(P, ZERO_DRIVE, [init.a, init.b, 0, 0], period, times=times)
    closed = [static_occupation(P, ControlState.UP, init, t) for t in times]
    np.testing.assert_allclose(trace.populations[:, 0], closed, rtol=0, atol=1e-8)


def test_zero_hamiltonian_keeps_state():
    p = SystemParams(0, 0, 0, 0, 0)
    psi0 = np.array([0.5, 0.5j, -0.5, 0.5])
    trace = evolve(p, ZERO_DRIVE, psi0, 10.0, times=np.linspace(0, 10, 5))
    np.testing.assert_allclose(trace.states, np.tile(psi0, (5, 1)), atol=1e-15)


def test_zero_duration_returns_initial_state():
    psi0 = np.array([0, 1, 0, 0], dtype=complex)
    trace = evolve(P, Drive(v_b=0.3, omega=1.0), psi0, 0.0)
    assert trace.times.tolist() == [0.0]
    np.testing.assert_array_equal(trace.states[0], psi0)


def test_rejects_unnormalised_state():
    with pytest.raises(ValueError):
        evolve(P, ZERO_DRIVE, [1, 1, 0, 0], 1.0)


def test_undriven_matches_propagator():
    p = P.replace(delta_a=0.4)
    rng = np.random.default_rng(1)
    psi0 = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi0 /= np.linalg.norm(psi0)
    trace = evolve(p, ZERO_DRIVE, psi0, 12.0)
    expected = propagator(full_hamiltonian(p, ZERO_DRIVE, 0.0), 12.0) @ psi0
    np.testing.assert_allclose(trace.states[-1], expected, rtol=0, atol=1e-8)


def test_block_conservation_under_drive():
    d = Drive(v_a=0.2, v_b=0.4, omega=1.5)
    trace = evolve(P, d, [0.6, 0.8, 0, 0], 40.0, times=np.linspace(0, 40, 21))
    assert np.max(trace.populations[:, 2:]) < 1e-10


def test_delta_a_leaks_between_blocks():
    trace = evolve(P.replace(delta_a=0.3), ZERO_DRIVE, [1, 0, 0, 0], 5.0, times=np.linspace(0, 5, 11))
    assert np.max(trace.populations[:, 2:]) > 1e-3


def test_grid_halving_convergence():
    d = Drive(v_b=0.3, omega=resonant_frequency(P, Branch.PLUS))
    psi0 = np.array([0, 1, 0, 0], dtype=complex)
    coarse = evolve(P, d, psi0, 30.0, IntegrationConfig(max_step_fraction=1 / 50))
    fine = evolve(P, d, psi0, 30.0, IntegrationConfig(max_step_fraction=1 / 100))
    assert fine.steps > coarse.steps
    assert np.max(np.abs(fine.populations[-1] - coarse.populations[-1])) < 1e-8


def test_rotated_populations_sum_to_one():
    d = Drive(v_b=0.3, omega=1.4)
    trace = evolve(P, d, [0, 0, 0.6, 0.8j], 20.0, times=np.linspace(0, 20, 41))
    np.testing.assert_allclose(trace.rotated_populations.sum(axis=1), 1.0, atol=1e-9)
    np.testing.assert_allclose(trace.populations.sum(axis=1), 1.0, atol=1e-9)


def test_norm_drift_error_is_raised():
    d = Drive(v_b=0.3, omega=1.4)
    loose = IntegrationConfig(rtol=1e-3, atol=1e-3, max_step_fraction=1.0, norm_tol=1e-14)
    with pytest.raises(IntegrationError, match="norm drift"):
        evolve(P, d, [1, 0, 0, 0], 50.0, loose)


def test_solver_failure_carries_diagnostics(monkeypatch):
    class Collapsing:
        def __init__(self, fun, t0, y0, t_bound, **kwargs):
            self.t, self.y, self.status, self.step_size = t0, y0, "running", None

        def step(self):
            self.status = "failed"
            self.step_size = 1e-300
            return "Required step size is less than spacing between numbers."

    monkeypatch.setattr(oracle, "DOP853", Collapsing)
    with pytest.raises(IntegrationError, match="integration failed at t=0"):
        evolve(P, ZERO_DRIVE, [1, 0, 0, 0], 1.0)


def test_oracle_table_at_zero_is_identity():
    d = Drive(v_b=0.3, omega=1.4)
    np.testing.assert_allclose(oracle_table(P, d, 0.0).values, np.eye(4), atol=1e-15)


def test_oracle_table_requires_block_diagonal():
    with pytest.raises(ValueError, match="conditional table undefined"):
        oracle_table(P.replace(delta_a=0.1), Drive(v_b=0.3, omega=1.4), 1.0)


def test_undriven_tables_are_distributions():
    for table in oracle_tables(P, ZERO_DRIVE, np.linspace(0, 20, 6)):
        np.testing.assert_allclose(table.values.sum(axis=1), 1.0, atol=1e-9)
        assert table.is_block_diagonal


def test_undriven_oracle_table_is_static_in_rotated_basis():
    # with J = 0 the rotated basis is the eigenbasis of both blocks
    table = oracle_table(P.replace(coupling=0.0), ZERO_DRIVE, 17.0)
    np.testing.assert_allclose(table.values, np.eye(4), atol=1e-9)


def test_flip_trace_agrees_with_rwa_in_regime():
    p = SystemParams(1.0, 0.0, 5.0, 1.0, 0.02)
    d = Drive(v_b=0.4, omega=resonant_frequency(p, Branch.PLUS))
    period = 2 * math.pi / rabi_frequency(p, d.v_b)
    times = np.linspace(0, period, 81)
    flips = flip_trace(p, d, times)
    closed = np.array([[transition_probability(p, d, s, t) for s in ControlState] for t in times])
    assert np.max(np.abs(flips - closed)) < 0.05


def test_synchronised_oracle_fidelity(in_regime_params):
    p = in_regime_params
    v = vb_cnot(p, MatchingIndices(1, 1))
    d = Drive(v_b=v, omega=resonant_frequency(p, Branch.PLUS))
    t_op = operation_times(rabi_frequency(p, v))[0]
    assert fidelity(oracle_table(p, d, t_op), GateTarget.CNOT_PLUS).fidelity >= 0.99


def test_spectroscopy_single_peak_without_coupling():
    p = SystemParams(1.0, 0.0, 2.5, 1.0, 0.0)
    omega0 = math.hypot(2.5, 1.0)
    result = spectroscopy(p, Drive(v_b=0.5), np.linspace(omega0 - 0.3, omega0 + 0.3, 21), samples=120)
    assert len(result.peaks) == 1
    assert result.peaks[0] == pytest.approx(omega0, rel=0.02)


def test_spectroscopy_rejects_empty_range():
    with pytest.raises(ValueError, match="empty"):
        spectroscopy(P, Drive(v_b=0.5), [])


def test_peak_separation_formula():
    p = SystemParams(1.0, 0.0, 2.5, 1.0, 0.045)
    plus, minus = resonant_frequencies(p)
    assert plus - minus == pytest.approx(4 * 0.045 * 2.5 / math.hypot(2.5, 1.0), rel=1e-14)


def test_max_step_uses_fastest_period():
    cfg = IntegrationConfig(max_step_fraction=0.1)
    p = SystemParams(1.0, 0.0, 3.0, 4.0, 0.0)
    assert cfg.max_step(p, Drive(omega=10.0)) == pytest.approx(0.1 * 2 * math.pi / 10.0)
    assert cfg.max_step(p, Drive(omega=1.0)) == pytest.approx(0.1 * 2 * math.pi / 5.0)
    assert cfg.max_step(SystemParams(0, 0, 0, 0, 0), ZERO_DRIVE) == math.inf
