"""Conditional quantum oscillations and frequency synchronization in coupled qubits."""
from .gates import (
    FidelityReport,
    GateTarget,
    MatchingIndices,
    ProbabilityTable,
    cnot_frequencies,
    cu_suppression,
    cu_truth_table,
    fidelity,
    matching_ratio,
    operation_times,
    probability_table_rwa,
    vb_cnot,
)
from .hamiltonian import (
    ControlState,
    Drive,
    SystemParams,
    conditional_hamiltonian,
    full_hamiltonian,
    kron,
    pauli,
    propagator,
)
from .oracle import IntegrationConfig, IntegrationError, evolve, oracle_table, spectroscopy
from .rwa import (
    Branch,
    conditional_frequency,
    effective_hamiltonian,
    non_rabi_angle,
    regime_check,
    resonant_frequencies,
    rwa_context,
    transition_probability,
)
from .static import ConditionalFrame, InitialAmplitudes, static_cnot_point, static_frame, static_occupation
from .sweep import Axis, Backend, DriveTemplate, Objective, SweepSpec, best_operation_point, find_sync, solve_vb_numeric, sweep

__version__ = "0.1.0"
