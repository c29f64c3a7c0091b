import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from qsync.hamiltonian import (
    ControlState,
    Drive,
    SystemParams,
    ZERO_DRIVE,
    conditional_hamiltonian,
    eigenvalues,
    full_hamiltonian,
    is_unitary,
    kron,
    pauli,
    propagator,
    rotation,
)

finite = st.floats(-5, 5, allow_nan=False)
params_st = st.builds(SystemParams, finite, finite, finite, finite, finite)
drive_st = st.builds(Drive, finite, finite, st.floats(0, 10))
control_st = st.sampled_from(list(ControlState))


def taylor_expm(a, order=12):
    """exp(a) by scaling and squaring a truncated Taylor series."""
    norm = np.max(np.sum(np.abs(a), axis=1))
    k = max(0, int(math.ceil(math.log2(norm))) + 4) if norm > 0 else 0
    a = a / 2**k
    term = np.eye(a.shape[0], dtype=complex)
    out = term.copy()
    for j in range(1, order + 1):
        term = term @ a / j
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


def test_pauli_matrices():
    np.testing.assert_array_equal(pauli("z"), [[1, 0], [0, -1]])
    np.testing.assert_array_equal(pauli("x"), [[0, 1], [1, 0]])
    np.testing.assert_array_equal(pauli("id"), np.eye(2))
    np.testing.assert_array_equal(pauli("y"), [[0, -1j], [1j, 0]])
    with pytest.raises(ValueError):
        pauli("w")


def test_kron_products():
    np.testing.assert_array_equal(kron(pauli("id"), pauli("id")), np.eye(4))
    np.testing.assert_array_equal(kron(pauli("z"), pauli("z")), np.diag([1, -1, -1, 1]))
    expected = np.zeros((4, 4))
    expected[:2, :2] = [[0, 1], [1, 0]]
    expected[2:, 2:] = [[0, -1], [-1, 0]]
    np.testing.assert_array_equal(kron(pauli("z"), pauli("x")), expected)


def test_full_hamiltonian_example(example_params):
    h = full_hamiltonian(example_params, ZERO_DRIVE, 0.0)
    np.testing.assert_allclose(h[:2, :2], [[2, -0.25], [-0.25, 0]], atol=1e-15)
    np.testing.assert_allclose(h[2:, 2:], [[-1, -0.25], [-0.25, -1]], atol=1e-15)
    assert not np.any(h[:2, 2:]) and not np.any(h[2:, :2])


def test_delta_a_couples_blocks(example_params):
    h = full_hamiltonian(example_params.replace(delta_a=0.3), ZERO_DRIVE, 0.0)
    assert h[0, 2] == pytest.approx(-0.15)
    assert h[1, 3] == pytest.approx(-0.15)


def test_conditional_examples(example_params):
    up = conditional_hamiltonian(example_params, ZERO_DRIVE, ControlState.UP, 0.0)
    down = conditional_hamiltonian(example_params, ZERO_DRIVE, ControlState.DOWN, 0.0)
    np.testing.assert_allclose(up, [[2, -0.25], [-0.25, 0]], atol=1e-15)
    np.testing.assert_allclose(down, [[-1, -0.25], [-0.25, -1]], atol=1e-15)


def test_uncoupled_blocks_differ_by_identity_sign(example_params):
    p = example_params.replace(coupling=0.0)
    up = conditional_hamiltonian(p, ZERO_DRIVE, ControlState.UP, 0.0)
    down = conditional_hamiltonian(p, ZERO_DRIVE, ControlState.DOWN, 0.0)
    np.testing.assert_allclose(up - down, p.eps_a * np.eye(2), atol=1e-15)


def test_undriven_hamiltonian_is_static(example_params):
    np.testing.assert_array_equal(
        full_hamiltonian(example_params, ZERO_DRIVE, 0.0), full_hamiltonian(example_params, ZERO_DRIVE, 3.7)
    )


def test_params_reject_nonfinite():
    with pytest.raises(ValueError):
        SystemParams(math.nan, 0, 1, 1, 0)
    with pytest.raises(ValueError):
        Drive(omega=-1.0)


@settings(max_examples=200, deadline=None)
@given(params_st, drive_st, st.floats(0, 50), control_st)
def test_hamiltonians_hermitian(p, d, t, s):
    for h in (full_hamiltonian(p, d, t), conditional_hamiltonian(p, d, s, t)):
        scale = max(np.max(np.abs(h)), 1e-300)
        assert np.max(np.abs(h - h.conj().T)) <= 1e-14 * scale


@settings(max_examples=200, deadline=None)
@given(params_st, drive_st, st.floats(0, 50))
def test_block_consistency(p, d, t):
    p = p.replace(delta_a=0.0)
    h = full_hamiltonian(p, d, t)
    # same terms summed in a different order: equal up to a few ulps of the largest entry
    atol = 4 * np.finfo(float).eps * max(np.max(np.abs(h)), 1.0)
    np.testing.assert_allclose(h[:2, :2], conditional_hamiltonian(p, d, ControlState.UP, t), rtol=0, atol=atol)
    np.testing.assert_allclose(h[2:, 2:], conditional_hamiltonian(p, d, ControlState.DOWN, t), rtol=0, atol=atol)


def test_propagator_identity_at_zero(example_params):
    np.testing.assert_array_equal(propagator(full_hamiltonian(example_params, ZERO_DRIVE, 0), 0.0), np.eye(4))


def test_propagator_spin_flip():
    u = propagator(0.5 * pauli("x"), math.pi)
    np.testing.assert_allclose(u, -1j * pauli("x"), atol=1e-15)


def test_propagator_matches_taylor_oracle():
    rng = np.random.default_rng(7)
    for n in (2, 4):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = 0.5 * (a + a.conj().T)
        expected = taylor_expm(-1j * h * 1.7)
        np.testing.assert_allclose(propagator(h, 1.7), expected, rtol=0, atol=1e-10)
        np.testing.assert_allclose(propagator(h, 1.7), scipy.linalg.expm(-1j * h * 1.7), rtol=0, atol=1e-12)


def test_propagator_rejects_non_hermitian():
    with pytest.raises(ValueError):
        propagator(np.array([[0, 1], [0, 0]], dtype=complex), 1.0)


@settings(max_examples=100, deadline=None)
@given(params_st, st.floats(-20, 20), st.floats(-20, 20))
def test_propagator_group_and_unitarity(p, t1, t2):
    h = full_hamiltonian(p, ZERO_DRIVE, 0.0)
    u1, u2 = propagator(h, t1), propagator(h, t2)
    assert is_unitary(u1)
    np.testing.assert_allclose(u1 @ u2, propagator(h, t1 + t2), rtol=0, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(params_st)
def test_conditional_eigenvalues(p):
    up = eigenvalues(conditional_hamiltonian(p, ZERO_DRIVE, ControlState.UP, 0))
    down = eigenvalues(conditional_hamiltonian(p, ZERO_DRIVE, ControlState.DOWN, 0))
    r_up = math.sqrt((p.eps_b + 2 * p.coupling) ** 2 + p.delta_b**2)
    r_down = math.sqrt((p.eps_b - 2 * p.coupling) ** 2 + p.delta_b**2)
    np.testing.assert_allclose(up, sorted([0.5 * (p.eps_a - r_up), 0.5 * (p.eps_a + r_up)]), rtol=0, atol=1e-12)
    np.testing.assert_allclose(down, sorted([-0.5 * (p.eps_a + r_down), -0.5 * (p.eps_a - r_down)]),
                               rtol=0, atol=1e-12)


@pytest.mark.parametrize("eps,delta", [(1.0, 0.5), (-0.7, 0.3), (0.0, 1.0), (0.4, -1.2)])
def test_rotation_diagonalises_qubit(eps, delta):
    u = rotation(math.atan2(delta, eps))
    h = 0.5 * (eps * pauli("z") - delta * pauli("x"))
    np.testing.assert_allclose(u @ h @ u.conj().T, 0.5 * math.hypot(eps, delta) * pauli("z"), atol=1e-15)
