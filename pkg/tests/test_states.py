import numpy as np
import pytest
from hypothesis import given, strategies as st

from randmeas.correlations import correlation_length
from randmeas.ensembles import random_density_matrix, random_local_unitaries
from randmeas.sampling import RngStream, haar_unitaries
from randmeas.states import (
    DensityMatrix,
    StateSpec,
    apply_local_unitaries,
    bell_psi_minus,
    bisep4,
    cluster_linear,
    ghz,
    make_state,
    partial_trace,
    product_zero,
    purity_direct,
    tensor,
    trisep4,
    w_state,
    werner,
)

NAMED_STATES = {
    "product_zero(2)": lambda: product_zero(2),
    "bell": bell_psi_minus,
    "ghz(3)": lambda: ghz(3),
    "ghz(4)": lambda: ghz(4),
    "w(3)": lambda: w_state(3),
    "w(4)": lambda: w_state(4),
    "cluster": cluster_linear,
    "werner(0.577)": lambda: werner(1 / np.sqrt(3)),
    "trisep4": trisep4,
    "bisep4(0.2)": bisep4,
}


def test_product_zero_is_basis_projector():
    rho = product_zero(2)
    expected = np.zeros((4, 4))
    expected[0, 0] = 1.0
    np.testing.assert_allclose(rho.matrix, expected, atol=1e-15)


def test_werner_endpoint_is_singlet():
    np.testing.assert_array_equal(werner(1.0).matrix, bell_psi_minus().matrix)


def test_werner_rejects_bad_mixing_parameter():
    with pytest.raises(ValueError, match="p"):
        werner(1.5)


def test_bisep4_marginals():
    phi = 0.2
    rho = bisep4(phi)
    assert abs(purity_direct(rho) - 1.0) < 1e-12
    expected_length = abs(np.cos(phi) ** 2 - np.sin(phi) ** 2)
    for party in (3, 4):
        marginal = partial_trace(rho, (party,))
        bloch_z = np.real(marginal.matrix[0, 0] - marginal.matrix[1, 1])
        bloch_xy = 2.0 * abs(marginal.matrix[0, 1])
        assert abs(np.hypot(bloch_z, bloch_xy) - expected_length) < 1e-12


@pytest.mark.parametrize("name", sorted(NAMED_STATES))
def test_named_states_satisfy_density_matrix_invariants(name):
    rho = NAMED_STATES[name]()
    mat = rho.matrix
    assert np.max(np.abs(mat - mat.conj().T)) <= 1e-10
    assert abs(np.trace(mat) - 1.0) <= 1e-10
    assert np.linalg.eigvalsh(mat)[0] >= -1e-10


def test_make_state_dispatch_matches_builders():
    np.testing.assert_array_equal(
        make_state(StateSpec("ghz", (3,))).matrix, ghz(3).matrix
    )
    np.testing.assert_array_equal(
        make_state(StateSpec("bisep4", (0.3,))).matrix, bisep4(0.3).matrix
    )
    custom = make_state(StateSpec("custom", matrix=np.eye(4) / 4))
    assert custom.n_qubits == 2


def test_make_state_rejects_bad_parameters():
    with pytest.raises(ValueError, match="n"):
        make_state(StateSpec("cluster_linear", (3,)))
    with pytest.raises(ValueError, match="p"):
        make_state(StateSpec("werner", (-0.1,)))
    with pytest.raises(ValueError, match="kind"):
        StateSpec("squeezed")


def test_density_matrix_validation():
    with pytest.raises(ValueError, match="Hermitian"):
        DensityMatrix(1, np.array([[0.5, 0.5], [0.0, 0.5]]))
    with pytest.raises(ValueError, match="trace"):
        DensityMatrix(1, np.eye(2))
    with pytest.raises(ValueError, match="semidefinite"):
        DensityMatrix(1, np.array([[1.5, 0.0], [0.0, -0.5]]))
    with pytest.raises(ValueError, match="MAX_QUBITS"):
        DensityMatrix(9, np.eye(2**9) / 2**9)


def test_tensor_basics():
    zero = product_zero(1)
    np.testing.assert_array_equal(tensor(zero, zero).matrix, product_zero(2).matrix)
    mixed = DensityMatrix(1, np.eye(2) / 2)
    np.testing.assert_allclose(tensor(mixed, mixed).matrix, np.eye(4) / 4, atol=1e-15)


@given(st.integers(min_value=0, max_value=2**31))
def test_tensor_purity_is_multiplicative(seed):
    rng = np.random.default_rng(seed)
    a = random_density_matrix(1, rng)
    b = random_density_matrix(2, rng)
    product = tensor(a, b)
    assert abs(
        purity_direct(product) - purity_direct(a) * purity_direct(b)
    ) < 1e-12


def test_partial_trace_ghz_single_qubit_is_maximally_mixed():
    marginal = partial_trace(ghz(4), (1,))
    np.testing.assert_allclose(marginal.matrix, np.eye(2) / 2, atol=1e-12)


def test_partial_trace_product_state():
    marginal = partial_trace(product_zero(2), (2,))
    np.testing.assert_allclose(marginal.matrix, product_zero(1).matrix, atol=1e-15)


def test_partial_trace_w3_pair_marginal():
    # Tracing one qubit of W(3) leaves (2/3)|psi+><psi+| + (1/3)|00><00|.
    marginal = partial_trace(w_state(3), (1, 2))
    psi_plus = np.array([0.0, 1.0, 1.0, 0.0]) / np.sqrt(2.0)
    expected = (2 / 3) * np.outer(psi_plus, psi_plus) + (1 / 3) * product_zero(2).matrix
    np.testing.assert_allclose(marginal.matrix, expected, atol=1e-12)


def test_partial_trace_rejects_empty_and_bad_indices():
    with pytest.raises(ValueError, match="at least one"):
        partial_trace(ghz(3), ())
    with pytest.raises(ValueError, match="outside"):
        partial_trace(ghz(3), (0, 1))


def test_partial_trace_keeping_everything_returns_state():
    rho = ghz(3)
    assert partial_trace(rho, (1, 2, 3)) is rho


@given(st.integers(min_value=0, max_value=2**31))
def test_partial_trace_composes(seed):
    rng = np.random.default_rng(seed)
    rho = random_density_matrix(3, rng)
    two_step = partial_trace(partial_trace(rho, (1, 2)), (1,))
    one_step = partial_trace(rho, (1,))
    np.testing.assert_allclose(two_step.matrix, one_step.matrix, atol=1e-12)


def test_purity_direct_values():
    assert abs(purity_direct(ghz(4)) - 1.0) < 1e-12
    assert abs(purity_direct(DensityMatrix(2, np.eye(4) / 4)) - 0.25) < 1e-15
    p = 1 / np.sqrt(3)
    assert abs(purity_direct(werner(p)) - (p**2 + (1 - p**2) / 4)) < 1e-12
    assert abs(purity_direct(werner(p)) - 0.5) < 1e-12


def test_apply_local_unitaries_identity():
    rho = ghz(3)
    out = apply_local_unitaries(rho, [np.eye(2)] * 3)
    np.testing.assert_array_equal(out.matrix, rho.matrix)


def test_singlet_is_invariant_under_u_tensor_u():
    rho = bell_psi_minus()
    gen = RngStream(11).generator()
    for u in haar_unitaries(gen, 20):
        rotated = apply_local_unitaries(rho, [u, u])
        assert np.max(np.abs(rotated.matrix - rho.matrix)) < 1e-10


def test_random_local_rotations_preserve_product_correlation_length():
    rho = product_zero(2)
    gen = RngStream(12).generator()
    for _ in range(10):
        rotated = apply_local_unitaries(rho, random_local_unitaries(2, gen))
        assert abs(correlation_length(rotated, (1, 2)) - 1.0) < 1e-10


def test_apply_local_unitaries_validation():
    rho = product_zero(2)
    with pytest.raises(ValueError, match="expected 2 unitaries"):
        apply_local_unitaries(rho, [np.eye(2)])
    with pytest.raises(ValueError, match="deviates from unitarity"):
        apply_local_unitaries(rho, [np.eye(2), 1.1 * np.eye(2)])


def test_purity_is_lu_invariant_over_100_frames():
    rho = werner(0.6)
    base = purity_direct(rho)
    gen = RngStream(13).generator()
    for _ in range(100):
        rotated = apply_local_unitaries(rho, random_local_unitaries(2, gen))
        assert abs(purity_direct(rotated) - base) < 1e-10
