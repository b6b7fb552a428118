import numpy as np
import pytest
from numpy.testing import assert_allclose

from slowdrive.tests import fixtures
from slowdrive.theory import DimensionError
from slowdrive.theory import DissipationlessCouplingError
from slowdrive.theory import InvalidParameterError
from slowdrive.theory import InvariantError
from slowdrive.theory import NotHermitianError
from slowdrive.theory import ThermalOccupationError
from slowdrive.theory import superop
from slowdrive.theory.superop import BathSpec
from slowdrive.theory.superop import SIGMA_MINUS
from slowdrive.theory.superop import SIGMA_PLUS
from slowdrive.theory.superop import SIGMA_X
from slowdrive.theory.superop import SIGMA_Y
from slowdrive.theory.superop import SIGMA_Z


def qubit_hamiltonian(omega):
    return omega / 2 * SIGMA_Z


def test_vectorize_is_row_major():
    op = np.array([[1, 2], [3, 4]], dtype=complex)
    assert_allclose(superop.vectorize(op), [1, 2, 3, 4])
    assert_allclose(superop.vectorize(np.eye(2) / 2), [0.5, 0, 0, 0.5])


def test_unvectorize_inverts_vectorize():
    rng = np.random.default_rng(1)
    op = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert_allclose(superop.unvectorize(superop.vectorize(op)), op)


def test_left_and_right_multiplication():
    rng = np.random.default_rng(2)
    a, b, x = [rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
               for _ in range(3)]
    assert_allclose(superop.apply_super(superop.left_super(a), x),
                    np.dot(a, x), atol=1e-12)
    assert_allclose(superop.apply_super(superop.right_super(b), x),
                    np.dot(x, b), atol=1e-12)


def test_vectorize_rejects_non_square():
    with pytest.raises(DimensionError):
        superop.vectorize(np.zeros((2, 3)))
    with pytest.raises(DimensionError):
        superop.unvectorize(np.zeros(5))


def test_hamiltonian_super_commutator():
    image = superop.apply_super(superop.hamiltonian_super(SIGMA_Z), SIGMA_X)
    assert_allclose(image, 2 * SIGMA_Y, atol=1e-15)


def test_hamiltonian_super_of_identity_vanishes():
    assert_allclose(superop.hamiltonian_super(np.eye(3)), 0)


def test_hamiltonian_super_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        superop.hamiltonian_super(SIGMA_MINUS)


def test_dissipator_of_identity_vanishes():
    assert_allclose(superop.dissipator_super(np.eye(2)), 0, atol=1e-15)


def test_dissipator_annihilates_trace():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    leak = np.dot(superop.trace_functional(3), superop.dissipator_super(x))
    assert_allclose(leak, 0, atol=1e-12)


def test_qubit_dissipators_match_closed_form():
    gamma, n = 0.7, 0.3
    liouvillian = (gamma * (n + 1) * superop.dissipator_super(SIGMA_MINUS) +
                   gamma * n * superop.dissipator_super(SIGMA_PLUS))
    assert_allclose(liouvillian,
                    fixtures.driven_qubit_liouvillian(gamma, n, 0.0),
                    atol=1e-15)


def test_drive_plus_dissipators_match_closed_form():
    gamma, n, delta = 1.3, 0.5, 0.8
    liouvillian = (delta * superop.hamiltonian_super(SIGMA_X / 2) +
                   gamma * (n + 1) * superop.dissipator_super(SIGMA_MINUS) +
                   gamma * n * superop.dissipator_super(SIGMA_PLUS))
    assert_allclose(liouvillian,
                    fixtures.driven_qubit_liouvillian(gamma, n, delta),
                    atol=1e-15)


def test_bose_occupation():
    assert_allclose(superop.bose_occupation(1.0, 1.0), 1 / (np.e - 1))
    assert superop.bose_occupation(1.0, 800.0) == 0.0
    with pytest.raises(ThermalOccupationError):
        superop.bose_occupation(1e-13, 1.0)
    with pytest.raises(ThermalOccupationError):
        superop.bose_occupation(0.0, 1.0)


@pytest.mark.parametrize('beta, gamma0, alpha', [
    (0.0, 1.0, 0.0), (-1.0, 1.0, 0.0), (1.0, 0.0, 0.0), (1.0, -2.0, 1.0),
    (1.0, 1.0, np.nan), (np.inf, 1.0, 0.0)])
def test_bath_rejects_bad_parameters(beta, gamma0, alpha):
    with pytest.raises(InvalidParameterError):
        BathSpec(beta, gamma0, alpha)


def test_bath_rescaled():
    bath = BathSpec(2.0, 0.5, 1.0)
    scaled = bath.rescaled(0.25)
    assert scaled.beta == 8.0
    assert scaled.gamma0 == 0.5
    assert bath.temperature == 0.5


def test_eigenoperators_of_sigma_x():
    parts = superop.eigenoperator_decomposition(qubit_hamiltonian(1.5),
                                                SIGMA_X)
    omegas = [omega for omega, _ in parts]
    assert_allclose(omegas, [-1.5, 0.0, 1.5])
    assert_allclose(parts[0][1], SIGMA_PLUS, atol=1e-14)
    assert_allclose(parts[1][1], 0, atol=1e-14)
    assert_allclose(parts[2][1], SIGMA_MINUS, atol=1e-14)


def test_eigenoperators_of_identity_coupling():
    parts = superop.eigenoperator_decomposition(qubit_hamiltonian(1.0),
                                                np.eye(2))
    assert len(parts) == 1
    assert parts[0][0] == 0.0
    assert_allclose(parts[0][1], np.eye(2), atol=1e-14)


def test_eigenoperators_of_zero_hamiltonian():
    parts = superop.eigenoperator_decomposition(np.zeros((2, 2)), SIGMA_X)
    assert len(parts) == 1
    assert parts[0][0] == 0.0
    assert_allclose(parts[0][1], SIGMA_X, atol=1e-14)


def test_eigenoperators_reject_non_hermitian_coupling():
    with pytest.raises(NotHermitianError):
        superop.eigenoperator_decomposition(qubit_hamiltonian(1.0),
                                            SIGMA_MINUS)


@pytest.mark.parametrize('d, seed', [(2, 10), (3, 11), (4, 12), (3, 13)])
def test_eigenoperators_complete_and_conjugate(d, seed):
    rng = np.random.default_rng(seed)
    hamiltonian = fixtures.random_hermitian(rng, d)
    coupling = fixtures.random_hermitian(rng, d)
    parts = superop.eigenoperator_decomposition(hamiltonian, coupling)
    total = sum(component for _, component in parts)
    assert_allclose(total, coupling, atol=1e-12)
    by_omega = dict(parts)
    for omega, component in parts:
        # [H, A(omega)] = -omega A(omega)
        commutator = np.dot(hamiltonian, component) - \
            np.dot(component, hamiltonian)
        assert_allclose(commutator, -omega * component, atol=1e-10)
        if omega != 0:
            assert_allclose(by_omega[-omega], superop.dagger(component),
                            atol=1e-12)


def test_thermal_liouvillian_of_qubit():
    bath = BathSpec(1.0, 0.8, 1.0)
    omega = 1.5
    gamma = 0.8 * omega
    n = fixtures.occupation(omega, 1.0)
    liouvillian = superop.thermal_liouvillian(qubit_hamiltonian(omega),
                                              SIGMA_X, bath)
    assert_allclose(liouvillian,
                    fixtures.driven_qubit_liouvillian(gamma, n, 0.0),
                    atol=1e-14)
    gibbs = np.diag([n, 1 + n]) / (1 + 2 * n)
    assert_allclose(superop.apply_super(liouvillian, gibbs), 0, atol=1e-14)


def test_thermal_liouvillian_sums_channels():
    rng = np.random.default_rng(20)
    hamiltonian = fixtures.random_hermitian(rng, 3)
    first = fixtures.random_hermitian(rng, 3)
    second = fixtures.random_hermitian(rng, 3)
    bath = BathSpec(0.7, 1.0, 1.0)
    combined = superop.thermal_liouvillian(hamiltonian, [first, second], bath)
    assert_allclose(combined,
                    superop.thermal_liouvillian(hamiltonian, first, bath) +
                    superop.thermal_liouvillian(hamiltonian, second, bath),
                    atol=1e-12)


def test_thermal_liouvillian_takes_nested_lists():
    bath = BathSpec(1.0, 0.8, 1.0)
    hamiltonian = qubit_hamiltonian(1.5)
    expected = superop.thermal_liouvillian(hamiltonian, SIGMA_X, bath)
    assert_allclose(superop.thermal_liouvillian(hamiltonian, [[0, 1], [1, 0]],
                                                bath), expected)
    assert_allclose(superop.thermal_liouvillian(hamiltonian,
                                                [[[0, 1], [1, 0]]], bath),
                    expected)


def test_dissipationless_coupling():
    with pytest.raises(DissipationlessCouplingError):
        superop.thermal_liouvillian(qubit_hamiltonian(1.0), SIGMA_Z,
                                    BathSpec(1.0, 1.0))


@pytest.mark.parametrize('d, seed', [(2, 30), (3, 31), (3, 32), (4, 33)])
@pytest.mark.parametrize('alpha', [0.0, 1.0, 2.0])
@pytest.mark.parametrize('lam', [0.5, 2.0])
def test_thermal_liouvillian_scaling_law(d, seed, alpha, lam):
    rng = np.random.default_rng(seed)
    hamiltonian = fixtures.random_hermitian(rng, d)
    coupling = fixtures.random_hermitian(rng, d)
    bath = BathSpec(0.9, 1.2, alpha)
    base = superop.thermal_liouvillian(hamiltonian, coupling, bath)
    scaled = superop.thermal_liouvillian(lam * hamiltonian, coupling,
                                         bath.rescaled(lam))
    assert_allclose(scaled, lam ** alpha * base, rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize('d, seed', [(2, 40), (3, 41), (4, 42)])
def test_gibbs_state_is_fixed_point(d, seed):
    rng = np.random.default_rng(seed)
    hamiltonian = fixtures.random_hermitian(rng, d)
    coupling = fixtures.random_hermitian(rng, d)
    beta = rng.uniform(0.3, 2.0)
    liouvillian = superop.thermal_liouvillian(
        hamiltonian, coupling, BathSpec(beta, 1.0, rng.choice([0.0, 1.0])))
    superop.check_liouvillian(liouvillian)
    image = superop.apply_super(liouvillian,
                                fixtures.gibbs_state(hamiltonian, beta))
    assert np.max(np.abs(image)) <= 1e-10 * np.max(np.abs(liouvillian))


def test_hermitian_basis_spans_operators():
    basis = superop.hermitian_basis(3)
    assert len(basis) == 9
    for op in basis:
        assert superop.is_hermitian(op)
    stacked = np.array([superop.vectorize(op) for op in basis])
    assert np.linalg.matrix_rank(stacked) == 9


def test_check_liouvillian_rejects_trace_leak():
    with pytest.raises(InvariantError):
        superop.check_liouvillian(-np.eye(4, dtype=complex))


def test_semigroup_keeps_density_matrices():
    rng = np.random.default_rng(50)
    hamiltonian = fixtures.random_hermitian(rng, 3)
    coupling = fixtures.random_hermitian(rng, 3)
    liouvillian = superop.thermal_liouvillian(hamiltonian, coupling,
                                              BathSpec(1.0, 1.0))
    liouvillian = liouvillian + superop.hamiltonian_super(hamiltonian)
    rho = fixtures.random_density_matrix(rng, 3)
    for t in (0.1, 1.0, 5.0):
        evolved = superop.unvectorize(np.dot(superop.semigroup(liouvillian, t),
                                             superop.vectorize(rho)))
        assert superop.is_density_matrix(evolved, tol=1e-10)


def test_density_matrix_predicate():
    assert superop.is_density_matrix(np.eye(2) / 2)
    assert not superop.is_density_matrix(np.eye(2))
    assert not superop.is_density_matrix(np.diag([1.5, -0.5]))
    assert not superop.is_density_matrix(np.array([[0.5, 0.1], [0.2, 0.5]]))


def test_bloch_vector():
    rho = (np.eye(2) + 0.3 * SIGMA_X - 0.2 * SIGMA_Y + 0.5 * SIGMA_Z) / 2
    assert_allclose(superop.bloch_vector(rho), [0.3, -0.2, 0.5])
    assert_allclose(superop.populations(rho), [0.75, 0.25])
