"""Closed-form qubit results used as oracles by the tests."""
import numpy as np

from slowdrive.theory import superop


def occupation(omega, beta):
    return 1.0 / np.expm1(beta * omega)


def random_hermitian(rng, d, scale=1.0):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (a + a.conj().T) / 2


def random_density_matrix(rng, d):
    return superop.random_density_matrix(rng, d)


def gibbs_state(hamiltonian, beta):
    energies, vectors = np.linalg.eigh(hamiltonian)
    weights = np.exp(-beta * (energies - energies[0]))
    weights /= weights.sum()
    return np.dot(vectors * weights, vectors.conj().T)


# Driven thermal qubit, H_I = (delta / 2) sigma_x, decay rate gamma and mean
# occupation n. Vectorization is row-major: [rho11, rho12, rho21, rho22].

def driven_qubit_liouvillian(gamma, n, delta):
    a = 1j * delta / 2
    c = -gamma * (1 + 2 * n) / 2
    return np.array([
        [-gamma * (n + 1), a, -a, gamma * n],
        [a, c, 0, -a],
        [-a, 0, c, a],
        [gamma * (n + 1), -a, a, -gamma * n],
    ], dtype=complex)


def _norm2(n, d):
    return 1.0 / ((1 + 2 * n) ** 2 + 2 * d * d)


def driven_qubit_steady_state(gamma, n, delta):
    d = delta / gamma
    z2 = _norm2(n, d)
    return z2 * np.array([
        [n * (1 + 2 * n) + d * d, -1j * d],
        [1j * d, (1 + n) * (1 + 2 * n) + d * d],
    ])


def driven_qubit_projected_inverse(gamma, n, delta):
    """Matrix of (L P)^{-1} in the row-major basis."""
    d = delta / gamma
    z2 = _norm2(n, d)
    k = 1 + 2 * n
    diag = -4 * (1.0 / z2 - d * d) / k
    off = -4 * d * d / k
    m = np.array([
        [-k, -2j * d, 2j * d, k],
        [-2j * d, diag, off, 2j * d],
        [2j * d, off, diag, -2j * d],
        [k, 2j * d, -2j * d, -k],
    ], dtype=complex)
    return z2 / (2 * gamma) * m


# Qubit isotherm with splitting omega(t'), Gibbs Bloch coordinate
# z = -tanh(beta omega / 2) and rho_j = (1/2) [(z / gamma) d/dt']^j z sigma_z.

def isotherm_bloch(omega, omega_dot, omega_ddot, beta):
    """(z, dz/dt', d2z/dt'2)."""
    u = beta * omega / 2
    sech2 = 1.0 / np.cosh(u) ** 2
    z = -np.tanh(u)
    z_dot = -beta / 2 * sech2 * omega_dot
    z_ddot = -beta / 2 * (sech2 * omega_ddot -
                          beta * sech2 * np.tanh(u) * omega_dot ** 2)
    return z, z_dot, z_ddot


def isotherm_first_term(omega, omega_dot, omega_ddot, beta, gamma0, alpha):
    """Coefficient c of rho_1 = c sigma_z / 2."""
    z, z_dot, _ = isotherm_bloch(omega, omega_dot, omega_ddot, beta)
    return z * z_dot / (gamma0 * omega ** alpha)


def isotherm_first_term_rate(omega, omega_dot, omega_ddot, beta, gamma0,
                             alpha):
    """d/dt' of isotherm_first_term."""
    z, z_dot, z_ddot = isotherm_bloch(omega, omega_dot, omega_ddot, beta)
    gamma = gamma0 * omega ** alpha
    gamma_dot = alpha * gamma0 * omega ** (alpha - 1) * omega_dot
    return (z_dot ** 2 + z * z_ddot) / gamma - z * z_dot * gamma_dot / gamma ** 2


def isotherm_second_term(omega, omega_dot, omega_ddot, beta, gamma0, alpha):
    """Coefficient c of rho_2 = c sigma_z / 2."""
    z, _, _ = isotherm_bloch(omega, omega_dot, omega_ddot, beta)
    return z / (gamma0 * omega ** alpha) * isotherm_first_term_rate(
        omega, omega_dot, omega_ddot, beta, gamma0, alpha)


def isotherm_first_heat_rate(omega, omega_dot, omega_ddot, beta, gamma0,
                             alpha):
    """Integrand tr[H d rho_1 / dt'] of the first-order heat."""
    return omega / 2 * isotherm_first_term_rate(omega, omega_dot, omega_ddot,
                                                beta, gamma0, alpha)


def cosine_ramp_path(omega0, start, end):
    """(omega, omega_dot, omega_ddot) callables of the cosine ramp."""
    amp = omega0 * (end - start) / 2
    return (lambda t: omega0 * start + amp * (1 - np.cos(np.pi * t)),
            lambda t: amp * np.pi * np.sin(np.pi * t),
            lambda t: amp * np.pi ** 2 * np.cos(np.pi * t))


def cosine_expansion_path(omega0):
    return (lambda t: omega0 * (np.cos(np.pi * t) + 1),
            lambda t: -np.pi * omega0 * np.sin(np.pi * t),
            lambda t: -np.pi ** 2 * omega0 * np.cos(np.pi * t))
