"""Dense operator and superoperator algebra.

Operators are d x d complex numpy arrays. Superoperators are d^2 x d^2 complex
arrays acting on row-major vectorized operators, so for d = 2

    rho -> [rho11, rho12, rho21, rho22]

left multiplication by A is kron(A, I) and right multiplication by B is
kron(I, B^T).
"""
import logging

import numpy as np
import scipy.linalg

from slowdrive import config
from slowdrive.theory import DimensionError
from slowdrive.theory import DissipationlessCouplingError
from slowdrive.theory import InvalidParameterError
from slowdrive.theory import InvariantError
from slowdrive.theory import NotHermitianError
from slowdrive.theory import ThermalOccupationError
from slowdrive.theory.records import Record

logger = logging.getLogger(__name__)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# |2><1|: lowers the excited state |1> (sigma_z = +1).
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)

# Above this beta*omega the occupation underflows to zero.
OCCUPATION_OVERFLOW = 700.0
OCCUPATION_UNDERFLOW = 1e-12


class BathSpec(Record):
    """Thermal bath with spectral density exponent alpha.

    The damping rate at Bohr frequency omega is gamma0 * omega**alpha and the
    mean excitation number is 1 / (exp(beta * omega) - 1).
    """
    FIELDS = ['beta', 'gamma0', 'alpha']

    def __init__(self, beta, gamma0, alpha=0.0):
        beta, gamma0, alpha = float(beta), float(gamma0), float(alpha)
        if not beta > 0 or not np.isfinite(beta):
            raise InvalidParameterError('beta must be positive, got %r' % beta)
        if not gamma0 > 0 or not np.isfinite(gamma0):
            raise InvalidParameterError(
                'gamma0 must be positive, got %r' % gamma0)
        if not np.isfinite(alpha):
            raise InvalidParameterError('alpha must be finite, got %r' % alpha)
        super(BathSpec, self).__init__(beta=beta, gamma0=gamma0, alpha=alpha)

    @property
    def temperature(self):
        return 1.0 / self.beta

    def rate(self, omega):
        return self.gamma0 * omega ** self.alpha

    def occupation(self, omega):
        return bose_occupation(omega, self.beta)

    def rescaled(self, lam):
        """Bath seen by a Hamiltonian scaled by lam at fixed beta * omega."""
        return BathSpec(self.beta / lam, self.gamma0, self.alpha)


def bose_occupation(omega, beta):
    x = beta * omega
    if x > OCCUPATION_OVERFLOW:
        return 0.0
    if x < OCCUPATION_UNDERFLOW:
        raise ThermalOccupationError(
            'occupation diverges: beta*omega = %g below %g' %
            (x, OCCUPATION_UNDERFLOW))
    return 1.0 / np.expm1(x)


def dimension(op):
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DimensionError('expected a square matrix, got shape %s' %
                             (op.shape,))
    return op.shape[0]


def super_dimension(superop):
    n = dimension(superop)
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise DimensionError('superoperator size %d is not a square' % n)
    return d


def dagger(op):
    return np.conj(np.transpose(op))


def is_hermitian(op, tol=None):
    tol = config.HERMITIAN_TOL if tol is None else tol
    op = np.asarray(op)
    scale = max(1.0, np.max(np.abs(op))) if op.size else 1.0
    return np.max(np.abs(op - dagger(op))) <= tol * scale


def is_density_matrix(rho, tol=None, eig_tol=None):
    tol = config.HERMITIAN_TOL if tol is None else tol
    eig_tol = config.DENSITY_EIG_TOL if eig_tol is None else eig_tol
    if not is_hermitian(rho, tol):
        return False
    if abs(np.trace(rho) - 1) > tol:
        return False
    evals = scipy.linalg.eigvalsh(hermitize(rho))
    return evals[0] >= -eig_tol


def check_hermitian(op, name='operator'):
    dimension(op)
    if not is_hermitian(op):
        raise NotHermitianError('%s is not Hermitian (max deviation %g)' %
                                (name, np.max(np.abs(op - dagger(op)))))


def hermitize(op):
    return 0.5 * (op + dagger(op))


def vectorize(op):
    dimension(op)
    return np.array(op, dtype=complex).reshape(-1)


def unvectorize(vec):
    vec = np.asarray(vec)
    d = int(round(np.sqrt(vec.size)))
    if d * d != vec.size:
        raise DimensionError('vector length %d is not a square' % vec.size)
    return vec.reshape(d, d)


def left_super(op):
    d = dimension(op)
    return np.kron(op, np.eye(d))


def right_super(op):
    d = dimension(op)
    return np.kron(np.eye(d), np.transpose(op))


def apply_super(superop, op):
    if super_dimension(superop) != dimension(op):
        raise DimensionError('superoperator acts on d=%d, operator has d=%d' %
                             (super_dimension(superop), dimension(op)))
    return unvectorize(np.dot(superop, vectorize(op)))


def trace_functional(d):
    """Row vector t with t . vectorize(X) = tr X."""
    return vectorize(np.eye(d))


def hamiltonian_super(op):
    """Matrix of rho -> -i [op, rho]."""
    check_hermitian(op, 'Hamiltonian')
    return -1j * (left_super(op) - right_super(op))


def dissipator_super(op):
    """Matrix of rho -> X rho X^+ - (X^+ X rho + rho X^+ X) / 2."""
    op = np.asarray(op, dtype=complex)
    d = dimension(op)
    xdx = np.dot(dagger(op), op)
    return (np.kron(op, np.conj(op)) -
            0.5 * (np.kron(xdx, np.eye(d)) + np.kron(np.eye(d), xdx.T)))


def hermitian_basis(d):
    """d^2 Hermitian matrices spanning all d x d operators."""
    basis = []
    for k in range(d):
        for l in range(d):
            op = np.zeros((d, d), dtype=complex)
            if k == l:
                op[k, k] = 1
            elif k < l:
                op[k, l] = op[l, k] = 1
            else:
                op[k, l] = 1j
                op[l, k] = -1j
            basis.append(op)
    return basis


def random_density_matrix(rng, d):
    """Full-rank state A A^dagger / tr, A with complex Gaussian entries."""
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = np.dot(a, dagger(a))
    return hermitize(rho / np.trace(rho).real)


def check_liouvillian(superop, tol=None):
    """Raises InvariantError unless superop is trace-annihilating and maps
    Hermitian operators to Hermitian operators."""
    tol = config.HERMITIAN_TOL if tol is None else tol
    d = super_dimension(superop)
    scale = max(1.0, np.max(np.abs(superop)))
    leak = np.max(np.abs(np.dot(trace_functional(d), superop)))
    if leak > tol * scale:
        raise InvariantError('Liouvillian does not preserve trace (%g)' % leak)
    for op in hermitian_basis(d):
        image = apply_super(superop, op)
        skew = np.max(np.abs(image - dagger(image)))
        if skew > tol * scale:
            raise InvariantError(
                'Liouvillian does not preserve Hermiticity (%g)' % skew)


def semigroup(superop, t):
    return scipy.linalg.expm(superop * t)


def eigenoperator_decomposition(hamiltonian, coupling, gap_tol=None):
    """Splits coupling into eigenoperators of hamiltonian.

    Bohr frequencies closer than gap_tol are grouped; the default is
    config.BOHR_GAP_RTOL times the spectral range of the Hamiltonian. Groups
    are formed on |omega| so that A(-omega) = A(omega)^+ holds exactly.

    Returns:
      list of (omega, A_omega) sorted by increasing omega. omega = 0 is
      always present; other frequencies only when their component is nonzero.
    """
    check_hermitian(hamiltonian, 'system Hamiltonian')
    check_hermitian(coupling, 'coupling operator')
    if dimension(hamiltonian) != dimension(coupling):
        raise DimensionError('Hamiltonian and coupling differ in dimension')
    energies, vectors = scipy.linalg.eigh(hamiltonian)
    if gap_tol is None:
        spread = energies[-1] - energies[0]
        gap_tol = config.BOHR_GAP_RTOL * spread if spread > 0 else \
            config.BOHR_GAP_RTOL
    # gaps[n, m] = E_m - E_n is the frequency carried by |n><n|A|m><m|.
    gaps = energies[np.newaxis, :] - energies[:, np.newaxis]
    # The diagonal makes the first group the omega = 0 one.
    magnitudes = np.sort(np.abs(gaps).ravel())
    groups = [[magnitudes[0]]]
    for value in magnitudes[1:]:
        if value - groups[-1][-1] <= gap_tol:
            groups[-1].append(value)
        else:
            groups.append([value])

    coupling_eig = np.dot(dagger(vectors), np.dot(coupling, vectors))
    components = []
    for index, group in enumerate(groups):
        lo, hi = group[0] - gap_tol / 2, group[-1] + gap_tol / 2
        in_group = (np.abs(gaps) >= lo) & (np.abs(gaps) <= hi)
        if index == 0:
            components.append((0.0, in_group))
            continue
        center = float(np.mean(group))
        components.append((-center, in_group & (gaps < 0)))
        components.append((center, in_group & (gaps > 0)))

    scale = max(np.max(np.abs(coupling_eig)), 1e-300)
    out = []
    for omega, mask in sorted(components, key=lambda c: c[0]):
        block = np.where(mask, coupling_eig, 0)
        if omega != 0 and np.max(np.abs(block)) <= 1e-14 * scale:
            continue
        out.append((omega, np.dot(vectors, np.dot(block, dagger(vectors)))))
    return out


def thermal_liouvillian(hamiltonian, coupling, bath):
    """GKLS generator of a system weakly coupled to a thermal bath.

    In the interaction picture (no Hamiltonian term):

        sum_{omega > 0} gamma0 omega^alpha [(N + 1) D[A(omega)]
                                            + N D[A(omega)^+]]

    Args:
      hamiltonian: system Hamiltonian H_S.
      coupling: Hermitian coupling operator A, or a sequence of them for a
        system talking to the bath through several channels.
      bath: BathSpec.

    Returns:
      d^2 x d^2 Liouvillian whose fixed point is exp(-beta H_S) / Z.
    """
    if np.ndim(coupling) == 2:
        couplings = [np.asarray(coupling)]
    else:
        couplings = [np.asarray(op) for op in coupling]
    d = dimension(hamiltonian)
    liouvillian = np.zeros((d * d, d * d), dtype=complex)
    coupled = False
    for op in couplings:
        scale = max(np.max(np.abs(op)), 1e-300)
        for omega, component in eigenoperator_decomposition(hamiltonian, op):
            if omega <= 0:
                continue
            if np.max(np.abs(component)) <= 1e-14 * scale:
                continue
            coupled = True
            rate = bath.rate(omega)
            occupation = bath.occupation(omega)
            liouvillian += rate * (occupation + 1) * dissipator_super(component)
            if occupation:
                liouvillian += rate * occupation * dissipator_super(
                    dagger(component))
    if not coupled:
        raise DissipationlessCouplingError(
            'dissipationless coupling: no positive Bohr frequency is coupled')
    return liouvillian


def bloch_vector(rho):
    return np.array([np.trace(np.dot(rho, s)).real
                     for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)])


def populations(rho):
    return np.real(np.diag(rho)).copy()
