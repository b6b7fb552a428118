"""Slow driving schedules in rescaled time t' = t / tau in [0, 1].

A Protocol bundles the Liouvillian and Hamiltonian as functions of t', the
bath metadata and, optionally, the duration tau and analytic derivatives.
Evaluations are memoized per protocol and returned read-only.
"""
import functools
import logging

import numpy as np

from slowdrive import config
from slowdrive.theory import DegenerateKernelError
from slowdrive.theory import InvalidParameterError
from slowdrive.theory import NumericalError
from slowdrive.theory import perturbation
from slowdrive.theory import stencil
from slowdrive.theory import superop

logger = logging.getLogger(__name__)

INFINITE_SMOOTHNESS = float('inf')


def _frozen(fn, maxsize):
    @functools.lru_cache(maxsize=maxsize)
    def wrapper(t):
        value = np.array(fn(t), dtype=complex)
        value.setflags(write=False)
        return value
    return wrapper


class Protocol(object):
    """Driving schedule on t' in [0, 1].

    Args:
      dim: Hilbert space dimension d.
      liouvillian_at: t' -> d^2 x d^2 Liouvillian.
      hamiltonian_at: t' -> d x d Hamiltonian.
      bath: BathSpec of the bath the system is coupled to, or None.
      tau: duration; may be None for coefficient-only work.
      smoothness_order: number of continuous derivatives guaranteed.
      steady_state_derivative_at: optional analytic d rho_0 / dt'.
      hamiltonian_derivative_at: optional analytic dH / dt'.
      name: label used in logs and outputs.
    """

    def __init__(self, dim, liouvillian_at, hamiltonian_at, bath=None,
                 tau=None, smoothness_order=INFINITE_SMOOTHNESS,
                 steady_state_derivative_at=None,
                 hamiltonian_derivative_at=None, name='custom'):
        if tau is not None and not tau > 0:
            raise InvalidParameterError('tau must be positive, got %r' % tau)
        self.dim = int(dim)
        self.tau = None if tau is None else float(tau)
        self.bath = bath
        self.smoothness_order = smoothness_order
        self.name = name
        self._sources = (liouvillian_at, hamiltonian_at,
                         steady_state_derivative_at,
                         hamiltonian_derivative_at)
        size = config.PROTOCOL_CACHE_SIZE
        self._liouvillian = _frozen(liouvillian_at, size)
        self._hamiltonian = _frozen(hamiltonian_at, size)
        self._steady_state = _frozen(
            lambda t: perturbation.steady_state(self._liouvillian(t)), size)
        self._steady_state_derivative_at = steady_state_derivative_at
        self._hamiltonian_derivative_at = hamiltonian_derivative_at
        self._reversed_from = None

    def __repr__(self):
        return '<Protocol(name=%r, dim=%d, tau=%r, bath=%r)>' % (
            self.name, self.dim, self.tau, self.bath)

    def with_tau(self, tau):
        """Same schedule with duration tau."""
        liouvillian_at, hamiltonian_at, ss_derivative, h_derivative = \
            self._sources
        p = Protocol(self.dim, liouvillian_at, hamiltonian_at, self.bath, tau,
                     self.smoothness_order, ss_derivative, h_derivative,
                     self.name)
        p._reversed_from = self._reversed_from
        return p

    def liouvillian(self, t):
        return self._liouvillian(float(t))

    def hamiltonian(self, t):
        return self._hamiltonian(float(t))

    def steady_state(self, t):
        return self._steady_state(float(t))

    @property
    def has_analytic_steady_state_derivative(self):
        return self._steady_state_derivative_at is not None

    def steady_state_derivative(self, t, order=1):
        """d^order rho_0 / dt'^order.

        The first derivative is analytic when the protocol supplies one, and
        otherwise a Richardson-refined stencil with step
        config.DERIVATIVE_STEP. Higher orders differentiate the order - 1
        result with step config.TERM_STEP.
        """
        if order < 1:
            raise InvalidParameterError('order must be >= 1, got %r' % order)
        t = float(t)
        if order == 1:
            if self._steady_state_derivative_at is not None:
                return np.array(self._steady_state_derivative_at(t),
                                dtype=complex)
            value = stencil.richardson_derivative(self.steady_state, t,
                                                  config.DERIVATIVE_STEP)
        else:
            value = stencil.derivative(
                lambda s: self.steady_state_derivative(s, order - 1), t,
                config.TERM_STEP)
        return superop.hermitize(value)

    def hamiltonian_derivative(self, t):
        t = float(t)
        if self._hamiltonian_derivative_at is not None:
            return np.array(self._hamiltonian_derivative_at(t), dtype=complex)
        return superop.hermitize(stencil.richardson_derivative(
            self.hamiltonian, t, config.DERIVATIVE_STEP))

    def check_relaxing(self, points=None):
        """Verifies the relaxing and smoothness assumptions on a grid.

        Raises DegenerateKernelError when the zero eigenvalue is not simple
        or the gap falls below config.KERNEL_GAP_RTOL * max|L|, and
        NumericalError for a non-finite steady-state derivative.

        Returns:
          the smallest spectral gap seen on the grid.
        """
        points = config.RELAXING_POINTS if points is None else points
        smallest = np.inf
        for t in np.linspace(0.0, 1.0, points):
            liouvillian = self.liouvillian(t)
            gap = perturbation.spectral_gap(liouvillian)
            scale = np.max(np.abs(liouvillian))
            if not gap > config.KERNEL_GAP_RTOL * scale:
                raise DegenerateKernelError(
                    '%s is not relaxing at t\'=%g: gap %g' %
                    (self.name, t, gap))
            if not np.all(np.isfinite(self.steady_state_derivative(t))):
                raise NumericalError(
                    '%s: steady state not differentiable at t\'=%g' %
                    (self.name, t))
            smallest = min(smallest, gap)
        logger.debug('%s relaxing on %d points, min gap %g', self.name,
                     points, smallest)
        return smallest


def steady_state_derivative(p, t, order=1):
    return p.steady_state_derivative(t, order)


def reverse(p):
    """Time-reversed protocol t' -> 1 - t'."""
    if p._reversed_from is not None and p._reversed_from.tau == p.tau:
        return p._reversed_from
    _, _, ss_derivative, h_derivative = p._sources
    reversed_ss = None
    if ss_derivative is not None:
        reversed_ss = lambda t: -p.steady_state_derivative(1.0 - t)
    reversed_h = None
    if h_derivative is not None:
        reversed_h = lambda t: -p.hamiltonian_derivative(1.0 - t)
    result = Protocol(p.dim, lambda t: p.liouvillian(1.0 - t),
                      lambda t: p.hamiltonian(1.0 - t), p.bath, p.tau,
                      p.smoothness_order, reversed_ss, reversed_h,
                      'reverse(%s)' % p.name)
    result._reversed_from = p
    return result


def driven_qubit_protocol(omega, delta0, bath, tau=None):
    """Thermal qubit driven by (Delta(t')/2) sigma_x, Delta = delta0 cos(pi t').

    The Liouvillian is in the interaction picture with respect to
    (omega/2) sigma_z, so only the drive enters the commutator term; the
    Hamiltonian reported for energetics is the full one.
    """
    omega, delta0 = float(omega), float(delta0)
    if not omega > 0:
        raise InvalidParameterError('omega must be positive, got %r' % omega)
    rate = bath.rate(omega)
    occupation = bath.occupation(omega)
    dissipator = (rate * (occupation + 1) *
                  superop.dissipator_super(superop.SIGMA_MINUS) +
                  rate * occupation *
                  superop.dissipator_super(superop.SIGMA_PLUS))
    drive = superop.hamiltonian_super(superop.SIGMA_X / 2)

    def delta(t):
        return delta0 * np.cos(np.pi * t)

    def liouvillian_at(t):
        return delta(t) * drive + dissipator

    def hamiltonian_at(t):
        return omega / 2 * superop.SIGMA_Z + delta(t) / 2 * superop.SIGMA_X

    def hamiltonian_derivative_at(t):
        return -np.pi * delta0 * np.sin(np.pi * t) / 2 * superop.SIGMA_X

    return Protocol(2, liouvillian_at, hamiltonian_at, bath, tau,
                    hamiltonian_derivative_at=hamiltonian_derivative_at,
                    name='cosine-drive')


def qubit_isotherm_protocol(omega_of, bath, tau=None, omega_dot_of=None,
                            omega_floor=0.0, name='isotherm'):
    """Qubit with splitting omega(t') in contact with one thermal bath.

    Args:
      omega_of: t' -> splitting omega >= 0.
      bath: BathSpec.
      tau: duration.
      omega_dot_of: optional analytic d omega / dt'; enables the analytic
        steady-state and Hamiltonian derivatives.
      omega_floor: m in the soft floor sqrt(omega^2 + m^2) that keeps the
        rate and occupation finite where omega reaches zero.
      name: label.

    The steady state is the Gibbs state (I + z sigma_z) / 2 with
    z = -tanh(beta omega / 2).
    """
    floor = float(omega_floor)
    if floor < 0:
        raise InvalidParameterError('omega_floor must be >= 0, got %r' % floor)
    lowering = superop.dissipator_super(superop.SIGMA_MINUS)
    raising = superop.dissipator_super(superop.SIGMA_PLUS)

    def effective(t):
        omega = float(omega_of(t))
        if omega < 0:
            raise InvalidParameterError(
                'negative splitting %g at t\'=%g' % (omega, t))
        return np.hypot(omega, floor) if floor else omega

    def liouvillian_at(t):
        omega = effective(t)
        rate = bath.rate(omega)
        occupation = bath.occupation(omega)
        return rate * (occupation + 1) * lowering + \
            rate * occupation * raising

    def hamiltonian_at(t):
        return effective(t) / 2 * superop.SIGMA_Z

    steady_state_derivative_at = None
    hamiltonian_derivative_at = None
    if omega_dot_of is not None:
        def effective_dot(t):
            omega = float(omega_of(t))
            omega_dot = float(omega_dot_of(t))
            if not floor:
                return omega_dot
            return omega * omega_dot / np.hypot(omega, floor)

        def steady_state_derivative_at(t):
            x = bath.beta * effective(t) / 2
            z_dot = -bath.beta / 2 / np.cosh(x) ** 2 * effective_dot(t)
            return z_dot / 2 * superop.SIGMA_Z

        def hamiltonian_derivative_at(t):
            return effective_dot(t) / 2 * superop.SIGMA_Z

    logger.debug('isotherm %s: beta=%g alpha=%g floor=%g', name, bath.beta,
                 bath.alpha, floor)
    return Protocol(2, liouvillian_at, hamiltonian_at, bath, tau,
                    steady_state_derivative_at=steady_state_derivative_at,
                    hamiltonian_derivative_at=hamiltonian_derivative_at,
                    name=name)


def bloch_z(omega, beta):
    """Bloch coordinate of the qubit Gibbs state."""
    return -np.tanh(beta * omega / 2)


def cosine_expansion(omega0):
    """omega0 (cos(pi t') + 1): from 2 omega0 down to 0."""
    def omega_of(t):
        return omega0 * (np.cos(np.pi * t) + 1)

    def omega_dot_of(t):
        return -np.pi * omega0 * np.sin(np.pi * t)
    return omega_of, omega_dot_of


def cosine_ramp(omega0, start=2.0, end=1.0):
    """omega0 [start + (end - start)(1 - cos(pi t')) / 2]."""
    def omega_of(t):
        return omega0 * (start + (end - start) * (1 - np.cos(np.pi * t)) / 2)

    def omega_dot_of(t):
        return omega0 * (end - start) * np.pi * np.sin(np.pi * t) / 2
    return omega_of, omega_dot_of


def smoothstep_ramp(omega0, start=2.0, end=1.0):
    """omega0 [start + (end - start)(3 t'^2 - 2 t'^3)]."""
    def omega_of(t):
        return omega0 * (start + (end - start) * (3 * t * t - 2 * t ** 3))

    def omega_dot_of(t):
        return omega0 * (end - start) * 6 * t * (1 - t)
    return omega_of, omega_dot_of


# Named isotherm shapes; each factory returns (omega_of, omega_dot_of) with
# d omega / dt' = 0 at both ends.
ISOTHERM_SHAPES = {
    'cosine-expansion': cosine_expansion,
    'cosine-ramp': cosine_ramp,
    'smoothstep-ramp': smoothstep_ramp,
}

DRIVE_SHAPES = ('cosine-drive',)

# Names under which the two reference protocols are also known.
SHAPE_ALIASES = {
    'appendixA-drive': 'cosine-drive',
    'appendixC-isotherm': 'cosine-expansion',
}


def canonical_shape(shape):
    if isinstance(shape, str):
        return SHAPE_ALIASES.get(shape, shape)
    return shape


def floor_scale(ratio, omega0, beta):
    """Soft-floor scale ratio * max(omega0, T).

    beta * floor >= ratio, so the Bose factor stays finite at any temperature.
    """
    return ratio * max(float(omega0), 1.0 / beta)


def isotherm_from_shape(shape, omega0, bath, tau=None, omega_floor=None,
                        **params):
    """Builds a named isotherm shape.

    omega_floor defaults to config.OMEGA_FLOOR_RATIO * max(omega0, T).
    """
    shape = canonical_shape(shape)
    if shape not in ISOTHERM_SHAPES:
        raise InvalidParameterError('unknown isotherm shape %r (known: %s)' %
                                    (shape, ', '.join(sorted(ISOTHERM_SHAPES))))
    omega0 = float(omega0)
    if not omega0 > 0:
        raise InvalidParameterError('omega0 must be positive, got %r' % omega0)
    try:
        omega_of, omega_dot_of = ISOTHERM_SHAPES[shape](omega0, **params)
    except TypeError as e:
        raise InvalidParameterError('bad parameters for %s: %s' % (shape, e))
    for t in (0.0, 0.5, 1.0):
        if omega_of(t) < 0:
            raise InvalidParameterError(
                '%s reaches a negative splitting at t\'=%g' % (shape, t))
    if omega_floor is None:
        omega_floor = floor_scale(config.OMEGA_FLOOR_RATIO, omega0, bath.beta)
    return qubit_isotherm_protocol(omega_of, bath, tau, omega_dot_of,
                                   omega_floor, name=shape)
