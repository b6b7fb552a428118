"""Exact propagation of the time-dependent master equation d rho/dt = L_t[rho].

The vectorized equation is integrated in physical time t in [0, tau] with
scipy's adaptive Dormand-Prince 5(4) pair (RK45) and its dense output.
"""
import logging

import numpy as np
import scipy.integrate
import scipy.linalg

from slowdrive import config
from slowdrive.theory import IntegrationError
from slowdrive.theory import InvalidParameterError
from slowdrive.theory import InvariantError
from slowdrive.theory import superop
from slowdrive.theory.records import Record

logger = logging.getLogger(__name__)

MIN_STEP_RATIO = 1e-14


class Trajectory(Record):
    """States of an exact integration on a grid of physical times.

    `heat` and `work` hold the running totals of Q and W on the same grid;
    they are integrated together with the state. `_solution` is the dense
    interpolant of the augmented vector [vec(rho), Q, W].
    """
    FIELDS = ['times', 'states', 'heat', 'work', 'stats', 'tau', 'tol',
              '_solution']

    def state_at(self, t):
        d = self.states.shape[1]
        vector = self._solution(t)[:d * d]
        return superop.hermitize(superop.unvectorize(vector))

    @property
    def t_prime(self):
        return self.times / self.tau

    def bloch(self):
        return np.array([superop.bloch_vector(rho) for rho in self.states])

    def populations(self):
        return np.array([superop.populations(rho) for rho in self.states])


class HeatWork(Record):
    FIELDS = ['Q', 'W', 'dU', 'first_law_residual']


def _check_states(states, tol):
    limit = max(10 * tol, 1e-9)
    for k, rho in enumerate(states):
        trace_error = abs(np.trace(rho) - 1)
        lowest = scipy.linalg.eigvalsh(rho)[0]
        if trace_error > limit or lowest < -max(100 * tol, 1e-8):
            raise InvariantError(
                'state %d left the density matrices: trace error %g, min '
                'eigenvalue %g' % (k, trace_error, lowest))


def integrate(p, rho_init, tol=None, points=None):
    """Integrates the master equation of protocol p from rho_init.

    The heat rate tr[L_t[rho] H] and the power tr[rho dH/dt] ride along as
    two extra components of the ODE state, so Q and W carry the step
    control of the solver.

    Args:
      p: Protocol with tau set.
      rho_init: initial density matrix.
      tol: relative (and absolute) local error tolerance per step.
      points: number of equally spaced stored states, including both ends.

    Returns:
      Trajectory.

    Raises:
      IntegrationError: the step size collapsed (stiff or singular protocol).
      InvariantError: a stored state is not a density matrix within 10 tol.
    """
    tol = config.ODE_TOL if tol is None else float(tol)
    points = config.TRAJECTORY_POINTS if points is None else int(points)
    if p.tau is None:
        raise InvalidParameterError('protocol %s has no duration' % p.name)
    if not tol > 0:
        raise InvalidParameterError('tol must be positive, got %r' % tol)
    if points < 2:
        raise InvalidParameterError('need at least 2 points, got %r' % points)
    if not superop.is_density_matrix(rho_init, tol=max(1e-9, 10 * tol)):
        raise InvalidParameterError('initial state is not a density matrix')
    tau = p.tau
    n = p.dim * p.dim

    def rhs(t, y):
        t_prime = t / tau
        rho = superop.unvectorize(y[:n])
        rho_dot = np.dot(p.liouvillian(t_prime), y[:n])
        heat_rate = np.trace(np.dot(superop.unvectorize(rho_dot),
                                    p.hamiltonian(t_prime))).real
        power = np.trace(np.dot(rho, p.hamiltonian_derivative(
            t_prime))).real / tau
        return np.concatenate([rho_dot, [heat_rate, power]])

    start = np.concatenate([superop.vectorize(rho_init), [0.0, 0.0]])
    atol = np.full(n + 2, tol)
    atol[n:] = tol * config.ACCUMULATOR_ATOL_RATIO
    result = scipy.integrate.solve_ivp(
        rhs, (0.0, tau), start, method='RK45', rtol=tol, atol=atol,
        dense_output=True)
    if result.status != 0:
        raise IntegrationError('stiff/singular protocol %s: %s' %
                               (p.name, result.message))
    steps = np.diff(result.t)
    if len(steps) and steps.min() < MIN_STEP_RATIO * tau:
        raise IntegrationError('stiff/singular protocol %s: step %g' %
                               (p.name, steps.min()))

    times = np.linspace(0.0, tau, points)
    vectors = result.sol(times).T
    states = np.array([superop.hermitize(superop.unvectorize(v[:n]))
                       for v in vectors])
    _check_states(states, tol)
    stats = {
        'steps': len(steps),
        'rhs_evals': int(result.nfev),
        'min_step': float(steps.min()) if len(steps) else 0.0,
        'max_step': float(steps.max()) if len(steps) else 0.0,
        'message': result.message,
    }
    logger.debug('integrated %s over tau=%g: %s', p.name, tau, stats)
    return Trajectory(times=times, states=states, heat=vectors[:, n].real,
                      work=vectors[:, n + 1].real, stats=stats, tau=tau,
                      tol=tol, _solution=result.sol)


def exact_heat_work(trajectory, p):
    """Heat Q = int tr[rho' H] dt and work W = int tr[rho H'] dt.

    Both are the end values of the accumulators integrated with the state;
    dU is taken from the end states.
    """
    heat = float(trajectory.heat[-1])
    work = float(trajectory.work[-1])
    energy = [np.trace(np.dot(p.hamiltonian(s), rho)).real
              for s, rho in ((0.0, trajectory.states[0]),
                             (1.0, trajectory.states[-1]))]
    delta_u = energy[1] - energy[0]
    residual = delta_u - heat - work
    scale = max(abs(delta_u), abs(heat), abs(work), 1e-300)
    if abs(residual) > 1e-8 * scale:
        logger.warning('first law closes only to %g (relative) on %s',
                       abs(residual) / scale, p.name)
    return HeatWork(Q=heat, W=work, dU=delta_u, first_law_residual=residual)
