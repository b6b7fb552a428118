"""Finite-time Carnot cycle of a qubit heat engine.

The cycle runs a hot isotherm of duration tau_H, an instantaneous adiabatic
quench of the Hamiltonian by T_C/T_H, a cold isotherm of duration tau_C and
the inverse quench. The cold isotherm is the hot one reversed in time and
rescaled by T_C/T_H, so the Gibbs trajectory is continuous at the joints and
the first-order heats obey Q1C / Q1H = (T_C / T_H)^(1 - alpha).
"""
import concurrent.futures
import logging

import numpy as np
import scipy.optimize

from slowdrive import config
from slowdrive.theory import CycleError
from slowdrive.theory import EngineConvergenceError
from slowdrive.theory import InvalidParameterError
from slowdrive.theory import NoPositiveWorkError
from slowdrive.theory import OptimizerError
from slowdrive.theory import PhysicalConstraintError
from slowdrive.theory import SlowDriveError
from slowdrive.theory import exactprop
from slowdrive.theory import protocol
from slowdrive.theory import superop
from slowdrive.theory import thermo
from slowdrive.theory.records import Record

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ['ratio', 'alpha', 'eta_analytic', 'eta_exact', 'engine_flag',
                 'tauH_opt', 'tauC_opt', 'eta_series_deviation', 'note']

# Relative size of d omega / dt' allowed at the joints.
JOINT_TOL = 1e-9


class CarnotSpec(Record):
    FIELDS = ['T_H', 'T_C', 'alpha', 'gamma0', 'omega0', 'hot_isotherm_shape',
              'shape_params']

    def __init__(self, T_H, T_C, alpha=0.0, gamma0=1.0, omega0=1.0,
                 hot_isotherm_shape='cosine-expansion', shape_params=None):
        T_H, T_C = float(T_H), float(T_C)
        hot_isotherm_shape = protocol.canonical_shape(hot_isotherm_shape)
        if not T_C > 0 or not T_H >= T_C or not np.isfinite(T_H):
            raise InvalidParameterError(
                'need T_H >= T_C > 0, got T_H=%r T_C=%r' % (T_H, T_C))
        if not float(omega0) > 0:
            raise InvalidParameterError('omega0 must be positive')
        if hot_isotherm_shape not in protocol.ISOTHERM_SHAPES:
            raise InvalidParameterError('unknown isotherm shape %r' %
                                        hot_isotherm_shape)
        # Validates gamma0 and alpha.
        superop.BathSpec(1.0 / T_H, gamma0, alpha)
        super(CarnotSpec, self).__init__(
            T_H=T_H, T_C=T_C, alpha=float(alpha), gamma0=float(gamma0),
            omega0=float(omega0), hot_isotherm_shape=hot_isotherm_shape,
            shape_params=dict(shape_params or {}))

    @property
    def ratio(self):
        return self.T_C / self.T_H

    @property
    def eta_carnot(self):
        return 1.0 - self.ratio

    @property
    def hot_bath(self):
        return superop.BathSpec(1.0 / self.T_H, self.gamma0, self.alpha)

    @property
    def cold_bath(self):
        return superop.BathSpec(1.0 / self.T_C, self.gamma0, self.alpha)


class FirstOrderHeats(Record):
    FIELDS = ['Q0H', 'Q0C', 'Q1H', 'Q1C']


class PowerOptimum(Record):
    FIELDS = ['tau_H_opt', 'tau_C_opt', 'P_max', 'eta_star']


class CarnotResult(Record):
    FIELDS = ['Q0H', 'Q0C', 'Q1H', 'Q1C', 'tau_H_opt', 'tau_C_opt', 'P_max',
              'eta_star', 'eta_star_analytic', 'eta_carnot', 'exact']


class EngineResult(Record):
    FIELDS = ['Q_H', 'Q_C', 'W', 'eta', 'is_engine', 'cycles']


def build_cycle(spec, omega_floor_ratio=None):
    """Hot and cold isotherm protocols of the cycle.

    The cold splitting is omega_C(t') = (T_C/T_H) omega_H(1 - t') with the
    frequency floor scaled alike, so beta_C omega_C(t') = beta_H omega_H(1-t').
    The floor is protocol.floor_scale of the hot isotherm.

    Raises:
      CycleError: the hot shape does not expand (omega decreasing overall) or
        has d omega / dt' != 0 at the joints.
    """
    ratio = config.OMEGA_FLOOR_RATIO if omega_floor_ratio is None else \
        omega_floor_ratio
    floor = protocol.floor_scale(ratio, spec.omega0, spec.hot_bath.beta)
    lam = spec.ratio
    try:
        omega_of, omega_dot_of = protocol.ISOTHERM_SHAPES[
            spec.hot_isotherm_shape](spec.omega0, **spec.shape_params)
    except TypeError as e:
        raise InvalidParameterError('bad shape parameters: %s' % e)
    if not omega_of(1.0) < omega_of(0.0):
        raise CycleError('hot isotherm must lower the splitting: omega(0)=%g '
                         'omega(1)=%g' % (omega_of(0.0), omega_of(1.0)))
    scale = np.pi * max(omega_of(0.0), omega_of(1.0))
    for t in (0.0, 1.0):
        if abs(omega_dot_of(t)) > JOINT_TOL * scale:
            raise CycleError('d omega/dt\' = %g at t\'=%g; the Gibbs '
                             'trajectory would jump at the cycle joints' %
                             (omega_dot_of(t), t))

    hot = protocol.qubit_isotherm_protocol(
        omega_of, spec.hot_bath, omega_dot_of=omega_dot_of, omega_floor=floor,
        name='hot-' + spec.hot_isotherm_shape)
    cold = protocol.qubit_isotherm_protocol(
        lambda t: lam * omega_of(1.0 - t), spec.cold_bath,
        omega_dot_of=lambda t: -lam * omega_dot_of(1.0 - t),
        omega_floor=lam * floor, name='cold-' + spec.hot_isotherm_shape)
    return hot, cold


def first_order_heats(spec, panels=None):
    """Zeroth- and first-order heats of both isotherms.

    Raises:
      PhysicalConstraintError: Q0H > 0, Q0C < 0, Q1H < 0, Q1C < 0 violated.
    """
    hot, cold = build_cycle(spec)
    entropy = [thermo.equilibrium_quantities(hot.hamiltonian(t),
                                             spec.hot_bath.beta)[2]
               for t in (0.0, 1.0)]
    delta_s = entropy[1] - entropy[0]
    heats = FirstOrderHeats(
        Q0H=delta_s / spec.hot_bath.beta,
        Q0C=-delta_s / spec.cold_bath.beta,
        Q1H=thermo.heat_coefficient(hot, 1, panels, method='parts'),
        Q1C=thermo.heat_coefficient(cold, 1, panels, method='parts'))
    if not (heats.Q0H > 0 and heats.Q0C < 0 and heats.Q1H < 0 and
            heats.Q1C < 0):
        raise PhysicalConstraintError('cycle heats violate the sign '
                                      'constraints: %r' % heats)
    logger.debug('first order heats for %r: %r', spec, heats)
    return heats


def first_order_power(tau_H, tau_C, Q0H, Q0C, Q1H, Q1C):
    """Extracted power to first order in 1/tau."""
    return (Q0H + Q1H / tau_H + Q0C + Q1C / tau_C) / (tau_H + tau_C)


def first_order_efficiency(tau_H, tau_C, Q0H, Q0C, Q1H, Q1C):
    return 1.0 + (Q0C + Q1C / tau_C) / (Q0H + Q1H / tau_H)


def eta_star_from_heats(Q0H, Q0C, Q1H, Q1C):
    """Closed-form efficiency at maximum first-order power."""
    eta_c = 1.0 + Q0C / Q0H
    return 1.0 / (2.0 / eta_c - 1.0 / (1.0 + np.sqrt(Q1C / Q1H)))


def _golden(fn, lo, hi):
    result = scipy.optimize.minimize_scalar(
        fn, bracket=(lo, hi), method='golden',
        options={'xtol': config.OPTIMIZER_XTOL})
    return result.x, result.fun


def optimize_power(Q0H, Q0C, Q1H, Q1C):
    """Maximizes the first-order power over (tau_H, tau_C).

    A coarse log-spaced grid brackets the maximum, then nested golden-section
    searches in log tau refine it. Ties on the grid go to the smallest tau_H.

    Raises:
      NoPositiveWorkError: Q0H + Q0C <= 0.
      OptimizerError: the grid maximum sits on the search box boundary.
    """
    if not (Q0H > 0 and Q0C < 0 and Q1H < 0 and Q1C < 0):
        raise PhysicalConstraintError('heats violate the sign constraints')
    work = Q0H + Q0C
    if not work > 0:
        raise NoPositiveWorkError('no positive work regime: Q0H + Q0C = %g' %
                                  work)
    box_lo, box_hi = config.OPTIMIZER_BOX
    lo_H = box_lo * abs(Q1H) / work
    lo_C = box_lo * abs(Q1C) / work
    span = np.log(box_hi / box_lo)

    # Coordinates are log(tau / lo), which stay away from zero.
    def power(u_H, u_C):
        return first_order_power(lo_H * np.exp(u_H), lo_C * np.exp(u_C),
                                 Q0H, Q0C, Q1H, Q1C)

    grid = np.linspace(0.0, span, config.OPTIMIZER_GRID)
    values = power(grid[:, np.newaxis], grid[np.newaxis, :])
    i, k = np.unravel_index(np.argmax(values), values.shape)
    last = len(grid) - 1
    if i in (0, last) or k in (0, last):
        raise OptimizerError('power maximum on the search box boundary at '
                             'tau_H=%g tau_C=%g' %
                             (lo_H * np.exp(grid[i]), lo_C * np.exp(grid[k])))
    logger.debug('power grid maximum at cell (%d, %d)', i, k)

    def best_cold(u_H):
        return _golden(lambda u_C: -power(u_H, u_C), grid[k - 1], grid[k + 1])

    u_H, _ = _golden(lambda u: best_cold(u)[1], grid[i - 1], grid[i + 1])
    u_C, neg_power = best_cold(u_H)
    tau_H, tau_C = lo_H * np.exp(u_H), lo_C * np.exp(u_C)
    return PowerOptimum(
        tau_H_opt=tau_H, tau_C_opt=tau_C, P_max=-neg_power,
        eta_star=first_order_efficiency(tau_H, tau_C, Q0H, Q0C, Q1H, Q1C))


def eta_star_analytic(eta_c, alpha):
    """Efficiency at maximum power of the qubit Carnot engine."""
    if not 0 < eta_c < 1:
        raise InvalidParameterError('eta_C must lie in (0, 1), got %r' % eta_c)
    with np.errstate(over='ignore'):
        root = np.power(1.0 - eta_c, (1.0 - alpha) / 2.0)
    return float(1.0 / (2.0 / eta_c - 1.0 / (1.0 + root)))


def eta_star_series(eta_c, alpha):
    """Third-order Taylor polynomial of eta_star_analytic around eta_C = 0."""
    return eta_c / 2 + eta_c ** 2 / 8 + (2 - alpha) * eta_c ** 3 / 32


def eta_star_bounds(eta_c):
    """Limits of eta_star_analytic for alpha -> +inf and alpha -> -inf."""
    return eta_c / 2, eta_c / (2 - eta_c)


def simulate_exact_engine(spec, tau_H, tau_C, tol=None, max_cycles=None,
                          omega_floor_ratio=None):
    """Runs the cycle with the exact propagator until Q_H settles.

    The adiabatic steps rescale the Hamiltonian with the state unchanged.
    W = -Q_H - Q_C is the work done on the qubit over a cycle; the result is
    flagged as not an engine when no work is extracted (W >= 0), and its
    efficiency is then None.

    Raises:
      EngineConvergenceError: Q_H has not settled within max_cycles.
    """
    if not (tau_H > 0 and tau_C > 0):
        raise InvalidParameterError('durations must be positive')
    max_cycles = config.ENGINE_MAX_CYCLES if max_cycles is None else \
        max_cycles
    omega_floor_ratio = config.ENGINE_OMEGA_FLOOR_RATIO if \
        omega_floor_ratio is None else omega_floor_ratio
    hot, cold = build_cycle(spec, omega_floor_ratio)
    hot, cold = hot.with_tau(tau_H), cold.with_tau(tau_C)

    rho = np.array(hot.steady_state(0.0))
    previous = None
    for cycle in range(1, max_cycles + 1):
        hot_run = exactprop.integrate(hot, rho, tol, points=2)
        q_hot = exactprop.exact_heat_work(hot_run, hot).Q
        cold_run = exactprop.integrate(cold, hot_run.states[-1], tol,
                                      points=2)
        q_cold = exactprop.exact_heat_work(cold_run, cold).Q
        rho = cold_run.states[-1] / np.trace(cold_run.states[-1]).real
        logger.debug('cycle %d: Q_H=%.12g Q_C=%.12g', cycle, q_hot, q_cold)
        if previous is not None and \
                abs(q_hot - previous) <= config.ENGINE_CYCLE_RTOL * abs(q_hot):
            break
        previous = q_hot
    else:
        raise EngineConvergenceError('Q_H not converged after %d cycles' %
                                     max_cycles)
    work = -q_hot - q_cold
    is_engine = bool(work < 0)
    result = EngineResult(Q_H=q_hot, Q_C=q_cold, W=work,
                          eta=1.0 + q_cold / q_hot if is_engine else None,
                          is_engine=is_engine, cycles=cycle)
    if not result.is_engine:
        logger.warning('not an engine at T_C/T_H=%g, alpha=%g: W=%g',
                       spec.ratio, spec.alpha, work)
    return result


def carnot_result(spec, exact=False, panels=None, tol=None):
    """First-order optimum of the cycle, optionally with the exact engine
    evaluated at the optimal durations."""
    heats = first_order_heats(spec, panels)
    optimum = optimize_power(heats.Q0H, heats.Q0C, heats.Q1H, heats.Q1C)
    engine = None
    if exact:
        engine = simulate_exact_engine(spec, optimum.tau_H_opt,
                                       optimum.tau_C_opt, tol)
    return CarnotResult(
        Q0H=heats.Q0H, Q0C=heats.Q0C, Q1H=heats.Q1H, Q1C=heats.Q1C,
        tau_H_opt=optimum.tau_H_opt, tau_C_opt=optimum.tau_C_opt,
        P_max=optimum.P_max, eta_star=optimum.eta_star,
        eta_star_analytic=eta_star_analytic(spec.eta_carnot, spec.alpha),
        eta_carnot=spec.eta_carnot, exact=engine)


def sweep_cell(template, ratio, alpha, exact=True, panels=None, tol=None):
    """One sweep row; errors are recorded in the row instead of raised."""
    row = dict((column, None) for column in SWEEP_COLUMNS)
    row.update(ratio=float(ratio), alpha=float(alpha), note='')
    if ratio == 1.0:
        row.update(eta_analytic=0.0, eta_exact=0.0, engine_flag='degenerate',
                   eta_series_deviation=0.0, note='T_C = T_H')
        return row
    try:
        spec = template.replace(T_C=template.T_H * ratio, alpha=alpha)
        eta_c = spec.eta_carnot
        analytic = eta_star_analytic(eta_c, alpha)
        row.update(eta_analytic=analytic,
                   eta_series_deviation=analytic - eta_c / 2 - eta_c ** 2 / 8)
        result = carnot_result(spec, exact=exact, panels=panels, tol=tol)
        row.update(tauH_opt=result.tau_H_opt, tauC_opt=result.tau_C_opt)
        if result.exact is None:
            row['engine_flag'] = 'skipped'
        elif result.exact.is_engine:
            row.update(eta_exact=result.exact.eta, engine_flag='engine')
        else:
            row.update(engine_flag='not-engine',
                       note='W = %.17g' % result.exact.W)
    except SlowDriveError as e:
        logger.warning('sweep cell ratio=%g alpha=%g failed: %s', ratio,
                       alpha, e)
        row.update(engine_flag='error', note='%s: %s' %
                   (e.__class__.__name__, e))
    return row


def _sweep_cell_star(args):
    return sweep_cell(*args)


def sweep(template, ratios, alphas, exact=True, jobs=None, panels=None,
          tol=None):
    """Rows for every (ratio, alpha) pair, ordered ratio-major as given.

    Cells run in a process pool of `jobs` workers; jobs=1 runs inline.
    """
    ratios, alphas = list(ratios), list(alphas)
    if not ratios or not alphas:
        raise InvalidParameterError('ratios and alphas must be non-empty')
    for ratio in ratios:
        if not 0 < ratio <= 1:
            raise InvalidParameterError('ratio must lie in (0, 1], got %r' %
                                        ratio)
    jobs = config.JOBS if jobs is None else jobs
    cells = [(template, ratio, alpha, exact, panels, tol)
             for ratio in ratios for alpha in alphas]
    if jobs <= 1 or len(cells) == 1:
        return [sweep_cell(*cell) for cell in cells]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(_sweep_cell_star, cells))
