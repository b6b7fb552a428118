#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Runs one slow-driving experiment described by a JSON configuration."""

import argparse
import json
import logging
import sys
import textwrap

import numpy as np
import tabulate

from slowdrive import config
from slowdrive import output_utils
from slowdrive.scripts import ConfigError
from slowdrive.theory import InvalidParameterError
from slowdrive.theory import SlowDriveError
from slowdrive.theory import carnot
from slowdrive.theory import exactprop
from slowdrive.theory import perturbation
from slowdrive.theory import protocol
from slowdrive.theory import superop
from slowdrive.theory import thermo
from slowdrive.theory.records import Record

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

COMMON_KEYS = ('command', 'output', 'tolerances')
COMMAND_KEYS = {
    'steady': ('protocol', 'bath', 't_prime'),
    'evolve': ('protocol', 'bath', 'tau', 'points', 'initial', 'seed'),
    'perturb': ('protocol', 'bath', 'tau', 'order', 'points', 'initial',
                'seed'),
    'isotherm': ('protocol', 'bath', 'order'),
    'carnot': ('carnot', 'exact', 'tau_H', 'tau_C'),
    'sweep': ('carnot', 'ratios', 'alphas', 'exact'),
}
TOLERANCE_KEYS = ('ode', 'panels')
BATH_KEYS = ('beta', 'gamma0', 'alpha')
CARNOT_KEYS = ('T_H', 'T_C', 'alpha', 'gamma0', 'omega0', 'shape',
               'shape_params')
INITIAL_STATES = ('mixed', 'steady', 'random')

EPILOG = textwrap.dedent('''\
    units: hbar = k_B = 1. Energies are in units of omega0 (the qubit
    splitting scale), rates in units of gamma0 and times in units of
    1/gamma0, so beta*omega = 1 means beta = 1 for omega0 = 1.

    commands (the "command" key of the config):
      steady    steady state at t_prime            -> CSV
      evolve    exact trajectory                   -> CSV
      perturb   exact vs order-j slow solutions    -> CSV
      isotherm  heat/work coefficients per order   -> CSV
      carnot    first-order Carnot optimum         -> JSON
      sweep     efficiency at maximum power grid   -> CSV

    exit codes: 0 success, 1 configuration error, 2 numerical failure.
    ''')


class RunConfig(Record):
    FIELDS = ['command', 'protocol', 'bath', 'tau', 'tau_H', 'tau_C', 'order',
              'tolerances', 'points', 't_prime', 'seed', 'output', 'carnot',
              'ratios', 'alphas', 'exact', 'initial']

    @classmethod
    def from_dict(cls, document):
        """Validates keys and fills defaults.

        Raises:
          ConfigError: unknown command or keys, or malformed values.
        """
        if not isinstance(document, dict):
            raise ConfigError('config must be a JSON object')
        command = document.get('command')
        if command not in COMMAND_KEYS:
            raise ConfigError('command must be one of %s, got %r' %
                              (', '.join(sorted(COMMAND_KEYS)), command))
        _reject_unknown(document, COMMON_KEYS + COMMAND_KEYS[command],
                        'config')
        values = dict(document)
        tolerances = dict(_section(values, 'tolerances', required=False))
        _reject_unknown(tolerances, TOLERANCE_KEYS, 'tolerances')
        tolerances.setdefault('ode', config.ODE_TOL)
        tolerances.setdefault('panels', config.QUAD_PANELS)
        _positive(tolerances, 'ode', 'tolerances')
        _positive_int(tolerances, 'panels', 'tolerances')
        values['tolerances'] = tolerances
        if command in ('perturb', 'isotherm'):
            values.setdefault('order', config.DEFAULT_ORDER)
            if not isinstance(values['order'], int) or values['order'] < 0:
                raise ConfigError('order must be a non-negative integer')
        if command in ('evolve', 'perturb'):
            values.setdefault('points', 201)
            values.setdefault('initial', 'mixed')
            _positive_int(values, 'points', 'config')
            if values['points'] < 2:
                raise ConfigError('points must be at least 2')
            if values['initial'] not in INITIAL_STATES:
                raise ConfigError('initial must be one of %s' %
                                  ', '.join(INITIAL_STATES))
            if values['initial'] == 'random':
                values.setdefault('seed', 0)
                seed = values['seed']
                if isinstance(seed, bool) or not isinstance(seed, int) or \
                        seed < 0:
                    raise ConfigError('seed must be a non-negative integer')
            elif 'seed' in values:
                raise ConfigError('seed only applies to initial "random"')
        if command == 'steady':
            values.setdefault('t_prime', 0.0)
            _number(values, 't_prime', 'config')
            if not 0 <= values['t_prime'] <= 1:
                raise ConfigError('t_prime must lie in [0, 1]')
        if command in ('carnot', 'sweep'):
            values.setdefault('exact', command == 'sweep')
            if not isinstance(values['exact'], bool):
                raise ConfigError('exact must be true or false')
        return cls(**values)

    def resolved(self):
        """Configuration echoed into outputs; the output path is left out so
        that the same run written anywhere is byte-identical."""
        out = self.as_dict()
        out.pop('output')
        return dict((k, v) for k, v in out.items() if v is not None)


def _reject_unknown(block, allowed, where):
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise ConfigError('unknown keys in %s: %s' % (where, ', '.join(unknown)))


def _section(values, key, required=True):
    block = values.get(key)
    if block is None:
        if required:
            raise ConfigError('missing %r block' % key)
        return {}
    if not isinstance(block, dict):
        raise ConfigError('%r must be an object' % key)
    return block


def _number(block, key, where, default=None):
    value = block.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError('%s.%s must be a number, got %r' % (where, key, value))
    if not np.isfinite(value):
        raise ConfigError('%s.%s must be finite' % (where, key))
    return float(value)


def _positive(block, key, where, default=None):
    value = _number(block, key, where, default)
    if not value > 0:
        raise ConfigError('%s.%s must be positive, got %r' % (where, key, value))
    return value


def _positive_int(block, key, where):
    value = block.get(key)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError('%s.%s must be a positive integer, got %r' %
                          (where, key, value))
    return value


def build_bath(run_config):
    block = _section(run_config.as_dict(), 'bath')
    _reject_unknown(block, BATH_KEYS, 'bath')
    return superop.BathSpec(_number(block, 'beta', 'bath'),
                            _number(block, 'gamma0', 'bath'),
                            _number(block, 'alpha', 'bath', 0.0))


def build_protocol(run_config, bath):
    block = dict(_section(run_config.as_dict(), 'protocol'))
    shape = protocol.canonical_shape(block.pop('shape', None))
    if not isinstance(shape, str):
        raise ConfigError('protocol.shape must be a string, got %r' % (shape,))
    tau = None
    if run_config.tau is not None:
        tau = _positive(run_config.as_dict(), 'tau', 'config')
    elif run_config.command in ('evolve', 'perturb'):
        raise ConfigError('command %s needs tau' % run_config.command)
    if shape in protocol.DRIVE_SHAPES:
        _reject_unknown(block, ('omega', 'delta0'), 'protocol')
        return protocol.driven_qubit_protocol(
            _positive(block, 'omega', 'protocol'),
            _number(block, 'delta0', 'protocol'), bath, tau)
    if shape in protocol.ISOTHERM_SHAPES:
        omega0 = _positive(block, 'omega0', 'protocol', 1.0)
        block.pop('omega0', None)
        floor = None
        if 'omega_floor_ratio' in block:
            floor = protocol.floor_scale(
                _number(block, 'omega_floor_ratio', 'protocol'), omega0,
                bath.beta)
            block.pop('omega_floor_ratio')
        params = dict((key, _number(block, key, 'protocol')) for key in block)
        return protocol.isotherm_from_shape(shape, omega0, bath, tau, floor,
                                            **params)
    raise ConfigError('unknown protocol shape %r (known: %s)' % (
        shape, ', '.join(sorted(protocol.DRIVE_SHAPES +
                                tuple(protocol.ISOTHERM_SHAPES) +
                                tuple(protocol.SHAPE_ALIASES)))))


def build_carnot_spec(run_config):
    block = _section(run_config.as_dict(), 'carnot')
    _reject_unknown(block, CARNOT_KEYS, 'carnot')
    T_H = _positive(block, 'T_H', 'carnot')
    shape_params = block.get('shape_params') or {}
    if not isinstance(shape_params, dict):
        raise ConfigError('carnot.shape_params must be an object')
    return carnot.CarnotSpec(
        T_H=T_H,
        T_C=_positive(block, 'T_C', 'carnot', T_H),
        alpha=_number(block, 'alpha', 'carnot', 0.0),
        gamma0=_positive(block, 'gamma0', 'carnot', 1.0),
        omega0=_positive(block, 'omega0', 'carnot', 1.0),
        hot_isotherm_shape=block.get('shape', 'cosine-expansion'),
        shape_params=dict((key, _number(shape_params, key, 'shape_params'))
                          for key in shape_params))


def _initial_state(run_config, p):
    if run_config.initial == 'steady':
        return np.array(p.steady_state(0.0))
    if run_config.initial == 'random':
        rng = np.random.default_rng(run_config.seed)
        return superop.random_density_matrix(rng, p.dim)
    return np.eye(p.dim, dtype=complex) / p.dim


def run_steady(run_config, p, jobs):
    rho = p.steady_state(run_config.t_prime)
    writer = output_utils.TableWriter(['component', 'real', 'imag'],
                                      run_config.resolved())
    for k, value in enumerate(superop.vectorize(rho)):
        row, col = divmod(k, p.dim)
        writer.add(component='%d%d' % (row + 1, col + 1), real=value.real,
                   imag=value.imag)
    return writer.render()


def run_evolve(run_config, p, jobs):
    trajectory = exactprop.integrate(p, _initial_state(run_config, p),
                                     run_config.tolerances['ode'],
                                     run_config.points)
    columns = ['t_prime', 't'] + ['p_%d' % (k + 1) for k in range(p.dim)]
    if p.dim == 2:
        columns += ['sx', 'sy', 'sz']
    writer = output_utils.TableWriter(columns, run_config.resolved())
    for t, rho in zip(trajectory.times, trajectory.states):
        row = {'t_prime': t / trajectory.tau, 't': t}
        for k, population in enumerate(superop.populations(rho)):
            row['p_%d' % (k + 1)] = population
        if p.dim == 2:
            row.update(zip(('sx', 'sy', 'sz'), superop.bloch_vector(rho)))
        writer.add(**row)
    logger.info('integrated %d steps', trajectory.stats['steps'])
    return writer.render()


def run_perturb(run_config, p, jobs):
    if p.dim != 2:
        raise ConfigError('perturb reports Bloch coordinates; qubits only')
    order = run_config.order
    trajectory = exactprop.integrate(p, _initial_state(run_config, p),
                                     run_config.tolerances['ode'],
                                     run_config.points)
    columns = ['t_prime']
    for axis in ('sz', 'sy'):
        columns += ['%s_exact' % axis] + ['%s_ord%d' % (axis, j)
                                          for j in range(order + 1)]
    writer = output_utils.TableWriter(columns, run_config.resolved())
    for t_prime, rho in zip(trajectory.t_prime, trajectory.states):
        state = perturbation.perturbation_terms(p, t_prime, order)
        row = {'t_prime': t_prime}
        exact = superop.bloch_vector(rho)
        row.update(sz_exact=exact[2], sy_exact=exact[1])
        for j in range(order + 1):
            bloch = superop.bloch_vector(state.partial_sum(p.tau, j))
            row['sz_ord%d' % j] = bloch[2]
            row['sy_ord%d' % j] = bloch[1]
        writer.add(**row)
    return writer.render()


def run_isotherm(run_config, p, jobs):
    expansion = thermo.expand_thermodynamics(
        p, run_config.order, run_config.tolerances['panels'])
    writer = output_utils.TableWriter(
        ['j', 'Q', 'W', 'dU', 'first_law_residual'], run_config.resolved())
    residuals = expansion.first_law_residuals()
    for j, (q, w, (u0, u1)) in enumerate(zip(expansion.Q_coeffs,
                                             expansion.W_coeffs,
                                             expansion.U_endpoints)):
        writer.add(j=j, Q=q, W=w, dU=u1 - u0, first_law_residual=residuals[j])
    logger.info('isotherm coefficients\n%s', tabulate.tabulate(
        writer.rows, headers='keys', floatfmt='.10g'))
    return writer.render()


def run_carnot(run_config, spec, jobs):
    tol = run_config.tolerances['ode']
    panels = run_config.tolerances['panels']
    result = carnot.carnot_result(spec, exact=run_config.exact, panels=panels,
                                  tol=tol)
    payload = result.as_dict()
    if run_config.tau_H is not None or run_config.tau_C is not None:
        values = run_config.as_dict()
        tau_H = _positive(values, 'tau_H', 'config')
        tau_C = _positive(values, 'tau_C', 'config')
        at = {'tau_H': tau_H, 'tau_C': tau_C}
        heats = (result.Q0H, result.Q0C, result.Q1H, result.Q1C)
        at['P_first_order'] = carnot.first_order_power(tau_H, tau_C, *heats)
        at['eta_first_order'] = carnot.first_order_efficiency(tau_H, tau_C,
                                                              *heats)
        if run_config.exact:
            at['exact'] = carnot.simulate_exact_engine(spec, tau_H, tau_C,
                                                       tol).as_dict()
        payload['at_durations'] = at
    logger.info('carnot result\n%s', tabulate.tabulate(
        [(k, v) for k, v in sorted(payload.items())
         if isinstance(v, float)], floatfmt='.10g'))
    return output_utils.render_json(payload, run_config.resolved())


def run_sweep(run_config, spec, jobs):
    ratios, alphas = run_config.ratios, run_config.alphas
    for name, values in (('ratios', ratios), ('alphas', alphas)):
        if not isinstance(values, list) or not values:
            raise ConfigError('%s must be a non-empty list' % name)
        for value in values:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError('%s must hold numbers' % name)
    rows = carnot.sweep(spec, ratios, alphas, exact=run_config.exact,
                        jobs=jobs, panels=run_config.tolerances['panels'],
                        tol=run_config.tolerances['ode'])
    writer = output_utils.TableWriter(carnot.SWEEP_COLUMNS,
                                      run_config.resolved())
    writer.extend(rows)
    return writer.render()


HANDLERS = {
    'steady': run_steady,
    'evolve': run_evolve,
    'perturb': run_perturb,
    'isotherm': run_isotherm,
    'carnot': run_carnot,
    'sweep': run_sweep,
}


def prepare(run_config):
    """Builds and validates every physical object before any computation."""
    if run_config.command in ('carnot', 'sweep'):
        subject = build_carnot_spec(run_config)
        if run_config.command == 'carnot' and not subject.T_C < subject.T_H:
            raise ConfigError('carnot needs T_C < T_H')
    else:
        subject = build_protocol(run_config, build_bath(run_config))
    return subject


def run(run_config, output=None, jobs=None):
    """Executes a validated RunConfig.

    Returns:
      the process exit code. Output is written only on success.
    """
    try:
        subject = prepare(run_config)
    except InvalidParameterError as e:
        logger.error('configuration error: %s', e)
        return EXIT_CONFIG
    try:
        text = HANDLERS[run_config.command](run_config, subject, jobs)
    except InvalidParameterError as e:
        logger.error('configuration error: %s', e)
        return EXIT_CONFIG
    except SlowDriveError as e:
        logger.error('numerical failure (%s): %s', e.__class__.__name__, e)
        return EXIT_NUMERICAL
    path = output or run_config.output
    if path:
        with open(path, 'w') as f:
            f.write(text)
        logger.info('wrote %s', path)
    else:
        sys.stdout.write(text)
    return EXIT_OK


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def main(argv=None):
    parser = _ArgumentParser(
        description=__doc__, epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument('--config', required=True, metavar='PATH',
                        help='JSON run configuration')
    parser.add_argument('--output', metavar='PATH',
                        help='output file (default: the config "output" key, '
                             'else standard output)')
    parser.add_argument('--jobs', type=int, default=config.JOBS, metavar='N',
                        help='sweep worker processes (default: %(default)s)')
    parser.add_argument('--verbose', action='store_true')

    FORMAT = '%(asctime)-15s %(levelname)-10s %(message)s'
    try:
        opts = parser.parse_args(argv)
    except ConfigError as e:
        logging.basicConfig(level=logging.INFO, format=FORMAT)
        logger.error('%s', e)
        return EXIT_CONFIG

    if opts.verbose:
        logging.basicConfig(level=logging.DEBUG, format=FORMAT)
    else:
        logging.basicConfig(level=logging.INFO, format=FORMAT)

    try:
        with open(opts.config) as f:
            document = json.load(f)
        run_config = RunConfig.from_dict(document)
    except (IOError, OSError, ValueError) as e:
        logger.error('cannot load config %s: %s', opts.config, e)
        return EXIT_CONFIG
    if opts.jobs < 1:
        logger.error('--jobs must be at least 1')
        return EXIT_CONFIG
    return run(run_config, opts.output, opts.jobs)


if __name__ == '__main__':
    sys.exit(main())
