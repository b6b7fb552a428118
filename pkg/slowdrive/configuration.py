# Numerical defaults for slowdrive. Every value can be overridden with an
# environment variable named SLOWDRIVE_<NAME>, see bin/config.sample.sh.

import ast
import os


def _env(name, default, cast=float):
    value = os.getenv('SLOWDRIVE_' + name)
    if value is None or value == '':
        return default
    return cast(value)


class Config(object):
    # Operator predicates
    HERMITIAN_TOL = _env('HERMITIAN_TOL', 1e-12)
    DENSITY_EIG_TOL = _env('DENSITY_EIG_TOL', 1e-10)
    TRACE_TOL = _env('TRACE_TOL', 1e-10)

    # Superoperators
    BOHR_GAP_RTOL = _env('BOHR_GAP_RTOL', 1e-9)
    KERNEL_GAP_RTOL = _env('KERNEL_GAP_RTOL', 1e-8)

    # Perturbation engine
    DERIVATIVE_STEP = _env('DERIVATIVE_STEP', 1e-4)
    TERM_STEP = _env('TERM_STEP', 1e-3)
    DEFAULT_ORDER = _env('DEFAULT_ORDER', 2, int)
    POSITIVITY_TOL = _env('POSITIVITY_TOL', 1e-6)
    PROTOCOL_CACHE_SIZE = _env('PROTOCOL_CACHE_SIZE', 4096, int)
    RELAXING_POINTS = _env('RELAXING_POINTS', 50, int)

    # Exact propagator
    ODE_TOL = _env('ODE_TOL', 1e-10)
    TRAJECTORY_POINTS = _env('TRAJECTORY_POINTS', 2001, int)
    # Absolute tolerance of the heat and work accumulators, times ODE tol.
    ACCUMULATOR_ATOL_RATIO = _env('ACCUMULATOR_ATOL_RATIO', 1e-3)

    # Thermodynamic coefficients
    QUAD_PANELS = _env('QUAD_PANELS', 64, int)
    QUAD_NODES = _env('QUAD_NODES', 8, int)
    QUAD_RTOL = _env('QUAD_RTOL', 1e-8)

    # Isotherm frequency floors, in units of max(omega0, T)
    OMEGA_FLOOR_RATIO = _env('OMEGA_FLOOR_RATIO', 1e-10)
    ENGINE_OMEGA_FLOOR_RATIO = _env('ENGINE_OMEGA_FLOOR_RATIO', 1e-6)

    # Carnot cycle
    ENGINE_MAX_CYCLES = _env('ENGINE_MAX_CYCLES', 200, int)
    ENGINE_CYCLE_RTOL = _env('ENGINE_CYCLE_RTOL', 1e-8)
    OPTIMIZER_GRID = _env('OPTIMIZER_GRID', 64, int)
    OPTIMIZER_XTOL = _env('OPTIMIZER_XTOL', 1e-10)
    # Search box for the optimal isotherm durations, in units of |Q1|/W0.
    OPTIMIZER_BOX = (
        ast.literal_eval(os.getenv('SLOWDRIVE_OPTIMIZER_BOX', 'None')) or
        (1e-3, 1e6))

    # Sweeps
    JOBS = _env('JOBS', os.cpu_count() or 1, int)
