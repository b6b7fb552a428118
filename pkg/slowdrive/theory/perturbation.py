"""Slow-driving perturbation engine.

For a protocol of duration tau the solution of the master equation is
expanded as rho = rho_0 + rho_1 / tau + rho_2 / tau^2 + ..., where rho_0(t')
is the instantaneous steady state and

    rho_{j+1}(t') = (L_{t'} P)^{-1} d rho_j / dt'

with P the projector on traceless operators. (L P)^{-1} is evaluated as a
bordered linear solve: L x + mu I/d = y together with tr x = 0.
"""
import logging

import numpy as np
import scipy.linalg

from slowdrive import config
from slowdrive.theory import DegenerateKernelError
from slowdrive.theory import InvalidParameterError
from slowdrive.theory import InvariantError
from slowdrive.theory import NotTracelessError
from slowdrive.theory import TracelessKernelError
from slowdrive.theory import stencil
from slowdrive.theory import superop
from slowdrive.theory.records import Record

logger = logging.getLogger(__name__)

RESIDUAL_EPS_FACTOR = 100.0


class PerturbativeState(Record):
    """Terms [rho_0, ..., rho_J] of the expansion at one rescaled time."""
    FIELDS = ['t_prime', 'terms']

    @property
    def order(self):
        return len(self.terms) - 1

    def partial_sum(self, tau, order=None):
        order = self.order if order is None else order
        if order > self.order:
            raise InvalidParameterError('only %d orders available' % self.order)
        total = np.zeros_like(self.terms[0])
        for j in range(order, -1, -1):
            total = total + self.terms[j] / float(tau) ** j
        return total

    def check(self):
        """Raises InvariantError unless the trace and Hermiticity invariants
        hold."""
        for j, term in enumerate(self.terms):
            scale = max(1.0, np.max(np.abs(term)))
            expected = 1.0 if j == 0 else 0.0
            tol = config.HERMITIAN_TOL if j == 0 else config.TRACE_TOL
            if abs(np.trace(term) - expected) > tol * scale:
                raise InvariantError('trace of rho_%d is %r at t\'=%g' %
                                     (j, np.trace(term), self.t_prime))
            if not superop.is_hermitian(term, config.TRACE_TOL):
                raise InvariantError('rho_%d not Hermitian at t\'=%g' %
                                     (j, self.t_prime))


def _border_scale(liouvillian):
    return max(np.max(np.abs(liouvillian)), 1e-300)


def _bordered(liouvillian):
    """[[L, s I/d], [s tr, 0]] with s = max|L|."""
    d = superop.super_dimension(liouvillian)
    n = d * d
    trace_row = _border_scale(liouvillian) * superop.trace_functional(d)
    bordered = np.zeros((n + 1, n + 1), dtype=complex)
    bordered[:n, :n] = liouvillian
    bordered[:n, n] = trace_row / d
    bordered[n, :n] = trace_row
    return bordered


def spectral_gap(liouvillian):
    """min |Re lambda| over all eigenvalues except the one closest to 0."""
    evals = scipy.linalg.eigvals(liouvillian)
    evals = evals[np.argsort(np.abs(evals))]
    if len(evals) < 2:
        return np.inf
    return np.min(np.abs(evals[1:].real))


def _kernel_vector(liouvillian):
    evals, evecs = scipy.linalg.eig(liouvillian)
    order = np.argsort(np.abs(evals))
    scale = _border_scale(liouvillian)
    if len(evals) > 1 and \
            abs(evals[order[1]]) <= config.KERNEL_GAP_RTOL * scale:
        raise DegenerateKernelError(
            'degenerate kernel: second eigenvalue %g vs scale %g' %
            (abs(evals[order[1]]), scale))
    return evecs[:, order[0]]


def steady_state(liouvillian):
    """Unique state annihilated by the Liouvillian.

    Raises:
      DegenerateKernelError: the zero eigenvalue is not simple.
      TracelessKernelError: the null vector has no trace and is not a state.
    """
    liouvillian = np.asarray(liouvillian)
    d = superop.super_dimension(liouvillian)
    null = _kernel_vector(liouvillian)
    trace = np.dot(superop.trace_functional(d), null)
    if abs(trace) < config.TRACE_TOL * np.linalg.norm(null):
        raise TracelessKernelError('traceless kernel: null vector is not a '
                                   'state (trace %g)' % abs(trace))
    rhs = np.zeros(d * d + 1, dtype=complex)
    rhs[-1] = _border_scale(liouvillian)
    try:
        solution = scipy.linalg.solve(_bordered(liouvillian), rhs)
    except scipy.linalg.LinAlgError:
        raise TracelessKernelError('traceless kernel: bordered system is '
                                   'singular')
    rho = superop.hermitize(superop.unvectorize(solution[:-1]))
    return rho / np.trace(rho).real


def traceless_projector(d):
    """Matrix of X -> X - tr(X) I / d."""
    if d < 2:
        raise InvalidParameterError('dimension must be >= 2, got %r' % d)
    trace_row = superop.trace_functional(d)
    return np.eye(d * d, dtype=complex) - np.outer(trace_row, trace_row) / d


def projected_inverse_apply(liouvillian, y):
    """Unique traceless x with L[x] = y, for traceless y.

    A trace within config.TRACE_TOL is rounding noise and is projected out
    before the solve.
    """
    liouvillian = np.asarray(liouvillian)
    d = superop.super_dimension(liouvillian)
    y = np.asarray(y, dtype=complex)
    if superop.dimension(y) != d:
        raise InvalidParameterError('operator has d=%d, Liouvillian acts on '
                                    'd=%d' % (superop.dimension(y), d))
    trace = np.trace(y)
    if abs(trace) > config.TRACE_TOL * max(1.0, np.linalg.norm(y)):
        raise NotTracelessError('right-hand side has trace %r' % trace)
    y = y - trace / d * np.eye(d)
    norm = np.linalg.norm(y)
    if norm == 0:
        return np.zeros((d, d), dtype=complex)
    rhs = np.zeros(d * d + 1, dtype=complex)
    rhs[:-1] = superop.vectorize(y)
    try:
        solution = scipy.linalg.solve(_bordered(liouvillian), rhs)
    except scipy.linalg.LinAlgError:
        raise DegenerateKernelError('degenerate kernel: bordered system is '
                                    'singular')
    x = solution[:-1]
    residual = np.linalg.norm(np.dot(liouvillian, x) - rhs[:-1])
    # Relative to |y|, with a rounding floor of the product L x.
    limit = 1e-10 * norm + RESIDUAL_EPS_FACTOR * np.finfo(float).eps * \
        np.linalg.norm(liouvillian, 2) * np.linalg.norm(x)
    if not residual <= limit:
        raise DegenerateKernelError(
            'degenerate kernel: residual %g for |y| = %g (limit %g)' %
            (residual, norm, limit))
    return superop.unvectorize(x)


def projected_inverse(liouvillian):
    """Matrix of X -> (L P)^{-1} P X."""
    d = superop.super_dimension(liouvillian)
    projector = traceless_projector(d)
    columns = []
    for k in range(d * d):
        y = superop.unvectorize(projector[:, k])
        columns.append(superop.vectorize(
            projected_inverse_apply(liouvillian, y)))
    return np.array(columns).T


def perturbation_term(p, t, j):
    """rho_j(t') for protocol p."""
    if j < 0:
        raise InvalidParameterError('order must be >= 0, got %r' % j)
    if j == 0:
        return np.array(p.steady_state(t))
    x = projected_inverse_apply(p.liouvillian(t), term_derivative(p, t, j - 1))
    return superop.hermitize(x)


def term_derivative(p, t, j):
    """d rho_j / dt'; the j = 0 derivative comes from the protocol."""
    if j == 0:
        return p.steady_state_derivative(t, 1)
    return superop.hermitize(stencil.derivative(
        lambda s: perturbation_term(p, s, j), t, config.TERM_STEP))


def perturbation_terms(p, t, order=None):
    order = config.DEFAULT_ORDER if order is None else order
    if order < 0:
        raise InvalidParameterError('order must be >= 0, got %r' % order)
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise InvalidParameterError('t\' must lie in [0, 1], got %r' % t)
    state = PerturbativeState(
        t_prime=t, terms=[perturbation_term(p, t, j)
                          for j in range(order + 1)])
    state.check()
    return state


def recursion_residual(p, t, j):
    """|L[rho_{j+1}] - d rho_j / dt'| at t'."""
    lhs = superop.apply_super(p.liouvillian(t), perturbation_term(p, t, j + 1))
    return np.linalg.norm(lhs - term_derivative(p, t, j))


def slow_solution(p, t, order=None):
    """sum_{j <= order} rho_j(t') / tau^j.

    Positivity is not guaranteed by a finite truncation; a minimum eigenvalue
    below -config.POSITIVITY_TOL is logged as a warning.
    """
    if p.tau is None:
        raise InvalidParameterError('protocol %s has no duration' % p.name)
    state = perturbation_terms(p, t, order)
    rho = state.partial_sum(p.tau)
    lowest = scipy.linalg.eigvalsh(superop.hermitize(rho))[0]
    if lowest < -config.POSITIVITY_TOL:
        logger.warning('order %d slow solution of %s not positive at t\'=%g '
                       '(min eigenvalue %g)', state.order, p.name, t, lowest)
    return rho
