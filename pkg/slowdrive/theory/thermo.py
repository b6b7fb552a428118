"""Thermodynamics of slowly driven protocols, order by order in 1/tau.

Heat, work, energy and entropy are expanded as X = X_0 + X_1/tau + ...; the
coefficients are integrals over t' in [0, 1] evaluated with composite
Gauss-Legendre quadrature whose nodes never touch the interval ends.
"""
import logging

import numpy as np
import numpy.polynomial.legendre
import scipy.linalg

from slowdrive import config
from slowdrive.theory import InvalidParameterError
from slowdrive.theory import QuadratureError
from slowdrive.theory import SingularStateError
from slowdrive.theory import perturbation
from slowdrive.theory.records import Record

logger = logging.getLogger(__name__)

EIGENVALUE_FLOOR = 1e-300

HEAT_METHODS = ('direct', 'parts')


class ThermoExpansion(Record):
    """Per-order thermodynamic coefficients of one protocol.

    U_endpoints[j] = (U_j(0), U_j(1)); S_coeffs = [dS_0, dS_1].
    """
    FIELDS = ['Q_coeffs', 'W_coeffs', 'U_endpoints', 'S_coeffs']

    def first_law_residuals(self):
        return [u1 - u0 - w - q for (u0, u1), w, q in
                zip(self.U_endpoints, self.W_coeffs, self.Q_coeffs)]


def gauss_legendre_rule(panels, nodes=None):
    """Nodes and weights of the composite rule on [0, 1]."""
    nodes = config.QUAD_NODES if nodes is None else nodes
    x, w = numpy.polynomial.legendre.leggauss(nodes)
    edges = np.arange(panels) / float(panels)
    points = (edges[:, np.newaxis] + (x[np.newaxis, :] + 1) / (2.0 * panels))
    weights = np.tile(w / (2.0 * panels), (panels, 1))
    return points.ravel(), weights.ravel()


def _apply_rule(integrand, panels):
    points, weights = gauss_legendre_rule(panels)
    values = np.array([integrand(t) for t in points])
    return np.dot(weights, values), np.dot(weights, np.abs(values))


def composite_quadrature(integrand, panels=None, rtol=None):
    """int_0^1 integrand(t') dt' with a panel-doubling error check.

    Raises:
      QuadratureError: the rules with panels and 2 * panels disagree by more
        than rtol relative to the integral of |integrand|.
    """
    panels = config.QUAD_PANELS if panels is None else int(panels)
    rtol = config.QUAD_RTOL if rtol is None else rtol
    coarse, _ = _apply_rule(integrand, panels)
    fine, magnitude = _apply_rule(integrand, 2 * panels)
    scale = max(abs(fine), magnitude)
    if abs(fine - coarse) > rtol * scale:
        raise QuadratureError(
            'quadrature not converged: %d panels give %.17g, %d panels '
            'give %.17g' % (panels, coarse, 2 * panels, fine))
    logger.debug('quadrature %d/%d panels: %.17g (change %g)', panels,
                 2 * panels, fine, abs(fine - coarse))
    return fine


def _trace_product(a, b):
    return np.trace(np.dot(a, b)).real


def equilibrium_quantities(hamiltonian, beta):
    """Partition function, energy and entropy of the Gibbs state.

    Returns:
      (Z, U0, S0) with S0 = beta U0 + log Z.
    """
    if not beta > 0:
        raise InvalidParameterError('beta must be positive, got %r' % beta)
    energies = scipy.linalg.eigvalsh(hamiltonian)
    shift = energies[0]
    boltzmann = np.exp(-beta * (energies - shift))
    partial = boltzmann.sum()
    log_z = np.log(partial) - beta * shift
    energy = np.dot(energies, boltzmann) / partial
    return np.exp(log_z), energy, beta * energy + log_z


def von_neumann_entropy(rho):
    evals = scipy.linalg.eigvalsh(rho)
    evals = evals[evals > EIGENVALUE_FLOOR]
    return -np.dot(evals, np.log(evals))


def energy_coefficient(p, j, t):
    """U_j(t') = tr[H(t') rho_j(t')]."""
    return _trace_product(p.hamiltonian(t), perturbation.perturbation_term(
        p, t, j))


def energy_change(p, j):
    return energy_coefficient(p, j, 1.0) - energy_coefficient(p, j, 0.0)


def heat_coefficient(p, j, panels=None, method='direct'):
    """Q_j = int_0^1 tr[H(t') d rho_j / dt'] dt'.

    Args:
      p: Protocol.
      j: order.
      panels: Gauss-Legendre panels (default config.QUAD_PANELS).
      method: 'direct' integrates the formula above; 'parts' evaluates
        dU_j - int tr[dH/dt' rho_j] dt', which needs no derivative of rho_j.
    """
    if j < 0:
        raise InvalidParameterError('order must be >= 0, got %r' % j)
    if method not in HEAT_METHODS:
        raise InvalidParameterError('unknown heat method %r' % method)
    if method == 'parts':
        return energy_change(p, j) - work_coefficient(p, j, panels)

    def integrand(t):
        return _trace_product(p.hamiltonian(t),
                              perturbation.term_derivative(p, t, j))
    return composite_quadrature(integrand, panels)


def work_coefficient(p, j, panels=None):
    """W_j = int_0^1 tr[dH/dt' rho_j] dt'."""
    if j < 0:
        raise InvalidParameterError('order must be >= 0, got %r' % j)

    def integrand(t):
        return _trace_product(p.hamiltonian_derivative(t),
                              perturbation.perturbation_term(p, t, j))
    return composite_quadrature(integrand, panels)


def _log_state(rho):
    evals, vectors = scipy.linalg.eigh(rho)
    if evals[0] <= 10 * np.finfo(float).eps * evals[-1]:
        raise SingularStateError('steady state is singular (min eigenvalue '
                                 '%g)' % evals[0])
    logs = np.log(np.maximum(evals, EIGENVALUE_FLOOR))
    return np.dot(vectors * logs, np.conj(vectors.T))


def first_order_entropy(p, t):
    """S_1(t') = -tr[rho_1 log rho_0]."""
    log_rho = _log_state(perturbation.perturbation_term(p, t, 0))
    return -_trace_product(perturbation.perturbation_term(p, t, 1), log_rho)


def entropy_coefficient(p, j, t):
    if j == 0:
        return von_neumann_entropy(perturbation.perturbation_term(p, t, 0))
    if j == 1:
        return first_order_entropy(p, t)
    raise InvalidParameterError('entropy coefficients exist for j <= 1')


def expand_thermodynamics(p, order=None, panels=None, method='direct'):
    """ThermoExpansion of protocol p up to the given order."""
    order = config.DEFAULT_ORDER if order is None else order
    heats, works, endpoints = [], [], []
    for j in range(order + 1):
        endpoints.append((energy_coefficient(p, j, 0.0),
                          energy_coefficient(p, j, 1.0)))
        works.append(work_coefficient(p, j, panels))
        heats.append(heat_coefficient(p, j, panels, method))
    entropies = [entropy_coefficient(p, j, 1.0) - entropy_coefficient(p, j, 0.0)
                 for j in range(min(order, 1) + 1)]
    return ThermoExpansion(Q_coeffs=heats, W_coeffs=works,
                           U_endpoints=endpoints, S_coeffs=entropies)
