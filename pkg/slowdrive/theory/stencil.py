"""Five-point finite-difference first derivatives on a closed interval.

Central stencils are used in the interior. Within 2h of an end the stencil
switches to the one-sided five-point formula of the same (fourth) order, so
the sample points never leave [lo, hi]. The forward and backward stencils are
mirror images, which keeps derivatives of a reversed function exactly the
negated mirror of the original.
"""

CENTRAL = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))
FORWARD = ((0, -25.0), (1, 48.0), (2, -36.0), (3, 16.0), (4, -3.0))
BACKWARD = tuple((-k, -w) for k, w in FORWARD)


def weights(t, h, lo=0.0, hi=1.0):
    """Returns the (offset, weight) pairs of the stencil used at t."""
    if 4 * h > hi - lo:
        raise ValueError('step %g too large for interval [%g, %g]' %
                         (h, lo, hi))
    if t - 2 * h < lo:
        return FORWARD
    if t + 2 * h > hi:
        return BACKWARD
    return CENTRAL


def derivative(f, t, h, lo=0.0, hi=1.0):
    """Fourth-order derivative of f at t with step h.

    Args:
      f: callable of one float; may return scalars or numpy arrays.
      t: evaluation point in [lo, hi].
      h: stencil step.

    Returns:
      df/dt with the same shape as f(t).
    """
    total = 0
    for offset, weight in weights(t, h, lo, hi):
        total = total + weight * f(t + offset * h)
    return total / (12.0 * h)


def richardson_derivative(f, t, h, lo=0.0, hi=1.0):
    """derivative() refined once by Richardson extrapolation in h."""
    coarse = derivative(f, t, h, lo, hi)
    fine = derivative(f, t, h / 2.0, lo, hi)
    return (16.0 * fine - coarse) / 15.0
