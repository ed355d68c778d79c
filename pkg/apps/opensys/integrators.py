"""
Fixed-step classical Runge-Kutta with successive step halving.

This is the independent cross-check for the exponential solvers, meant for
short windows: the step count grows with ||H|| * t.
"""
import logging
import math

import numpy as np
from django.conf import settings

from apps.qmatrix.linalg import max_norm

from .exceptions import IntegrationError

logger = logging.getLogger(__name__)

AGREEMENT_TOL = 1e-8
STEP_SCALE = 0.05


def rk4_step(f, y, dt):
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_fixed(f, y0, t, steps):
    """Integrate y' = f(y) from 0 to t in ``steps`` equal steps."""
    y = np.array(y0, dtype=np.complex128, copy=True)
    dt = t / steps
    for _ in range(steps):
        y = rk4_step(f, y, dt)
    return y


def initial_steps(t, rate_scale):
    """Fewest equal steps with rate_scale * dt <= 0.05."""
    if rate_scale <= 0:
        return 1
    return max(1, math.ceil(t * rate_scale / STEP_SCALE))


def rk4(f, y0, t, rate_scale, tol=AGREEMENT_TOL, max_halvings=None):
    """
    y(t) for y' = f(y), y(0) = y0.

    Starts from the step count given by ``rate_scale`` (an upper bound on the
    spectral radius of f) and halves the step until two successive results
    agree entrywise to ``tol``. The finer of the two is returned.

    Raises:
        IntegrationError: if RK4_MAX_HALVINGS halvings do not reach agreement
    """
    if t < 0:
        raise ValueError(f't must be >= 0, got {t}')
    if t == 0:
        return np.array(y0, dtype=np.complex128, copy=True)
    if max_halvings is None:
        max_halvings = getattr(settings, 'RK4_MAX_HALVINGS', 8)

    steps = initial_steps(t, rate_scale)
    previous = rk4_fixed(f, y0, t, steps)
    difference = math.inf
    for halving in range(1, max_halvings + 1):
        steps *= 2
        current = rk4_fixed(f, y0, t, steps)
        difference = max_norm(current - previous)
        if difference <= tol:
            logger.debug('RK4 converged: %d steps, %d halvings, difference %.3e', steps, halving, difference)
            return current
        previous = current
    raise IntegrationError(max_halvings, difference, tol)
