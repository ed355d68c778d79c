"""
Matrix exponentials: spectral (Hermitian generators) and Pade scaling-and-squaring.
"""
import logging
import math

import numpy as np

from .eigen import eigh
from .linalg import as_square, check_finite, dagger, identity

logger = logging.getLogger(__name__)

MINUS_I = -1j
PLUS_I = 1j

# Pade(13) numerator/denominator coefficients
PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)

# Largest 1-norm for which Pade(13) is accurate to double precision
THETA_13 = 5.371920351148152


def one_norm(a):
    """Maximum absolute column sum."""
    return float(np.max(np.sum(np.abs(a), axis=0))) if a.size else 0.0


def expm_hermitian_generator(h, t, sign=MINUS_I):
    """
    exp(sign * h * t) for Hermitian ``h`` through its eigendecomposition.

    Args:
        h: Hermitian generator (a Hamiltonian in rad/s, hbar = 1)
        t: time in seconds
        sign: -1j for the propagator exp(-iHt), +1j for its inverse

    Returns:
        V diag(exp(sign * lambda_k * t)) V^H, unitary for sign = -1j
    """
    if sign not in (MINUS_I, PLUS_I):
        raise ValueError(f'sign must be -1j or +1j, got {sign!r}')
    decomposition = eigh(h)
    v = decomposition.eigenvectors
    phases = np.exp(sign * decomposition.eigenvalues * t)
    return (v * phases) @ dagger(v)


def _pade13(a, eye):
    c = PADE13
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (a6 @ (c[13] * a6 + c[11] * a4 + c[9] * a2) + c[7] * a6 + c[5] * a4 + c[3] * a2 + c[1] * eye)
    v = a6 @ (c[12] * a6 + c[10] * a4 + c[8] * a2) + c[6] * a6 + c[4] * a4 + c[2] * a2 + c[0] * eye
    return u, v


def scaling_exponent(norm):
    """Smallest s >= 0 with norm / 2**s <= THETA_13."""
    if norm <= THETA_13:
        return 0
    return max(0, int(math.ceil(math.log2(norm / THETA_13))))


def expm_general(m):
    """
    exp(m) for any square matrix by Pade(13) scaling and squaring.

    Raises:
        NonFiniteError: if ``m`` holds NaN or Inf entries
    """
    a = check_finite(as_square(m))
    s = scaling_exponent(one_norm(a))
    if s:
        a = a / (2.0 ** s)
    u, v = _pade13(a, identity(a.shape[0]))
    r = np.linalg.solve(v - u, v + u)
    for _ in range(s):
        r = r @ r
    logger.debug('expm_general: dim=%d squarings=%d', a.shape[0], s)
    return r
