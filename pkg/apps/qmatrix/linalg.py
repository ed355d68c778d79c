"""
Dense complex matrix helpers.

Matrices are numpy complex128 arrays in row-major order. Functions here never
mutate their inputs.
"""
import functools
import logging

import numpy as np
from django.conf import settings

from .exceptions import DimensionError, NotHermitianError, NonFiniteError

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12


def as_matrix(m):
    """Return ``m`` as a 2-D complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f'Expected a 2-D matrix, got an array with shape {a.shape}')
    return a


def as_square(m):
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f'Expected a square matrix, got shape {a.shape}')
    return a


def identity(n):
    return np.eye(n, dtype=np.complex128)


def dagger(m):
    """Conjugate transpose."""
    return np.conjugate(np.swapaxes(m, -1, -2))


def max_norm(m):
    """Largest absolute entry, 0 for an empty matrix."""
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def commutator(a, b):
    return a @ b - b @ a


def hermiticity_deviation(m):
    """max|M - M^H|"""
    return max_norm(m - dagger(m))


def require_hermitian(m, tol=HERMITIAN_TOL):
    """
    Check that ``m`` is Hermitian and return it as a square complex array.

    The tolerance is relative to max(1, max|m|) so that Hamiltonians in
    rad/s (entries up to ~1e6) are judged on the same footing as unit-scale
    matrices.
    """
    a = as_square(m)
    check_finite(a)
    asymmetry = hermiticity_deviation(a)
    allowed = tol * max(1.0, max_norm(a))
    if asymmetry > allowed:
        raise NotHermitianError(asymmetry, allowed)
    return a


def check_finite(m):
    if not np.all(np.isfinite(m)):
        raise NonFiniteError('Matrix contains NaN or Inf entries')
    return m


def kron(a, b):
    """
    Kronecker product with entry (i*b.rows + k, j*b.cols + l) = a[i, j] * b[k, l].

    Raises:
        DimensionError: if the result would exceed QMATRIX_KRON_MAX_ENTRIES
    """
    a = as_matrix(a)
    b = as_matrix(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    cap = getattr(settings, 'QMATRIX_KRON_MAX_ENTRIES', 2 ** 20)
    if rows * cols > cap:
        raise DimensionError(
            f'Kronecker product of {a.shape} and {b.shape} has {rows * cols} entries, cap is {cap}'
        )
    return np.kron(a, b)


def kron_all(matrices):
    """Kronecker product of a sequence, left to right."""
    return functools.reduce(kron, matrices)
