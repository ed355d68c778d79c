"""
Hermitian eigendecomposition by cyclic complex Jacobi rotations
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from .exceptions import ConvergenceError
from .linalg import identity, require_hermitian

logger = logging.getLogger(__name__)

MAX_SWEEPS = 100
OFF_DIAGONAL_RTOL = 1e-13

METHOD_AUTO = 'auto'
METHOD_JACOBI = 'jacobi'
METHOD_LAPACK = 'lapack'
METHOD_CHOICES = (
    (METHOD_AUTO, 'Jacobi up to QMATRIX_JACOBI_MAX_DIM, LAPACK above'),
    (METHOD_JACOBI, 'Cyclic complex Jacobi rotations'),
    (METHOD_LAPACK, 'numpy.linalg.eigh'),
)


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues with orthonormal eigenvectors as columns."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ np.conjugate(v.T)


def _off_diagonal_norm(a):
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def _rotate(a, v, p, q):
    """
    Zero a[p, q] with a unitary rotation acting on columns/rows p and q.

    The pivot is first made real by a phase on index q, then the real
    symmetric 2x2 rotation with tan(2*theta) = 2|a_pq| / (a_qq - a_pp) is
    applied. ``a`` and ``v`` are updated in place.
    """
    apq = a[p, q]
    r = abs(apq)
    phase = apq / r
    theta = 0.5 * math.atan2(2.0 * r, a[q, q].real - a[p, p].real)
    c, s = math.cos(theta), math.sin(theta)

    g = np.array([[c, s], [-s * np.conjugate(phase), c * np.conjugate(phase)]], dtype=np.complex128)
    idx = [p, q]
    a[:, idx] = a[:, idx] @ g
    a[idx, :] = np.conjugate(g.T) @ a[idx, :]
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    v[:, idx] = v[:, idx] @ g


def jacobi_eigh(m):
    """
    Diagonalize a Hermitian matrix by cyclic Jacobi sweeps.

    Args:
        m: Hermitian matrix (checked to 1e-12 relative to its largest entry)

    Returns:
        EigenDecomposition with ascending eigenvalues

    Raises:
        NotHermitianError: if the input is not Hermitian
        ConvergenceError: if the off-diagonal norm is still above
            1e-13 * ||m||_F after MAX_SWEEPS sweeps
    """
    a = require_hermitian(m).copy()
    n = a.shape[0]
    v = identity(n)
    threshold = OFF_DIAGONAL_RTOL * float(np.linalg.norm(a))
    # pivots smaller than this cannot move the off-diagonal norm measurably
    pivot_floor = threshold / max(n, 1) ** 2

    off = _off_diagonal_norm(a)
    sweeps = 0
    while off > threshold:
        if sweeps >= MAX_SWEEPS:
            raise ConvergenceError(sweeps, off, threshold)
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > pivot_floor:
                    _rotate(a, v, p, q)
        sweeps += 1
        off = _off_diagonal_norm(a)

    eigenvalues = np.real(np.diag(a))
    order = np.argsort(eigenvalues, kind='stable')
    logger.debug('Jacobi converged: dim=%d sweeps=%d off=%.3e', n, sweeps, off)
    return EigenDecomposition(eigenvalues=eigenvalues[order], eigenvectors=v[:, order])


def lapack_eigh(m):
    a = require_hermitian(m)
    eigenvalues, eigenvectors = np.linalg.eigh(a)
    return EigenDecomposition(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def eigh(m, method=METHOD_AUTO):
    """
    Hermitian eigendecomposition.

    The Jacobi solver handles everything up to QMATRIX_JACOBI_MAX_DIM (the
    8x8 Hamiltonians and 64x64 superoperators of three spins); larger
    matrices go to LAPACK.
    """
    if method == METHOD_AUTO:
        limit = getattr(settings, 'QMATRIX_JACOBI_MAX_DIM', 64)
        method = METHOD_JACOBI if np.shape(m)[0] <= limit else METHOD_LAPACK
    if method == METHOD_JACOBI:
        return jacobi_eigh(m)
    if method == METHOD_LAPACK:
        return lapack_eigh(m)
    raise ValueError(f'Unknown eigensolver method: {method!r}')


def eigvalsh_batch(stack):
    """Eigenvalues of a stack of Hermitian matrices, shape (..., n)."""
    stack = np.asarray(stack, dtype=np.complex128)
    herm = 0.5 * (stack + np.conjugate(np.swapaxes(stack, -1, -2)))
    return np.linalg.eigvalsh(herm)
