"""
Density matrices, rate containers and time-ordered stacks of states.

Vectorization is row-stacking (numpy ravel): vec(rho)[i * d + j] = rho[i, j],
for which vec(A rho B) = (A kron B^T) vec(rho).
"""
import math
from dataclasses import dataclass, field

import numpy as np

from apps.qmatrix.eigen import eigvalsh_batch
from apps.qmatrix.linalg import as_square, dagger, hermiticity_deviation, identity, max_norm
from apps.spinchain.states import PureState

from .exceptions import InvalidStateError

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-8


@dataclass(frozen=True)
class DensityMatrix:
    """
    A 2**n x 2**n density operator.

    Construction only normalizes the array; call ``validate()`` to enforce
    Hermiticity, unit trace and positivity. ``diagnostics`` holds whatever
    the solver that produced the state measured on the way.
    """
    matrix: np.ndarray
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'matrix', as_square(self.matrix))

    @classmethod
    def from_pure(cls, state):
        if not isinstance(state, PureState):
            state = PureState(state)
        return cls(state.projector())

    @classmethod
    def maximally_mixed(cls, n_sites):
        d = 2 ** n_sites
        return cls(identity(d) / d)

    @classmethod
    def from_vector(cls, vector, dimension=None):
        vector = np.asarray(vector, dtype=np.complex128).reshape(-1)
        if dimension is None:
            dimension = math.isqrt(vector.size)
        if dimension * dimension != vector.size:
            raise InvalidStateError(f'Vector of length {vector.size} is not a vectorized square matrix')
        return cls(vector.reshape(dimension, dimension))

    @property
    def dimension(self):
        return self.matrix.shape[0]

    @property
    def n_sites(self):
        return int(self.dimension).bit_length() - 1

    def to_vector(self):
        return self.matrix.ravel()

    def trace(self):
        return complex(np.trace(self.matrix))

    def purity(self):
        """tr(rho^2)"""
        return float(np.real(np.sum(self.matrix * self.matrix.T)))

    def populations(self):
        return np.real(np.diag(self.matrix)).copy()

    def hermiticity_deviation(self):
        return hermiticity_deviation(self.matrix)

    def min_eigenvalue(self):
        return float(eigvalsh_batch(self.matrix)[0])

    def expectation(self, state):
        """<psi|rho|psi> (real part)"""
        psi = state.amplitudes if isinstance(state, PureState) else np.asarray(state, dtype=np.complex128)
        return float(np.real(np.vdot(psi, self.matrix @ psi)))

    def validate(self):
        """
        Raises:
            InvalidStateError: listing every violated invariant
        """
        problems = []
        dim = self.dimension
        if dim < 2 or dim & (dim - 1):
            problems.append(f'dimension {dim} is not a power of two >= 2')
        if not np.all(np.isfinite(self.matrix)):
            raise InvalidStateError('Density matrix contains NaN or Inf entries')
        asymmetry = self.hermiticity_deviation()
        if asymmetry > HERMITIAN_TOL:
            problems.append(f'not Hermitian: max|rho - rho^H| = {asymmetry:.3e}')
        trace_error = abs(self.trace() - 1.0)
        if trace_error > TRACE_TOL:
            problems.append(f'trace differs from 1 by {trace_error:.3e}')
        if not problems:
            lowest = self.min_eigenvalue()
            if lowest < -POSITIVITY_TOL:
                problems.append(f'minimum eigenvalue {lowest:.3e} < -{POSITIVITY_TOL:.0e}')
        if problems:
            raise InvalidStateError('Invalid density matrix: ' + '; '.join(problems))
        return self


@dataclass(frozen=True)
class DephasingRates:
    """Per-site pure-dephasing rates lambda_i in rad/s."""
    lambdas: np.ndarray

    def __post_init__(self):
        lambdas = np.asarray(self.lambdas, dtype=float).reshape(-1)
        if not np.all(np.isfinite(lambdas)) or np.any(lambdas < 0):
            raise ValueError(f'Dephasing rates must be finite and >= 0, got {lambdas.tolist()}')
        object.__setattr__(self, 'lambdas', lambdas)

    @classmethod
    def uniform(cls, value, n_sites=3):
        return cls(np.full(n_sites, float(value)))

    @property
    def total(self):
        return float(np.sum(self.lambdas))


@dataclass(frozen=True)
class MilburnRate:
    """Intrinsic-decoherence time gamma in seconds."""
    gamma: float

    def __post_init__(self):
        if not math.isfinite(self.gamma) or self.gamma < 0:
            raise ValueError(f'gamma must be finite and >= 0, got {self.gamma}')


def rehermitize(matrix):
    """(rho + rho^H) / 2 and the size of the correction, max|rho - rho^H| / 2."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    herm = 0.5 * (matrix + dagger(matrix))
    return herm, 0.5 * max_norm(matrix - dagger(matrix))


@dataclass(frozen=True)
class DensityTrace:
    """Density matrices on a time grid, shape (len(times), d, d)."""
    times: np.ndarray
    matrices: np.ndarray
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        matrices = np.asarray(self.matrices, dtype=np.complex128)
        if matrices.ndim != 3 or matrices.shape[0] != times.size:
            raise InvalidStateError(
                f'Expected {times.size} square matrices, got an array with shape {matrices.shape}'
            )
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'matrices', matrices)

    def __len__(self):
        return self.times.size

    def __getitem__(self, k):
        return DensityMatrix(self.matrices[k], dict(self.diagnostics))

    @property
    def final(self):
        return self[-1]

    def expectations(self, state):
        """<psi|rho(t)|psi> for every t."""
        psi = state.amplitudes if isinstance(state, PureState) else np.asarray(state, dtype=np.complex128)
        return np.real(np.einsum('i,tij,j->t', np.conjugate(psi), self.matrices, psi))

    def purities(self):
        return np.real(np.einsum('tij,tji->t', self.matrices, self.matrices))

    def populations(self):
        return np.real(np.diagonal(self.matrices, axis1=1, axis2=2))

    def trace_deviation(self):
        return float(np.max(np.abs(np.trace(self.matrices, axis1=1, axis2=2) - 1.0)))

    def hermiticity_deviation(self):
        return max_norm(self.matrices - dagger(self.matrices))

    def min_eigenvalue(self):
        return float(np.min(eigvalsh_batch(self.matrices)))


def valid_state(rho):
    """``rho`` as a validated DensityMatrix."""
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    return rho.validate()
