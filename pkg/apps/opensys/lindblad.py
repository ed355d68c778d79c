"""
Pure-dephasing Lindblad dynamics

    d(rho)/dt = -i [H, rho] + sum_i lambda_i (sz_i rho sz_i - rho)

as a linear ODE on the row-stacked density matrix.
"""
import logging

import numpy as np

from apps.qmatrix.expm import expm_general
from apps.qmatrix.linalg import as_square, identity, kron
from apps.spinchain.operators import hamiltonian, pauli_at

from .integrators import rk4
from .states import DensityTrace, rehermitize, valid_state

logger = logging.getLogger(__name__)

METHOD_SUPEROP_EXP = 'superop_exp'
METHOD_RK4 = 'rk4'
METHOD_CHOICES = (
    (METHOD_SUPEROP_EXP, 'Exponential of the Liouvillian, cached per grid spacing'),
    (METHOD_RK4, 'Classical Runge-Kutta with step halving'),
)

POSITIVITY_WARNING = 1e-6
GRID_SPACING_RTOL = 1e-12


def dephasing_liouvillian(h, lambdas):
    """
    L = -i (H kron I - I kron H^T) + sum_i lambda_i (Z_i kron Z_i^T - I kron I)

    ``lambdas`` holds one rate per site; the site count follows from dim H.
    """
    h = as_square(h)
    d = h.shape[0]
    n_sites = int(d).bit_length() - 1
    lambdas = np.asarray(lambdas, dtype=float).reshape(-1)
    if 2 ** n_sites != d or lambdas.size != n_sites:
        raise ValueError(f'Need {n_sites} dephasing rates for a {d}-dimensional Hamiltonian, got {lambdas.size}')

    eye = identity(d)
    liouvillian = -1j * (kron(h, eye) - kron(eye, h.T))
    identity_super = identity(d * d)
    for site, rate in enumerate(lambdas):
        if rate:
            z = pauli_at('z', site, n_sites)
            liouvillian += rate * (kron(z, z.T) - identity_super)
    return liouvillian


def lindblad_liouvillian(p, rates):
    return dephasing_liouvillian(hamiltonian(p), rates.lambdas)


def finalize_states(times, matrices, label):
    """
    Re-Hermitize a stack of states and collect the diagnostics that go into
    run manifests.
    """
    raw_hermiticity = float(np.max(np.abs(matrices - np.conjugate(np.swapaxes(matrices, 1, 2))))) if matrices.size else 0.0
    matrices, correction = rehermitize(matrices)
    result = DensityTrace(times, matrices)
    lowest = result.min_eigenvalue()
    diagnostics = {
        'hermiticity_deviation': raw_hermiticity,
        'hermiticity_correction': correction,
        'trace_deviation': result.trace_deviation(),
        'min_eigenvalue': lowest,
        'positivity_warning': lowest < -POSITIVITY_WARNING,
    }
    logger.debug('%s: re-Hermitization correction %.3e', label, correction)
    if diagnostics['positivity_warning']:
        logger.warning('%s: minimum eigenvalue %.3e below -%.0e', label, lowest, POSITIVITY_WARNING)
    result.diagnostics.update(diagnostics)
    return result


class LindbladPropagator:
    """
    exp(L dt) applied step by step. Step superoperators are computed once per
    distinct spacing and reused; the cache is only written while stepping.
    """

    def __init__(self, liouvillian):
        self.liouvillian = as_square(liouvillian)
        self.dimension = int(round(np.sqrt(self.liouvillian.shape[0])))
        self._steps = {}

    @classmethod
    def for_chain(cls, p, rates):
        return cls(lindblad_liouvillian(p, rates))

    def step(self, dt):
        key = float(dt)
        cached = self._steps.get(key)
        if cached is None:
            cached = expm_general(self.liouvillian * key)
            self._steps[key] = cached
        return cached

    def evolve(self, rho0, t):
        rho0 = valid_state(rho0)
        if t < 0:
            raise ValueError(f't must be >= 0, got {t}')
        return self.evolve_grid(rho0, [t]).final

    def evolve_grid(self, rho0, times):
        """
        rho(t) for every t in ``times`` (ascending, starting at or after 0).

        A uniform grid uses a single step superoperator; otherwise each
        interval gets its own (cached) exponential.
        """
        rho0 = valid_state(rho0)
        times = np.asarray(times, dtype=float).reshape(-1)
        if times.size == 0 or times[0] < 0 or np.any(np.diff(times) < 0):
            raise ValueError('times must be a non-empty ascending grid starting at t >= 0')

        gaps = np.diff(times)
        uniform = gaps.size > 0 and np.allclose(gaps, gaps[0], rtol=GRID_SPACING_RTOL, atol=0)
        vector = self.step(times[0]) @ rho0.to_vector() if times[0] > 0 else rho0.to_vector()
        d = self.dimension
        matrices = np.empty((times.size, d, d), dtype=np.complex128)
        matrices[0] = vector.reshape(d, d)
        for k, gap in enumerate(gaps, start=1):
            step = self.step(gaps[0] if uniform else gap)
            vector = step @ vector
            matrices[k] = vector.reshape(d, d)
        return finalize_states(times, matrices, 'lindblad superop_exp')


def lindblad_evolve(p, rates, rho0, t, method=METHOD_SUPEROP_EXP):
    """
    rho(t) under pure dephasing.

    Raises:
        InvalidStateError: if rho0 is not a valid density matrix
        IntegrationError: if the RK4 path cannot reach agreement
    """
    rho0 = valid_state(rho0)
    if t < 0:
        raise ValueError(f't must be >= 0, got {t}')
    liouvillian = lindblad_liouvillian(p, rates)
    if method == METHOD_SUPEROP_EXP:
        return LindbladPropagator(liouvillian).evolve(rho0, t)
    if method == METHOD_RK4:
        h_norm = float(np.linalg.norm(hamiltonian(p), 2))
        vector = rk4(lambda v: liouvillian @ v, rho0.to_vector(), t, h_norm + rates.total)
        d = rho0.dimension
        return finalize_states(np.array([t]), vector.reshape(1, d, d), 'lindblad rk4').final
    raise ValueError(
        f'Unknown Lindblad method {method!r}; expected {METHOD_SUPEROP_EXP} or {METHOD_RK4}'
    )
