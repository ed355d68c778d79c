"""
Intrinsic decoherence

    d(rho)/dt = -i [H, rho] - (gamma / 2) [H, [H, rho]]

For a time-independent H the equation is diagonal in the energy eigenbasis:
rho'_mn(t) = rho'_mn(0) exp(-i w_mn t - (gamma / 2) w_mn^2 t), w_mn = E_m - E_n.
"""
import logging

import numpy as np

from apps.qmatrix.eigen import eigh
from apps.qmatrix.linalg import commutator, dagger
from apps.spinchain.operators import hamiltonian

from .integrators import rk4
from .lindblad import finalize_states
from .states import valid_state

logger = logging.getLogger(__name__)

METHOD_CLOSED_FORM = 'closed_form'
METHOD_RK4 = 'rk4'
METHOD_CHOICES = (
    (METHOD_CLOSED_FORM, 'Exact damping of coherences in the energy eigenbasis'),
    (METHOD_RK4, 'Classical Runge-Kutta on the master equation'),
)


class MilburnPropagator:
    """Diagonalizes H once and evaluates the closed form on any grid."""

    def __init__(self, h, gamma):
        if gamma < 0:
            raise ValueError(f'gamma must be >= 0, got {gamma}')
        self.gamma = float(gamma)
        decomposition = eigh(h)
        self.energies = decomposition.eigenvalues
        self.basis = decomposition.eigenvectors
        self.gaps = self.energies[:, None] - self.energies[None, :]
        logger.debug('Milburn propagator: dim=%d gamma=%.3e max gap=%.3e', self.energies.size, self.gamma, float(np.max(np.abs(self.gaps))))

    @classmethod
    def for_chain(cls, p, rate):
        return cls(hamiltonian(p), rate.gamma)

    def to_eigenbasis(self, matrix):
        return dagger(self.basis) @ matrix @ self.basis

    def evolve_grid(self, rho0, times):
        rho0 = valid_state(rho0)
        times = np.asarray(times, dtype=float).reshape(-1)
        if np.any(times < 0):
            raise ValueError('times must be >= 0')
        rotated = self.to_eigenbasis(rho0.matrix)
        exponent = -1j * self.gaps - 0.5 * self.gamma * self.gaps ** 2
        factors = np.exp(times[:, None, None] * exponent[None, :, :])
        matrices = self.basis @ (factors * rotated) @ dagger(self.basis)
        return finalize_states(times, matrices, 'milburn closed_form')

    def evolve(self, rho0, t):
        return self.evolve_grid(rho0, [t]).final


def milburn_generator(h, gamma):
    """The right-hand side rho -> -i[H, rho] - (gamma/2)[H, [H, rho]]."""
    def rhs(rho):
        inner = commutator(h, rho)
        return -1j * inner - 0.5 * gamma * commutator(h, inner)
    return rhs


def milburn_evolve(p, rate, rho0, t, method=METHOD_CLOSED_FORM):
    """
    rho(t) under intrinsic decoherence.

    Raises:
        InvalidStateError: if rho0 is not a valid density matrix
        IntegrationError: if the RK4 path cannot reach agreement
    """
    rho0 = valid_state(rho0)
    if t < 0:
        raise ValueError(f't must be >= 0, got {t}')
    h = hamiltonian(p)
    if method == METHOD_CLOSED_FORM:
        return MilburnPropagator(h, rate.gamma).evolve(rho0, t)
    if method == METHOD_RK4:
        h_norm = float(np.linalg.norm(h, 2))
        scale = 2.0 * h_norm + 2.0 * rate.gamma * h_norm ** 2
        matrix = rk4(milburn_generator(h, rate.gamma), rho0.matrix, t, scale)
        return finalize_states(np.array([t]), matrix[None, :, :], 'milburn rk4').final
    raise ValueError(f'Unknown Milburn method {method!r}; expected {METHOD_CLOSED_FORM} or {METHOD_RK4}')


def milburn_trace(p, rate, rho0, times):
    """Closed-form states on a whole grid as a DensityTrace."""
    return MilburnPropagator.for_chain(p, rate).evolve_grid(rho0, times)


def eigenbasis_populations(h, rho):
    """diag(V^H rho V) in ascending-energy order."""
    basis = eigh(h).eigenvectors
    matrix = rho.matrix if hasattr(rho, 'matrix') else np.asarray(rho)
    return np.real(np.diag(dagger(basis) @ matrix @ basis))
