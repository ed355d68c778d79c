"""
Numerical propagation of pure states by the matrix exponential of H.
"""
import logging

import numpy as np

from apps.qmatrix.eigen import eigh
from apps.qmatrix.expm import MINUS_I, expm_hermitian_generator
from apps.spinchain.operators import hamiltonian
from apps.spinchain.params import ChainParams
from apps.spinchain.states import UP, DOWN, BasisLabel, PureState, basis_state, check_normalized, product_state

from . import analytic
from .traces import ProbabilityTrace

logger = logging.getLogger(__name__)

WEIGHTING_SOURCE = 'source'
WEIGHTING_PRINTED = 'printed'
WEIGHTING_CHOICES = (
    (WEIGHTING_SOURCE, '|beta|^2 + p_source |alpha|^2 (alpha on the excited source)'),
    (WEIGHTING_PRINTED, '|alpha|^2 + p_source |beta|^2 (roles of alpha and beta swapped)'),
)


def propagator(p, t):
    """U(t) = exp(-iHt)"""
    return expm_hermitian_generator(hamiltonian(p), t, MINUS_I)


def evolve(p, psi0, t):
    """U(t) psi0 as a new PureState."""
    if not isinstance(psi0, PureState):
        psi0 = PureState(psi0)
    if t == 0:
        return PureState(psi0.amplitudes.copy())
    return PureState(propagator(p, t) @ psi0.amplitudes)


def evolve_grid(p, psi0, times):
    """
    Amplitudes of U(t) psi0 for every t in ``times``.

    H is diagonalized once; each row of the result is the state at one time.
    """
    if not isinstance(psi0, PureState):
        psi0 = PureState(psi0)
    times = np.asarray(times, dtype=float).reshape(-1)
    decomposition = eigh(hamiltonian(p))
    v = decomposition.eigenvectors
    coefficients = np.conjugate(v.T) @ psi0.amplitudes
    phases = np.exp(-1j * np.outer(times, decomposition.eigenvalues))
    return (phases * coefficients) @ v.T


def site_excitation(p, site):
    """Basis label with a single up spin on ``site``."""
    return BasisLabel(tuple(UP if k == site else DOWN for k in range(p.n_sites)))


def transition_probability(p, initial, final, times):
    """|<final|U(t)|initial>|^2 over ``times``."""
    start = initial if isinstance(initial, PureState) else basis_state(initial)
    end = final if isinstance(final, PureState) else basis_state(final)
    amplitudes = evolve_grid(p, start, times) @ np.conjugate(end.amplitudes)
    return np.abs(amplitudes) ** 2


def blockade_probability(alpha, beta, j, delta, t, omega0=0.0):
    """
    Survival probability |<psi0|U(t)|psi0>|^2 of psi0 = alpha|udd> + beta|ddd>,
    computed on the full 8-dimensional space.

    Raises:
        NormalizationError: if |alpha|^2 + |beta|^2 differs from 1 by more than 1e-10
    """
    psi0 = product_state(alpha=alpha, beta=beta, n_sites=3)
    params = ChainParams(n_sites=3, omega0=omega0, delta=delta, coupling_j=j)
    scalar = np.ndim(t) == 0
    states = evolve_grid(params, psi0, np.atleast_1d(t))
    survival = np.abs(states @ np.conjugate(psi0.amplitudes)) ** 2
    return float(survival[0]) if scalar else survival


def blockade_decomposition(alpha, beta, p_source, weighting=WEIGHTING_SOURCE):
    """
    Survival written as a mixture of the source probability and a constant.

    The 'source' weighting puts |alpha|^2 on p_source because alpha multiplies
    the excited source; 'printed' swaps the roles. Both drop the cross phase
    between |udd> and |ddd>, so they coincide with the true survival only when
    one of alpha, beta vanishes.
    """
    check_normalized(alpha, beta)
    a2, b2 = abs(alpha) ** 2, abs(beta) ** 2
    p_source = np.asarray(p_source, dtype=float)
    if weighting == WEIGHTING_SOURCE:
        return b2 + p_source * a2
    if weighting == WEIGHTING_PRINTED:
        return a2 + p_source * b2
    raise ValueError(f'Unknown weighting {weighting!r}')


def blockade_weighting_deviations(alpha, beta, j, delta, times, omega0=0.0):
    """max |decomposition - numeric survival| for each weighting."""
    numeric = blockade_probability(alpha, beta, j, delta, np.atleast_1d(times), omega0=omega0)
    p_source = analytic.p_source_analytic(j, delta, np.atleast_1d(times))
    deviations = {
        weighting: float(np.max(np.abs(blockade_decomposition(alpha, beta, p_source, weighting) - numeric)))
        for weighting, _ in WEIGHTING_CHOICES
    }
    logger.debug('Blockade weighting deviations (alpha=%s, beta=%s): %s', alpha, beta, deviations)
    return deviations


def probability_trace(p, times, alpha=1.0, beta=0.0):
    """
    Numeric ProbabilityTrace: source, gate and drain probabilities for the
    excitation starting on the source, and the survival of alpha|u..d> + beta|d..d>.
    """
    times = np.asarray(times, dtype=float).reshape(-1)
    start = basis_state(site_excitation(p, p.source_site))
    states = evolve_grid(p, start, times)
    probabilities = np.abs(states) ** 2

    psi0 = product_state(alpha=alpha, beta=beta, n_sites=p.n_sites)
    survival = np.abs(evolve_grid(p, psi0, times) @ np.conjugate(psi0.amplitudes)) ** 2

    return ProbabilityTrace(
        times=times,
        p_source=probabilities[:, site_excitation(p, p.source_site).index],
        p_gate=probabilities[:, site_excitation(p, p.gate_site).index],
        p_drain=probabilities[:, site_excitation(p, p.drain_site).index],
        p_blockade_total=survival,
    )


def analytic_probability_trace(p, times, alpha=1.0, beta=0.0):
    """Closed-form counterpart of probability_trace (three sites only)."""
    if p.n_sites != 3 or p.gate_site != 1:
        raise ValueError('Closed forms exist only for three sites with the gate in the middle')
    times = np.asarray(times, dtype=float).reshape(-1)
    check_normalized(alpha, beta)
    return ProbabilityTrace(
        times=times,
        p_source=analytic.p_source_analytic(p.coupling_j, p.delta, times),
        p_gate=analytic.p_gate_analytic(p.coupling_j, p.delta, times),
        p_drain=analytic.p_drain_analytic(p.coupling_j, p.delta, times),
        p_blockade_total=analytic.survival_probability_analytic(
            alpha, beta, p.coupling_j, p.delta, times, omega0=p.omega0
        ),
    )
