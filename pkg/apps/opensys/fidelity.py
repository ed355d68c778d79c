"""
Pure-target fidelity F = sqrt(<psi_tar|rho|psi_tar>) and the transfer and
blockade experiments scored with it.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from apps.spinchain.states import PureState, product_state
from apps.unitary.analytic import all_down_phase, drain_amplitude_analytic
from apps.unitary.timescales import transfer_time, transfer_times

from .exceptions import ExperimentConfigurationError, InvalidStateError
from .lindblad import LindbladPropagator
from .milburn import MilburnPropagator
from .states import DensityMatrix, DephasingRates, MilburnRate

logger = logging.getLogger(__name__)

KIND_TRANSFER = 'transfer'
KIND_BLOCKADE = 'blockade'
KIND_CHOICES = (
    (KIND_TRANSFER, 'Open gate: source state moved to the drain, scored at tau_T'),
    (KIND_BLOCKADE, 'Closed gate: source state held in place, scored at tau_B'),
)

SOLVER_LINDBLAD = 'lindblad'
SOLVER_MILBURN = 'milburn'
SOLVER_CHOICES = (
    (SOLVER_LINDBLAD, 'Pure dephasing, rate lambda in rad/s on every site'),
    (SOLVER_MILBURN, 'Intrinsic decoherence, gamma in seconds'),
)

NOISE_FLOOR = -1e-9
INVALID_BELOW = -1e-6
FIDELITY_SLACK = 1e-9
DEFAULT_POINTS = 2001


def _clamped_overlap(values):
    values = np.asarray(values, dtype=float)
    lowest = float(np.min(values)) if values.size else 0.0
    if lowest < INVALID_BELOW:
        raise InvalidStateError(f'<psi|rho|psi> = {lowest:.3e} is negative beyond numerical noise')
    if lowest < NOISE_FLOOR:
        logger.warning('Clamping <psi|rho|psi> = %.3e to 0', lowest)
    return np.clip(values, 0.0, None)


def bures_fidelity(target, rho):
    """
    sqrt(<psi_tar|rho|psi_tar>).

    Raises:
        InvalidStateError: if the overlap is below -1e-6
    """
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    return float(np.sqrt(_clamped_overlap(rho.expectation(target))))


def bures_fidelities(target, states):
    """bures_fidelity for every state of a DensityTrace."""
    return np.sqrt(_clamped_overlap(states.expectations(target)))


@dataclass(frozen=True)
class FidelityTrace:
    times: np.ndarray
    fidelity: np.ndarray
    kind: str = KIND_TRANSFER
    solver: str = SOLVER_LINDBLAD
    rate: float = 0.0
    report_time: float = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        fidelity = np.asarray(self.fidelity, dtype=float).reshape(-1)
        if times.size != fidelity.size:
            raise InvalidStateError(f'{times.size} times but {fidelity.size} fidelity values')
        if fidelity.size and (np.min(fidelity) < -FIDELITY_SLACK or np.max(fidelity) > 1.0 + FIDELITY_SLACK):
            raise InvalidStateError('Fidelity leaves [0, 1]')
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'fidelity', fidelity)
        if self.report_time is None and times.size:
            object.__setattr__(self, 'report_time', float(times[-1]))

    def __len__(self):
        return self.times.size

    @property
    def report_fidelity(self):
        """Fidelity at report_time, interpolated on the grid."""
        return float(np.interp(self.report_time, self.times, self.fidelity))


@dataclass(frozen=True)
class ExperimentSetup:
    params: object
    initial: PureState
    target: PureState
    report_time: float


def transfer_phase(params, t):
    """
    Relative phase the closed chain puts between |ddu> and |ddd> when it
    moves |udd> to the drain in time t. Targets for a general source state
    carry it so that an ideal transfer scores 1.
    """
    moved = np.exp(1j * params.omega0 * t) * complex(drain_amplitude_analytic(params.coupling_j, params.delta, t))
    ground = complex(all_down_phase(params.omega0, params.delta, t))
    ratio = moved / ground
    return ratio / abs(ratio) if abs(ratio) > 0 else 1.0 + 0j


def experiment_setup(kind, params, alpha=1.0, beta=0.0, allow_detuned_transfer=False,
                     allow_general_transfer_input=False):
    """
    Initial state, target and report time of a transfer or blockade run.

    Blockade: input and target are alpha|u> + beta|d> on the source with the
    gate and drain down, reported at the 0.999 blockade window. Transfer:
    the same input, target alpha c|ddu> + beta|ddd> with c from
    transfer_phase, reported at tau_T.

    Raises:
        ExperimentConfigurationError: for a setup the experiment does not define
    """
    problems = []
    if params.n_sites != 3 or params.gate_site != 1:
        problems.append('experiments need three sites with the gate in the middle')
    if params.coupling_j <= 0:
        problems.append('experiments need coupling_j > 0')
    if kind == KIND_TRANSFER:
        if params.delta != 0 and not allow_detuned_transfer:
            problems.append(f'transfer runs at delta = 0 (got {params.delta}); set allow_detuned_transfer to override')
        if not (complex(alpha) == 1 and complex(beta) == 0) and not allow_general_transfer_input:
            problems.append('transfer uses alpha = 1, beta = 0; set allow_general_transfer_input for other inputs')
    elif kind == KIND_BLOCKADE:
        if params.delta == 0:
            problems.append('blockade needs a detuned gate (delta != 0)')
    else:
        problems.append(f'unknown experiment kind {kind!r}')
    if problems:
        raise ExperimentConfigurationError('; '.join(problems))

    initial = product_state(alpha=alpha, beta=beta, n_sites=3)
    report = report_time(kind, params)
    if kind == KIND_BLOCKADE:
        return ExperimentSetup(params, initial, initial, report)

    drained = product_state(alpha=alpha * transfer_phase(params, report), beta=beta, n_sites=3, site=2)
    return ExperimentSetup(params, initial, drained, report)


def evolve_states(solver, params, rate, rho0, times):
    """DensityTrace from the production path of ``solver``."""
    if solver == SOLVER_LINDBLAD:
        rates = rate if isinstance(rate, DephasingRates) else DephasingRates.uniform(rate, params.n_sites)
        return LindbladPropagator.for_chain(params, rates).evolve_grid(rho0, times)
    if solver == SOLVER_MILBURN:
        milburn_rate = rate if isinstance(rate, MilburnRate) else MilburnRate(float(rate))
        return MilburnPropagator.for_chain(params, milburn_rate).evolve_grid(rho0, times)
    raise ExperimentConfigurationError(f'unknown solver {solver!r}')


def rate_value(rate):
    if isinstance(rate, DephasingRates):
        return float(rate.lambdas[0]) if np.all(rate.lambdas == rate.lambdas[0]) else rate.total
    if isinstance(rate, MilburnRate):
        return rate.gamma
    return float(rate)


def fidelity_experiment(kind, solver, params, rate, alpha=1.0, beta=0.0, times=None,
                        n_points=DEFAULT_POINTS, allow_detuned_transfer=False,
                        allow_general_transfer_input=False):
    """
    Fidelity of a transfer or blockade run under one decoherence model.

    ``rate`` is a uniform lambda (rad/s) or DephasingRates for lindblad and a
    gamma (s) or MilburnRate for milburn. Without ``times`` the grid spans
    [0, report time] with ``n_points`` points.
    """
    setup = experiment_setup(
        kind, params, alpha, beta,
        allow_detuned_transfer=allow_detuned_transfer,
        allow_general_transfer_input=allow_general_transfer_input,
    )
    if times is None:
        times = np.linspace(0.0, setup.report_time, n_points)
    states = evolve_states(solver, params, rate, DensityMatrix.from_pure(setup.initial), times)
    trace = FidelityTrace(
        times=times,
        fidelity=bures_fidelities(setup.target, states),
        kind=kind,
        solver=solver,
        rate=rate_value(rate),
        report_time=setup.report_time,
        diagnostics=dict(states.diagnostics),
    )
    logger.debug(
        '%s/%s rate=%g: fidelity %.9f at t=%.6e s', kind, solver, trace.rate,
        trace.report_fidelity, trace.report_time,
    )
    return trace


def report_time(kind, params):
    """tau_T for transfer, the blockade scan for blockade."""
    if kind == KIND_TRANSFER:
        return transfer_time(params.coupling_j)
    if kind == KIND_BLOCKADE:
        return transfer_times(params.coupling_j, params.delta).tau_blockade_scan
    raise ExperimentConfigurationError(f'unknown experiment kind {kind!r}')
