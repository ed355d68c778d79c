import logging

import numpy as np
from celery import shared_task

from apps.opensys.fidelity import SOLVER_LINDBLAD, fidelity_experiment
from apps.opensys.states import DephasingRates, MilburnRate
from apps.spinchain.params import ChainParams

logger = logging.getLogger(__name__)


def compute_fidelity_point(kind, solver, chain, rate, alpha='(1+0j)', beta='0j', n_points=2001,
                           allow_detuned_transfer=False, allow_general_transfer_input=False):
    """
    One point of a decoherence sweep: the fidelity trace of ``kind`` under
    ``solver`` at a single rate.

    Arguments and result are JSON-serializable so the same call runs in a
    thread or on a Celery worker. ``chain`` is ChainParams.to_dict(); alpha
    and beta are complex literals.
    """
    params = ChainParams(**chain)
    if solver == SOLVER_LINDBLAD:
        rate_object = DephasingRates.uniform(rate, params.n_sites)
    else:
        rate_object = MilburnRate(rate)
    trace = fidelity_experiment(
        kind, solver, params, rate_object,
        alpha=complex(alpha), beta=complex(beta), n_points=n_points,
        allow_detuned_transfer=allow_detuned_transfer,
        allow_general_transfer_input=allow_general_transfer_input,
    )
    diagnostics = {
        name: bool(value) if isinstance(value, (bool, np.bool_)) else float(value)
        for name, value in trace.diagnostics.items()
    }
    return {
        'kind': kind,
        'solver': solver,
        'rate': float(rate),
        'report_time': float(trace.report_time),
        'report_fidelity': trace.report_fidelity,
        'times': trace.times.tolist(),
        'fidelity': trace.fidelity.tolist(),
        'diagnostics': diagnostics,
    }


@shared_task(bind=True)
def run_fidelity_point(self, **point):
    """Celery entry point for compute_fidelity_point."""
    try:
        return compute_fidelity_point(**point)
    except Exception:
        logger.exception('Sweep point %s/%s rate=%s failed', point.get('kind'), point.get('solver'), point.get('rate'))
        raise
