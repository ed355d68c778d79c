"""
The canonical experiments. Each runner writes its CSVs into ``out_dir`` and
records what it measured on the RunManifest; run_scenario adds the manifest
file and decides whether the run failed.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from celery import group
from django.conf import settings

from apps.opensys.fidelity import KIND_BLOCKADE, KIND_TRANSFER
from apps.spinchain.params import ChainParams
from apps.unitary.analytic import p_source_analytic, p_source_expansion
from apps.unitary.propagation import analytic_probability_trace, probability_trace, site_excitation, transition_probability

from .exceptions import ToleranceFailure
from .reporting import RunManifest, write_csv
from .serializers import (
    EXECUTOR_CELERY, SCENARIO_CHOICES, SCENARIO_CLOSED_GATE, SCENARIO_CUSTOM, SCENARIO_LINDBLAD_SWEEP,
    SCENARIO_MILBURN_SWEEP, SCENARIO_OPEN_GATE,
)
from .tasks import compute_fidelity_point, run_fidelity_point

logger = logging.getLogger(__name__)

AGREEMENT_TOL = 1e-9
MONOTONE_SLACK = 1e-12


def run_closed_gate(config, out_dir, manifest):
    """
    Source probability against the dimensionless delta*t for every
    configured J/delta, exact and from the weak-coupling expansion.
    """
    delta_t = np.linspace(0.0, config.delta_t_max, config.n_points)
    ratio_column, time_column, exact_column, expansion_column = [], [], [], []
    for ratio in config.j_over_delta:
        exact = p_source_analytic(ratio, 1.0, delta_t)
        expansion = p_source_expansion(ratio, 1.0, delta_t)
        chain = ChainParams(coupling_j=ratio, delta=1.0)
        source = site_excitation(chain, chain.source_site)
        numeric = transition_probability(chain, source, source, delta_t)

        manifest.record_metric(f'expansion_max_diff_j_over_delta_{ratio!r}', float(np.max(np.abs(exact - expansion))))
        manifest.record_metric(
            f'numeric_max_diff_j_over_delta_{ratio!r}', float(np.max(np.abs(exact - numeric))), AGREEMENT_TOL,
        )
        ratio_column.append(np.full(delta_t.size, ratio))
        time_column.append(delta_t)
        exact_column.append(exact)
        expansion_column.append(expansion)

    columns = {
        'j_over_delta': np.concatenate(ratio_column),
        'delta_t_dimensionless': np.concatenate(time_column),
        'p_exact_eq5': np.concatenate(exact_column),
        'p_expansion_eq6': np.concatenate(expansion_column),
    }
    write_csv(Path(out_dir) / 'closed_gate.csv', columns, probabilities=('p_exact_eq5',), manifest=manifest)


def run_open_gate(config, out_dir, manifest):
    """Source, gate and drain probabilities of the resonant (open-gate) transfer."""
    params = config.params
    if params.delta != 0 and not config.allow_detuned_transfer:
        logger.warning('open-gate runs at delta = 0; ignoring delta = %g (set options.allow_detuned_transfer to keep it)', params.delta)
        params = params.replace(delta=0.0)

    times = config.time_grid.times()
    trace = probability_trace(params, times)
    manifest.record_metric('conservation_residual', trace.conservation_residual(), AGREEMENT_TOL)
    if params.n_sites == 3 and params.gate_site == 1:
        closed_form = analytic_probability_trace(params, times)
        difference = max(
            float(np.max(np.abs(getattr(trace, name) - getattr(closed_form, name))))
            for name in ('p_source', 'p_gate', 'p_drain')
        )
        manifest.record_metric('analytic_max_diff', difference, AGREEMENT_TOL)

    columns = {
        't_seconds': times,
        'Jt_dimensionless': params.coupling_j * times,
        'p_source': trace.p_source,
        'p_gate': trace.p_gate,
        'p_drain': trace.p_drain,
    }
    write_csv(
        Path(out_dir) / 'open_gate.csv', columns,
        probabilities=('p_source', 'p_gate', 'p_drain'), manifest=manifest,
    )


def sweep_points(config):
    """JSON-serializable arguments of every (kind, rate) point, kinds outermost."""
    points = []
    for kind in config.kinds:
        params = config.params
        if kind == KIND_TRANSFER and not config.allow_detuned_transfer:
            params = params.replace(delta=0.0)
        for rate in config.rates:
            points.append({
                'kind': kind,
                'solver': config.rate_family,
                'chain': params.to_dict(),
                'rate': rate,
                'alpha': repr(complex(config.alpha)),
                'beta': repr(complex(config.beta)),
                'n_points': config.n_points,
                'allow_detuned_transfer': config.allow_detuned_transfer,
                'allow_general_transfer_input': config.allow_general_transfer_input,
            })
    return points


def execute_points(points, executor):
    """
    Results of compute_fidelity_point for every point, in the order given.

    ``celery`` dispatches a group to the workers; anything else uses a thread
    pool bounded by SWEEP_MAX_WORKERS.
    """
    if executor == EXECUTOR_CELERY:
        return group(run_fidelity_point.s(**point) for point in points).apply_async().get()

    max_workers = getattr(settings, 'SWEEP_MAX_WORKERS', 4)
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = [pool.submit(compute_fidelity_point, **point) for point in points]
        results = []
        for point, future in zip(points, futures):
            try:
                results.append(future.result())
            except Exception:
                logger.exception('Sweep point %s/%s rate=%g failed', point['kind'], point['solver'], point['rate'])
                raise
        return results


def is_non_increasing(rates, values):
    """True if ``values`` never grow as the rate grows."""
    order = np.argsort(np.asarray(rates, dtype=float), kind='stable')
    return bool(np.all(np.diff(np.asarray(values, dtype=float)[order]) <= MONOTONE_SLACK))


def blockade_crossover(rates, blockade, transfer):
    """Smallest rate from which blockade fidelity stays >= transfer fidelity, or None."""
    order = np.argsort(np.asarray(rates, dtype=float), kind='stable')
    rates = np.asarray(rates, dtype=float)[order]
    ahead = np.asarray(blockade, dtype=float)[order] >= np.asarray(transfer, dtype=float)[order]
    if not ahead[-1]:
        return None
    behind = np.flatnonzero(~ahead)
    return rates[behind[-1] + 1] if behind.size else rates[0]


def run_decoherence_sweep(config, out_dir, manifest):
    """
    Transfer and blockade fidelities for every configured rate: one CSV per
    (kind, rate) and a summary of the fidelity at each kind's report time.
    """
    family = config.rate_family
    points = sweep_points(config)
    logger.info('Running %d %s sweep point(s) with the %s executor', len(points), family, config.executor)
    results = execute_points(points, config.executor)

    summary = {'rate': np.asarray(config.rates, dtype=float)}
    for kind in config.kinds:
        kind_results = [result for result in results if result['kind'] == kind]
        for index, result in enumerate(kind_results):
            manifest.record_states(result['diagnostics'])
            columns = {'t_seconds': result['times'], 'fidelity': result['fidelity']}
            write_csv(
                Path(out_dir) / f'{family}_{kind}_{index:02d}.csv', columns,
                probabilities=('fidelity',), manifest=manifest,
            )
        fidelities = [result['report_fidelity'] for result in kind_results]
        summary[f'{kind}_fidelity'] = fidelities
        manifest.record_metric(f'{kind}_report_time', kind_results[0]['report_time'] if kind_results else 0.0)

        monotone = is_non_increasing(config.rates, fidelities)
        manifest.record_metric(f'{kind}_summary_monotone', monotone)
        if not monotone:
            logger.warning('%s fidelity is not non-increasing in the %s rate: %s', kind, family, fidelities)

    if KIND_TRANSFER in config.kinds and KIND_BLOCKADE in config.kinds:
        threshold = blockade_crossover(
            config.rates, summary[f'{KIND_BLOCKADE}_fidelity'], summary[f'{KIND_TRANSFER}_fidelity'],
        )
        manifest.record_metric('blockade_beats_transfer_from_rate', 'none' if threshold is None else float(threshold))
        logger.info('Blockade fidelity >= transfer fidelity from %s rate %s on', family, threshold)

    write_csv(
        Path(out_dir) / f'{family}_summary.csv', summary,
        probabilities=tuple(name for name in summary if name != 'rate'), manifest=manifest,
    )


def run_custom(config, out_dir, manifest):
    """Unitary probability trace for the configured chain, input and grid."""
    params = config.params
    times = config.time_grid.times()
    trace = probability_trace(params, times, alpha=config.alpha, beta=config.beta)
    if params.n_sites == 3:
        manifest.record_metric('conservation_residual', trace.conservation_residual(), AGREEMENT_TOL)
    if params.n_sites == 3 and params.gate_site == 1:
        closed_form = analytic_probability_trace(params, times, alpha=config.alpha, beta=config.beta)
        difference = max(
            float(np.max(np.abs(getattr(trace, name) - getattr(closed_form, name))))
            for name in trace.probability_columns
        )
        manifest.record_metric('analytic_max_diff', difference, AGREEMENT_TOL)

    columns = {'t_seconds': times}
    columns.update((name, getattr(trace, name)) for name in trace.probability_columns)
    write_csv(Path(out_dir) / 'custom.csv', columns, probabilities=trace.probability_columns, manifest=manifest)


RUNNERS = {
    SCENARIO_CLOSED_GATE: run_closed_gate,
    SCENARIO_OPEN_GATE: run_open_gate,
    SCENARIO_LINDBLAD_SWEEP: run_decoherence_sweep,
    SCENARIO_MILBURN_SWEEP: run_decoherence_sweep,
    SCENARIO_CUSTOM: run_custom,
}
SCENARIO_DESCRIPTIONS = dict(SCENARIO_CHOICES)


def output_dir(config, out_dir=None):
    if out_dir:
        return Path(out_dir)
    if config.output_path:
        return Path(config.output_path)
    return Path(getattr(settings, 'TRANSISTOR_OUTPUT_DIR', 'output')) / config.scenario


def run_scenario(config, out_dir=None):
    """
    Run the configured scenario and write its CSVs and manifest.

    Raises:
        ToleranceFailure: after writing, if the manifest is flagged failed
        OSError: if the output directory or a file cannot be written
    """
    out_dir = output_dir(config, out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(scenario=config.scenario, config_echo=config.echo(), config_sha256=config.sha256)

    logger.info('Starting %s into %s', config.scenario, out_dir)
    started = time.perf_counter()
    RUNNERS[config.scenario](config, out_dir, manifest)
    manifest.wall_clock_seconds = time.perf_counter() - started
    path = manifest.write(out_dir)
    logger.info('Finished %s in %.3f s', config.scenario, manifest.wall_clock_seconds)

    failures = manifest.failures()
    if failures:
        raise ToleranceFailure(failures, manifest_path=path)
    return manifest
