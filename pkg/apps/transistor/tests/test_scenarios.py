import configparser
import json
import math
import tempfile
from io import StringIO
from pathlib import Path
from unittest.mock import MagicMock, patch

import numpy as np
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from apps.spinchain.params import ChainParams
from apps.transistor.config import validate_config
from apps.transistor.reporting import RunManifest, calculate_data_hash, clamp_probabilities, format_number
from apps.transistor.scenarios import blockade_crossover, is_non_increasing, run_scenario
from apps.transistor.tasks import compute_fidelity_point, run_fidelity_point

EXPERIMENTS = Path(settings.BASE_DIR) / 'experiments'
SCENARIO_FILES = {
    'closed-gate': 'closed_gate.ini',
    'open-gate': 'open_gate.ini',
    'lindblad-sweep': 'lindblad_sweep.ini',
    'milburn-sweep': 'milburn_sweep.ini',
    'custom': 'custom.ini',
}


def read_table(path):
    with open(path, encoding='utf-8') as handle:
        header = handle.readline().rstrip('\n').split(',')
    return header, np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)


def read_manifest(out_dir):
    parser = configparser.ConfigParser(interpolation=None)
    parser.read(Path(out_dir) / 'manifest.ini')
    return parser


class WorkspaceMixin:
    def make_dir(self):
        workspace = tempfile.TemporaryDirectory()
        self.addCleanup(workspace.cleanup)
        return Path(workspace.name)

    def simulate(self, scenario, out_dir, *overrides):
        call_command(
            'simulate', scenario, config=str(EXPERIMENTS / SCENARIO_FILES[scenario]), out=str(out_dir),
            override=list(overrides), stdout=StringIO(),
        )
        return out_dir


class ReportingTests(SimpleTestCase):
    def test_number_format(self):
        self.assertEqual(format_number(1 / 3), '3.33333333333e-01')
        self.assertEqual(format_number(-0.0), '0.00000000000e+00')
        self.assertEqual(format_number(1e6), '1.00000000000e+06')

    def test_clamp_records_deviation(self):
        clipped, deviation = clamp_probabilities([-1e-12, 0.5, 1.0 + 2e-12])
        np.testing.assert_array_equal(clipped, [0.0, 0.5, 1.0])
        self.assertAlmostEqual(deviation, 2e-12, delta=1e-15)

    def test_data_hash_ignores_key_order(self):
        self.assertEqual(calculate_data_hash({'a': 1, 'b': 2}), calculate_data_hash({'b': 2, 'a': 1}))

    def test_manifest_flags_failures(self):
        manifest = RunManifest(scenario='custom', config_echo={}, config_sha256='0')
        self.assertEqual(manifest.status, 'ok')
        manifest.record_states({'trace_deviation': 1e-12, 'hermiticity_deviation': 1e-13, 'min_eigenvalue': -1e-6})
        manifest.record_metric('conservation_residual', 1e-6, 1e-9)
        failures = manifest.failures()
        self.assertEqual(len(failures), 2)
        self.assertEqual(manifest.status, 'failed')

    def test_summary_helpers(self):
        self.assertTrue(is_non_increasing([10.0, 0.0, 1.0], [0.5, 1.0, 0.9]))
        self.assertFalse(is_non_increasing([0.0, 1.0], [0.9, 1.0]))
        self.assertEqual(blockade_crossover([0.0, 1.0, 10.0], [0.99, 0.98, 0.97], [1.0, 0.95, 0.9]), 1.0)
        self.assertIsNone(blockade_crossover([0.0, 1.0], [0.9, 0.8], [1.0, 0.9]))


class FidelityPointTests(SimpleTestCase):
    POINT = {
        'kind': 'transfer',
        'solver': 'lindblad',
        'chain': ChainParams(coupling_j=1e3).to_dict(),
        'rate': 10.0,
        'n_points': 21,
    }

    def test_result_is_json_serializable(self):
        result = compute_fidelity_point(**self.POINT)
        json.dumps(result)
        self.assertEqual(len(result['times']), 21)
        self.assertAlmostEqual(result['report_time'], math.pi / (math.sqrt(2) * 1e3), places=15)
        self.assertLess(result['report_fidelity'], 1.0)

    def test_celery_task_matches_direct_call(self):
        eager = run_fidelity_point.apply(kwargs=self.POINT).get()
        self.assertEqual(eager, compute_fidelity_point(**self.POINT))


class SimulateCommandTests(WorkspaceMixin, SimpleTestCase):
    def test_every_shipped_scenario_is_deterministic(self):
        for scenario in SCENARIO_FILES:
            first = self.simulate(scenario, self.make_dir())
            second = self.simulate(scenario, self.make_dir())
            names = sorted(path.name for path in first.glob('*.csv'))
            self.assertTrue(names, msg=scenario)
            self.assertEqual(names, sorted(path.name for path in second.glob('*.csv')))
            for name in names:
                self.assertEqual((first / name).read_bytes(), (second / name).read_bytes(), msg=f'{scenario}/{name}')
                self.assertNotIn(b'\r', (first / name).read_bytes())
            self.assertEqual(read_manifest(first)['run']['status'], 'ok', msg=scenario)

    def test_open_gate_rows(self):
        out_dir = self.simulate('open-gate', self.make_dir())
        header, rows = read_table(out_dir / 'open_gate.csv')
        self.assertEqual(header, ['t_seconds', 'Jt_dimensionless', 'p_source', 'p_gate', 'p_drain'])
        self.assertEqual(len(rows), 2001)
        np.testing.assert_allclose(rows[:, 2:].sum(axis=1), 1.0, atol=1e-9)
        np.testing.assert_allclose(rows[0, 2:], [1.0, 0.0, 0.0], atol=1e-12)
        self.assertAlmostEqual(rows[500, 1], math.pi / (2 * math.sqrt(2)), places=9)
        np.testing.assert_allclose(rows[500, 2:], [0.25, 0.5, 0.25], atol=1e-9)
        self.assertAlmostEqual(rows[1000, 1], math.pi / math.sqrt(2), places=9)
        self.assertAlmostEqual(rows[1000, 4], 1.0, delta=1e-9)

    def test_open_gate_forces_zero_detuning(self):
        with self.assertLogs('apps.transistor.scenarios', level='WARNING'):
            out_dir = self.simulate('open-gate', self.make_dir(), 'chain.delta=1e6')
        _, rows = read_table(out_dir / 'open_gate.csv')
        self.assertAlmostEqual(rows[1000, 4], 1.0, delta=1e-9)

    def test_closed_gate_curves(self):
        out_dir = self.simulate('closed-gate', self.make_dir())
        header, rows = read_table(out_dir / 'closed_gate.csv')
        self.assertEqual(header, ['j_over_delta', 'delta_t_dimensionless', 'p_exact_eq5', 'p_expansion_eq6'])
        self.assertEqual(len(rows), 3 * 2001)
        starts = rows[rows[:, 1] == 0.0]
        np.testing.assert_array_equal(starts[:, 0], [0.05, 0.1, 0.2])
        np.testing.assert_array_equal(starts[:, 2:], np.ones((3, 2)))
        metrics = read_manifest(out_dir)['metrics']
        self.assertLess(float(metrics['expansion_max_diff_j_over_delta_0.05']), 1e-4)
        self.assertLess(float(metrics['numeric_max_diff_j_over_delta_0.2']), 1e-9)

    def test_closed_gate_weak_coupling_stays_blockaded(self):
        out_dir = self.simulate(
            'closed-gate', self.make_dir(),
            'closed_gate.j_over_delta=0.001', 'closed_gate.delta_t_max=1e4', 'time_grid.n_points=10001',
        )
        _, rows = read_table(out_dir / 'closed_gate.csv')
        self.assertGreaterEqual(rows[:, 2].min(), 0.999)
        self.assertLess(np.max(np.abs(rows[:, 2] - rows[:, 3])), 1e-6)

    def test_lindblad_summary(self):
        out_dir = self.simulate('lindblad-sweep', self.make_dir())
        header, rows = read_table(out_dir / 'lindblad_summary.csv')
        self.assertEqual(header, ['rate', 'transfer_fidelity', 'blockade_fidelity'])
        np.testing.assert_array_equal(rows[:, 0], [0.0, 1.0, 10.0, 100.0, 1000.0])
        self.assertAlmostEqual(rows[0, 1], 1.0, delta=1e-8)
        self.assertTrue(np.all(np.diff(rows[:, 1]) <= 0))
        self.assertTrue(np.all(rows[2:, 2] >= rows[2:, 1]))
        self.assertTrue(np.all(rows[:, 2] >= 0.0))
        self.assertEqual(len(list(out_dir.glob('lindblad_transfer_*.csv'))), 5)
        self.assertEqual(len(list(out_dir.glob('lindblad_blockade_*.csv'))), 5)
        manifest = read_manifest(out_dir)
        self.assertEqual(manifest['metrics']['transfer_summary_monotone'], 'true')
        self.assertLess(float(manifest['deviations']['max_trace_deviation']), 1e-9)
        self.assertEqual(manifest['config.chain']['delta'], '1000000.0')

    def test_milburn_summary(self):
        out_dir = self.simulate('milburn-sweep', self.make_dir())
        header, rows = read_table(out_dir / 'milburn_summary.csv')
        self.assertEqual(header, ['rate', 'transfer_fidelity', 'blockade_fidelity'])
        self.assertAlmostEqual(rows[0, 1], 1.0, delta=1e-8)
        self.assertTrue(np.all(np.diff(rows[:, 1]) <= 1e-12))
        _, trace = read_table(out_dir / 'milburn_transfer_00.csv')
        self.assertEqual(trace.shape, (2001, 2))

    def test_custom_columns(self):
        out_dir = self.simulate('custom', self.make_dir())
        header, rows = read_table(out_dir / 'custom.csv')
        self.assertEqual(header, ['t_seconds', 'p_source', 'p_gate', 'p_drain', 'p_blockade_total'])
        self.assertAlmostEqual(rows[0, 4], 1.0, places=12)
        self.assertLess(float(read_manifest(out_dir)['metrics']['analytic_max_diff']), 1e-9)

    def test_celery_executor_matches_thread_pool(self):
        def eager_group(signatures):
            results = [signature.apply().get() for signature in signatures]
            dispatched = MagicMock()
            dispatched.apply_async.return_value.get.return_value = results
            return dispatched

        overrides = ('rates.values=0, 100', 'time_grid.n_points=51')
        threads = self.simulate('lindblad-sweep', self.make_dir(), *overrides)
        with patch('apps.transistor.scenarios.group', side_effect=eager_group) as mocked:
            celery = self.simulate('lindblad-sweep', self.make_dir(), *overrides, 'options.executor=celery')
        mocked.assert_called_once()
        for path in sorted(threads.glob('*.csv')):
            self.assertEqual(path.read_bytes(), (celery / path.name).read_bytes(), msg=path.name)

    def test_tolerance_failure_exit_code(self):
        out_dir = self.make_dir()
        with patch('apps.transistor.reporting.TRACE_TOL', -1.0):
            with self.assertRaises(CommandError) as ctx:
                self.simulate('lindblad-sweep', out_dir, 'rates.values=0', 'time_grid.n_points=11', 'options.kinds=transfer')
        self.assertEqual(ctx.exception.returncode, 3)
        self.assertEqual(read_manifest(out_dir)['run']['status'], 'failed')

    def test_config_error_exit_code(self):
        with self.assertRaises(CommandError) as ctx:
            self.simulate('open-gate', self.make_dir(), 'chain.coupling_j=-1')
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('override: chain.coupling_j', str(ctx.exception))

    def test_experiment_error_exit_code(self):
        with self.assertRaises(CommandError) as ctx:
            self.simulate('lindblad-sweep', self.make_dir(), 'chain.delta=0', 'options.kinds=blockade')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_io_error_exit_code(self):
        blocker = self.make_dir() / 'not_a_directory'
        blocker.write_text('')
        with self.assertRaises(CommandError) as ctx:
            self.simulate('custom', blocker)
        self.assertEqual(ctx.exception.returncode, 4)

    def test_run_scenario_returns_manifest(self):
        config = validate_config('[experiment]\nscenario = custom\n[time_grid]\nn_points = 11\n')
        manifest = run_scenario(config, self.make_dir())
        self.assertEqual(manifest.files, ['custom.csv'])
        self.assertEqual(manifest.config_sha256, config.sha256)


class OtherCommandTests(WorkspaceMixin, SimpleTestCase):
    def test_list_scenarios(self):
        out = StringIO()
        call_command('list_scenarios', stdout=out)
        for name in SCENARIO_FILES:
            self.assertIn(name, out.getvalue())

    def test_validate_prints_normalized_config(self):
        out = StringIO()
        call_command('validate', config=str(EXPERIMENTS / 'lindblad_sweep.ini'), stdout=out)
        self.assertIn('coupling_j = 1000.0', out.getvalue())
        self.assertIn('sha256', out.getvalue())

    def test_validate_reports_every_problem(self):
        path = self.make_dir() / 'bad.ini'
        path.write_text('[experiment]\nscenario =\n[chain]\nn_sites = 1\n')
        with self.assertRaises(CommandError) as ctx:
            call_command('validate', config=str(path), stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('line 2: experiment.scenario', str(ctx.exception))
        self.assertIn('line 4: chain.n_sites', str(ctx.exception))

    def test_validate_missing_file(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('validate', config=str(self.make_dir() / 'missing.ini'), stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 4)
