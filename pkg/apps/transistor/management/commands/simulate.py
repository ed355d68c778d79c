from django.core.management.base import BaseCommand, CommandError

from apps.opensys.exceptions import ExperimentConfigurationError, OpenSystemError
from apps.qmatrix.exceptions import MatrixError
from apps.spinchain.exceptions import SpinChainError
from apps.spinchain.params import UNITS_CHOICES
from apps.transistor.config import load_config
from apps.transistor.exceptions import EXIT_CONFIG, EXIT_IO, EXIT_TOLERANCE, ConfigError, ToleranceFailure
from apps.transistor.scenarios import output_dir, run_scenario
from apps.transistor.serializers import SCENARIO_CHOICES
from apps.unitary.exceptions import UnitaryError


class Command(BaseCommand):
    help = 'Run an experiment scenario and write its CSV traces and run manifest'

    def add_arguments(self, parser):
        parser.add_argument('scenario', choices=[name for name, _ in SCENARIO_CHOICES], help='Scenario to run')
        parser.add_argument('--config', required=True, help='Experiment configuration file (INI)')
        parser.add_argument('--out', help='Output directory (default: experiment.output_path or TRANSISTOR_OUTPUT_DIR)')
        parser.add_argument('--units', choices=[name for name, _ in UNITS_CHOICES], help='Frequency units of the file')
        parser.add_argument(
            '--override', action='append', default=[], metavar='SECTION.KEY=VALUE',
            help='Set a configuration key before validation (repeatable)',
        )

    def handle(self, *args, **options):
        path = options['config']
        try:
            config = load_config(path, overrides=options['override'], units=options['units'], scenario=options['scenario'])
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=EXIT_CONFIG)
        except OSError as exc:
            raise CommandError(f'Cannot read {path}: {exc}', returncode=EXIT_IO)

        try:
            manifest = run_scenario(config, options['out'])
        except ToleranceFailure as exc:
            raise CommandError(f'{exc} (manifest: {exc.manifest_path})', returncode=EXIT_TOLERANCE)
        except ExperimentConfigurationError as exc:
            raise CommandError(f'Invalid experiment: {exc}', returncode=EXIT_CONFIG)
        except (MatrixError, SpinChainError, UnitaryError, OpenSystemError) as exc:
            raise CommandError(f'Solver failure: {exc}', returncode=EXIT_TOLERANCE)
        except OSError as exc:
            raise CommandError(f'Cannot write output: {exc}', returncode=EXIT_IO)

        out_dir = output_dir(config, options['out'])
        self.stdout.write(self.style.SUCCESS(
            f'{config.scenario}: wrote {len(manifest.files)} file(s) to {out_dir} in {manifest.wall_clock_seconds:.3f} s'
        ))
