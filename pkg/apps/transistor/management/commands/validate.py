import configparser
import io

from django.core.management.base import BaseCommand, CommandError

from apps.spinchain.params import UNITS_CHOICES
from apps.transistor.config import load_config
from apps.transistor.exceptions import EXIT_CONFIG, EXIT_IO, ConfigError


class Command(BaseCommand):
    help = 'Check an experiment configuration and print it normalized'

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='Experiment configuration file (INI)')
        parser.add_argument('--units', choices=[name for name, _ in UNITS_CHOICES], help='Frequency units of the file')
        parser.add_argument('--override', action='append', default=[], metavar='SECTION.KEY=VALUE')

    def handle(self, *args, **options):
        path = options['config']
        try:
            config = load_config(path, overrides=options['override'], units=options['units'])
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=EXIT_CONFIG)
        except OSError as exc:
            raise CommandError(f'Cannot read {path}: {exc}', returncode=EXIT_IO)

        parser = configparser.ConfigParser(interpolation=None)
        parser.read_dict(config.echo())
        buffer = io.StringIO()
        parser.write(buffer)
        self.stdout.write(buffer.getvalue().rstrip('\n'))
        self.stdout.write(self.style.SUCCESS(f'{path}: valid {config.scenario} configuration (sha256 {config.sha256})'))
