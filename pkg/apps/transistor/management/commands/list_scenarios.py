from django.core.management.base import BaseCommand

from apps.transistor.serializers import SCENARIO_CHOICES


class Command(BaseCommand):
    help = 'List the scenarios the simulate command can run'

    def handle(self, *args, **options):
        width = max(len(name) for name, _ in SCENARIO_CHOICES)
        for name, description in SCENARIO_CHOICES:
            self.stdout.write(f'{name.ljust(width)}  {description}')
