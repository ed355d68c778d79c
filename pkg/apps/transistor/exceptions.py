"""
Errors raised while configuring and running experiments
"""


class TransistorError(Exception):
    pass


class ConfigError(TransistorError, ValueError):
    """
    Every problem found in an experiment configuration, each formatted as
    ``line N: section.key: message``.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__('Invalid experiment configuration:\n' + '\n'.join(f'  {p}' for p in self.problems))


class ToleranceFailure(TransistorError):
    """A finished run whose manifest is flagged failed."""

    def __init__(self, failures, manifest_path=None):
        self.failures = list(failures)
        self.manifest_path = manifest_path
        super().__init__('Run exceeded numerical tolerances: ' + '; '.join(self.failures))


# Process exit codes of the management commands
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3
EXIT_IO = 4
