"""
CSV and manifest writers.

Data files carry no timestamps so that identical configurations give
byte-identical CSVs; the manifest holds everything run-specific.
"""
import configparser
import csv
import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from django.conf import settings
from django.utils import timezone

from apps.opensys.states import POSITIVITY_TOL, TRACE_TOL
from apps.unitary.traces import RANGE_SLACK

logger = logging.getLogger(__name__)

NUMBER_FORMAT = '{:.11e}'
HERMITICITY_TOL = 1e-9
MANIFEST_NAME = 'manifest.ini'

STATUS_OK = 'ok'
STATUS_FAILED = 'failed'


def calculate_data_hash(data):
    """Calculate SHA-256 hash of data"""
    data_string = json.dumps(data, sort_keys=True)
    return hashlib.sha256(data_string.encode()).hexdigest()


def format_number(value):
    """12 significant digits in scientific notation; -0 is written as 0."""
    return NUMBER_FORMAT.format(float(value) + 0.0)


def clamp_probabilities(values):
    """Clip to [0, 1] and return (clipped, largest distance that was clipped)."""
    values = np.asarray(values, dtype=float)
    if not values.size:
        return values, 0.0
    deviation = max(0.0, float(np.max(-values)), float(np.max(values - 1.0)))
    return np.clip(values, 0.0, 1.0), deviation


@dataclass
class RunManifest:
    """
    What a run did and how far its numerics strayed. A run whose deviations
    exceed the solver tolerances is flagged failed.
    """
    scenario: str
    config_echo: dict
    config_sha256: str
    code_version: str = field(default_factory=lambda: getattr(settings, 'APP_VERSION', 'unknown'))
    started_at: object = field(default_factory=timezone.now)
    wall_clock_seconds: float = 0.0
    max_trace_deviation: float = 0.0
    max_hermiticity_deviation: float = 0.0
    min_eigenvalue: float = None
    max_clamp_deviation: float = 0.0
    metrics: dict = field(default_factory=dict)
    limits: dict = field(default_factory=dict)
    files: list = field(default_factory=list)

    def record_states(self, diagnostics):
        """Fold the diagnostics of one evolved DensityTrace into the run totals."""
        self.max_trace_deviation = max(self.max_trace_deviation, float(diagnostics.get('trace_deviation', 0.0)))
        self.max_hermiticity_deviation = max(
            self.max_hermiticity_deviation, float(diagnostics.get('hermiticity_deviation', 0.0))
        )
        lowest = diagnostics.get('min_eigenvalue')
        if lowest is not None:
            lowest = float(lowest)
            self.min_eigenvalue = lowest if self.min_eigenvalue is None else min(self.min_eigenvalue, lowest)

    def record_clamp(self, deviation):
        self.max_clamp_deviation = max(self.max_clamp_deviation, float(deviation))

    def record_metric(self, name, value, limit=None):
        """Store a named run metric; with ``limit`` the run fails when value exceeds it."""
        self.metrics[name] = value
        if limit is not None:
            self.limits[name] = limit

    def failures(self):
        problems = []
        if self.max_trace_deviation > TRACE_TOL:
            problems.append(f'trace deviation {self.max_trace_deviation:.3e} > {TRACE_TOL:.0e}')
        if self.max_hermiticity_deviation > HERMITICITY_TOL:
            problems.append(f'hermiticity deviation {self.max_hermiticity_deviation:.3e} > {HERMITICITY_TOL:.0e}')
        if self.min_eigenvalue is not None and self.min_eigenvalue < -POSITIVITY_TOL:
            problems.append(f'minimum eigenvalue {self.min_eigenvalue:.3e} < -{POSITIVITY_TOL:.0e}')
        if self.max_clamp_deviation > RANGE_SLACK:
            problems.append(f'clamped values left [0, 1] by {self.max_clamp_deviation:.3e} > {RANGE_SLACK:.0e}')
        for name, limit in self.limits.items():
            value = self.metrics[name]
            if isinstance(value, float) and value > limit:
                problems.append(f'{name} {value:.3e} > {limit:.0e}')
        return problems

    @property
    def status(self):
        return STATUS_FAILED if self.failures() else STATUS_OK

    def as_sections(self):
        """The manifest as INI sections of strings."""
        run = {
            'scenario': self.scenario,
            'status': self.status,
            'code_version': self.code_version,
            'started_at': self.started_at.isoformat(),
            'wall_clock_seconds': f'{self.wall_clock_seconds:.6f}',
            'config_sha256': self.config_sha256,
        }
        failures = self.failures()
        if failures:
            run['failures'] = '; '.join(failures)
        deviations = {
            'max_trace_deviation': format_number(self.max_trace_deviation),
            'max_hermiticity_deviation': format_number(self.max_hermiticity_deviation),
            'min_eigenvalue': 'none' if self.min_eigenvalue is None else format_number(self.min_eigenvalue),
            'max_clamp_deviation': format_number(self.max_clamp_deviation),
        }
        metrics = {
            name: format_number(value) if isinstance(value, float) else str(value).lower()
            for name, value in self.metrics.items()
        }
        sections = {'run': run, 'deviations': deviations, 'metrics': metrics}
        sections['files'] = {f'file_{index:03d}': name for index, name in enumerate(self.files)}
        for section, values in self.config_echo.items():
            sections[f'config.{section}'] = dict(values)
        return sections

    def write(self, out_dir):
        parser = configparser.ConfigParser(interpolation=None)
        parser.read_dict(self.as_sections())
        path = Path(out_dir) / MANIFEST_NAME
        with open(path, 'w', newline='\n', encoding='utf-8') as handle:
            parser.write(handle)
        logger.info('Wrote manifest %s (status %s)', path, self.status)
        return path


def write_csv(path, columns, probabilities=(), manifest=None):
    """
    Write ``columns`` (name -> 1-D array, in order) as a CSV with a header
    row. Columns named in ``probabilities`` are clamped to [0, 1] first and
    the clamp distance is recorded on ``manifest``.
    """
    path = Path(path)
    names = list(columns)
    data = []
    for name in names:
        values = np.asarray(columns[name], dtype=float).reshape(-1)
        if name in probabilities:
            values, deviation = clamp_probabilities(values)
            if manifest is not None:
                manifest.record_clamp(deviation)
        data.append(values)
    lengths = {values.size for values in data}
    if len(lengths) > 1:
        raise ValueError(f'Columns of {path.name} differ in length: {sorted(lengths)}')

    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(names)
        for row in zip(*data):
            writer.writerow([format_number(value) for value in row])
    if manifest is not None:
        manifest.files.append(path.name)
    logger.info('Wrote %s (%d rows)', path, data[0].size if data else 0)
    return path
