"""
Experiment configuration: INI text in, validated ExperimentConfig out.

Frequencies in an ExperimentConfig are angular (rad/s) whatever units_mode
the file used; gamma and times are never converted.
"""
import configparser
import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from django.conf import settings
from rest_framework.settings import api_settings

from apps.spinchain.exceptions import ChainParamsError
from apps.spinchain.params import ChainParams, to_angular
from apps.unitary.timescales import transfer_time

from .exceptions import ConfigError
from .reporting import calculate_data_hash
from .serializers import (
    SCENARIO_CLOSED_GATE, SCENARIO_CUSTOM, SCENARIO_OPEN_GATE, SWEEP_FAMILIES, ExperimentConfigSerializer,
)

logger = logging.getLogger(__name__)

SECTIONS = tuple(ExperimentConfigSerializer().fields)

SWEEP_DELTA = 1e6
DEFAULT_RATES = {
    'lindblad': (0.0, 1.0, 10.0, 100.0, 1000.0),
    'milburn': (0.0, 1e-12, 1e-10, 1e-8),
}

OVERRIDE_ORIGIN = 'override'

_SECTION_RE = re.compile(r'^\[(?P<name>[^\]]+)\]')
_KEY_RE = re.compile(r'^(?P<key>[^=:]+?)\s*[=:]')


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    n_points: int

    def times(self):
        return np.linspace(self.t_start, self.t_end, self.n_points)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    params: ChainParams
    units_mode: str = 'angular'
    alpha: complex = 1.0 + 0j
    beta: complex = 0j
    rate_family: str = None
    rates: tuple = ()
    time_grid: TimeGrid = None
    n_points: int = 2001
    j_over_delta: tuple = ()
    delta_t_max: float = 20.0
    kinds: tuple = ()
    allow_detuned_transfer: bool = False
    allow_general_transfer_input: bool = False
    executor: str = None
    output_path: str = None

    @property
    def is_sweep(self):
        return self.scenario in SWEEP_FAMILIES

    def echo(self):
        """
        Normalized configuration as sections of strings, angular units
        throughout. This is what the manifest records and what the hash covers.
        """
        p = self.params
        sections = {
            'experiment': {'scenario': self.scenario, 'units_mode': self.units_mode},
            'chain': {
                'n_sites': str(p.n_sites), 'omega0': repr(p.omega0), 'delta': repr(p.delta),
                'coupling_j': repr(p.coupling_j), 'gate_site': str(p.gate_site),
            },
            'input': {'alpha': repr(complex(self.alpha)), 'beta': repr(complex(self.beta))},
        }
        if self.output_path:
            sections['experiment']['output_path'] = self.output_path
        if self.time_grid is not None:
            sections['time_grid'] = {
                't_start': repr(self.time_grid.t_start), 't_end': repr(self.time_grid.t_end),
                'n_points': str(self.time_grid.n_points),
            }
        else:
            sections['time_grid'] = {'n_points': str(self.n_points)}
        if self.scenario == SCENARIO_CLOSED_GATE:
            sections['closed_gate'] = {
                'j_over_delta': ', '.join(repr(r) for r in self.j_over_delta),
                'delta_t_max': repr(self.delta_t_max),
            }
        if self.is_sweep:
            sections['rates'] = {'family': self.rate_family, 'values': ', '.join(repr(r) for r in self.rates)}
            sections['options'] = {
                'kinds': ', '.join(self.kinds),
                'allow_detuned_transfer': str(self.allow_detuned_transfer).lower(),
                'allow_general_transfer_input': str(self.allow_general_transfer_input).lower(),
                'executor': self.executor,
            }
        return sections

    @property
    def sha256(self):
        """SHA-256 of the echo, output_path excluded."""
        echo = self.echo()
        echo['experiment'].pop('output_path', None)
        return calculate_data_hash(echo)


def _line_index(text):
    """(section, key) -> line number, (section, None) for section headers."""
    index = {}
    section = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped[0] in '#;':
            continue
        header = _SECTION_RE.match(stripped)
        if header:
            section = header.group('name').strip()
            index.setdefault((section, None), number)
            continue
        key = _KEY_RE.match(stripped)
        if section is not None and key:
            index.setdefault((section, key.group('key').strip().lower()), number)
    return index


def _parse_problems(exc):
    if isinstance(exc, configparser.MissingSectionHeaderError):
        return [f'line {exc.lineno}: expected a [section] header before {exc.line.strip()!r}']
    if isinstance(exc, configparser.ParsingError):
        return [f'line {lineno}: cannot parse {line}' for lineno, line in exc.errors]
    if isinstance(exc, configparser.DuplicateOptionError):
        return [f'line {exc.lineno}: {exc.section}.{exc.option}: duplicate key']
    if isinstance(exc, configparser.DuplicateSectionError):
        return [f'line {exc.lineno}: {exc.section}: duplicate section']
    return [str(exc)]


def parse_sections(text):
    """INI text -> {section: {key: raw string}}."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source='<config>')
    except configparser.Error as exc:
        raise ConfigError(_parse_problems(exc)) from exc
    return {
        section: {key: parser.get(section, key, raw=True) for key in parser.options(section)}
        for section in parser.sections()
    }


def apply_overrides(sections, overrides=(), origins=None):
    """
    Apply ``section.key=value`` strings in order. Keys set this way are
    recorded in ``origins`` so errors point at the override, not a line.
    """
    problems = []
    for override in overrides:
        target, sep, value = override.partition('=')
        section, dot, key = target.strip().partition('.')
        if not sep or not dot or not section or not key.strip():
            problems.append(f'{OVERRIDE_ORIGIN}: {override!r}: expected section.key=value')
            continue
        key = key.strip().lower()
        if origins is not None and section not in sections:
            origins[(section, None)] = OVERRIDE_ORIGIN
        sections.setdefault(section, {})[key] = value.strip()
        if origins is not None:
            origins[(section, key)] = OVERRIDE_ORIGIN
    if problems:
        raise ConfigError(problems)
    return sections


def _flatten_errors(detail, path=()):
    if isinstance(detail, dict):
        for name, nested in detail.items():
            step = () if name == api_settings.NON_FIELD_ERRORS_KEY else (name,)
            yield from _flatten_errors(nested, path + step)
    elif isinstance(detail, (list, tuple)):
        for nested in detail:
            yield from _flatten_errors(nested, path)
    else:
        yield path, str(detail)


def format_errors(errors, lines, origins):
    """DRF error detail -> ``line N: section.key: message`` strings."""
    problems = []
    for path, message in _flatten_errors(errors):
        section = path[0] if path else None
        key = path[1] if len(path) > 1 else None
        origin = origins.get((section, key)) or lines.get((section, key)) or lines.get((section, None))
        if isinstance(origin, int):
            where = f'line {origin}'
        else:
            where = origin or 'line ?'
        name = '.'.join(path) if path else 'config'
        problems.append(f'{where}: {name}: {message}')
    return problems


def _default_grid(params, grid):
    t_end = grid.get('t_end')
    if t_end is None:
        if not params.coupling_j > 0:
            return None
        # one full period of the resonant transfer: tau_T sits in the middle
        t_end = grid['t_start'] + 2.0 * transfer_time(params.coupling_j)
    return TimeGrid(t_start=grid['t_start'], t_end=t_end, n_points=grid['n_points'])


def build_config(data):
    """Validated serializer data -> ExperimentConfig (angular units, scenario defaults resolved)."""
    experiment = data['experiment']
    scenario = experiment['scenario']
    units_mode = experiment['units_mode']
    chain = data['chain']

    delta = chain.get('delta')
    if delta is None:
        delta = SWEEP_DELTA if scenario in SWEEP_FAMILIES else 0.0
    try:
        params = ChainParams(
            n_sites=chain['n_sites'],
            omega0=to_angular(chain['omega0'], units_mode),
            delta=to_angular(delta, units_mode),
            coupling_j=to_angular(chain['coupling_j'], units_mode),
            gate_site=chain.get('gate_site'),
        )
    except ChainParamsError as exc:
        raise ConfigError([f'chain: {problem}' for problem in exc.problems]) from exc

    family = SWEEP_FAMILIES.get(scenario)
    rates = ()
    if family:
        rates = data['rates'].get('values') or DEFAULT_RATES[family]
        if family == 'lindblad':
            rates = tuple(to_angular(value, units_mode) for value in rates)

    grid = data['time_grid']
    time_grid = None
    if scenario in (SCENARIO_OPEN_GATE, SCENARIO_CUSTOM):
        time_grid = _default_grid(params, grid)
        if time_grid is None:
            raise ConfigError(['time_grid.t_end: required when coupling_j = 0'])

    options = data['options']
    closed_gate = data['closed_gate']
    return ExperimentConfig(
        scenario=scenario,
        params=params,
        units_mode=units_mode,
        alpha=data['input']['alpha'],
        beta=data['input']['beta'],
        rate_family=family,
        rates=tuple(float(r) for r in rates),
        time_grid=time_grid,
        n_points=grid['n_points'],
        j_over_delta=tuple(closed_gate['j_over_delta']),
        delta_t_max=closed_gate['delta_t_max'],
        kinds=tuple(options['kinds']),
        allow_detuned_transfer=options['allow_detuned_transfer'],
        allow_general_transfer_input=options['allow_general_transfer_input'],
        executor=options.get('executor') or getattr(settings, 'SWEEP_EXECUTOR', 'threads'),
        output_path=experiment.get('output_path'),
    )


def validate_config(raw_text, overrides=()):
    """
    Parse, default and check an experiment configuration.

    ``overrides`` are ``section.key=value`` strings applied before
    validation, so they pass the same checks as the file.

    Raises:
        ConfigError: listing every problem found, each with its line
    """
    lines = _line_index(raw_text)
    origins = {}
    sections = apply_overrides(parse_sections(raw_text), overrides, origins)
    data = {section: {} for section in SECTIONS}
    data.update(sections)

    serializer = ExperimentConfigSerializer(data=data)
    if not serializer.is_valid():
        problems = format_errors(serializer.errors, lines, origins)
        logger.debug('Configuration rejected with %d problem(s)', len(problems))
        raise ConfigError(problems)
    config = build_config(serializer.validated_data)
    logger.debug('Configuration accepted: %s (sha256 %s)', config.scenario, config.sha256)
    return config


def load_config(path, overrides=(), units=None, output_path=None, scenario=None):
    """
    Read and validate a configuration file. ``units``, ``output_path`` and
    ``scenario`` become overrides of the matching [experiment] keys.

    Raises:
        ConfigError: for invalid content
        OSError: if the file cannot be read
    """
    text = Path(path).read_text(encoding='utf-8')
    extra = []
    if scenario:
        extra.append(f'experiment.scenario={scenario}')
    if units:
        extra.append(f'experiment.units_mode={units}')
    if output_path:
        extra.append(f'experiment.output_path={output_path}')
    return validate_config(text, list(overrides) + extra)
