"""
Schema of experiment configuration files.

One serializer per INI section, nested in ExperimentConfigSerializer. Values
arrive as the strings configparser read; every serializer rejects keys it
does not declare.
"""
import math
from collections.abc import Mapping

from rest_framework import serializers
from rest_framework.settings import api_settings

from apps.opensys.fidelity import KIND_CHOICES, KIND_BLOCKADE, KIND_TRANSFER, SOLVER_CHOICES, SOLVER_LINDBLAD, SOLVER_MILBURN
from apps.spinchain.params import UNITS_ANGULAR, UNITS_CHOICES
from apps.spinchain.states import NORM_TOL

SCENARIO_CLOSED_GATE = 'closed-gate'
SCENARIO_OPEN_GATE = 'open-gate'
SCENARIO_LINDBLAD_SWEEP = 'lindblad-sweep'
SCENARIO_MILBURN_SWEEP = 'milburn-sweep'
SCENARIO_CUSTOM = 'custom'
SCENARIO_CHOICES = (
    (SCENARIO_CLOSED_GATE, 'Source probability against delta*t for several J/delta, exact and weak-coupling expansion'),
    (SCENARIO_OPEN_GATE, 'Source, gate and drain probabilities at zero detuning'),
    (SCENARIO_LINDBLAD_SWEEP, 'Transfer and blockade fidelities under pure dephasing'),
    (SCENARIO_MILBURN_SWEEP, 'Transfer and blockade fidelities under intrinsic decoherence'),
    (SCENARIO_CUSTOM, 'Unitary probability trace for any chain, input and time grid'),
)

# Rate family each sweep runs; other scenarios take no rates.
SWEEP_FAMILIES = {
    SCENARIO_LINDBLAD_SWEEP: SOLVER_LINDBLAD,
    SCENARIO_MILBURN_SWEEP: SOLVER_MILBURN,
}

EXECUTOR_THREADS = 'threads'
EXECUTOR_CELERY = 'celery'
EXECUTOR_CHOICES = (
    (EXECUTOR_THREADS, 'Bounded thread pool in this process'),
    (EXECUTOR_CELERY, 'Celery group on the configured broker'),
)

ALL_KEYS = '*'

# Keys that have no meaning for a scenario. Setting one is an error rather
# than a silently ignored parameter.
UNUSED_KEYS = {
    SCENARIO_CLOSED_GATE: {
        'chain': ALL_KEYS, 'input': ALL_KEYS, 'rates': ALL_KEYS, 'options': ALL_KEYS,
        'time_grid': ('t_start', 't_end'),
    },
    SCENARIO_OPEN_GATE: {
        'input': ALL_KEYS, 'rates': ALL_KEYS, 'closed_gate': ALL_KEYS,
        'options': ('kinds', 'executor', 'allow_general_transfer_input'),
    },
    SCENARIO_LINDBLAD_SWEEP: {'closed_gate': ALL_KEYS, 'time_grid': ('t_start', 't_end')},
    SCENARIO_MILBURN_SWEEP: {'closed_gate': ALL_KEYS, 'time_grid': ('t_start', 't_end')},
    SCENARIO_CUSTOM: {'rates': ALL_KEYS, 'closed_gate': ALL_KEYS, 'options': ALL_KEYS},
}


class ComplexField(serializers.Field):
    default_error_messages = {
        'invalid': 'Expected a complex number such as 0.6 or 0.8j, got {value!r}.',
        'not_finite': 'Complex number must be finite.',
    }

    def to_internal_value(self, data):
        try:
            value = complex(str(data).replace(' ', ''))
        except ValueError:
            self.fail('invalid', value=data)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            self.fail('not_finite')
        return value

    def to_representation(self, value):
        return repr(complex(value))


class CommaSeparatedField(serializers.Field):
    """``a, b, c`` parsed item by item with ``child``."""
    default_error_messages = {
        'empty': 'Expected at least one comma-separated value.',
    }

    def __init__(self, child, **kwargs):
        self.child = child
        super().__init__(**kwargs)

    def bind(self, field_name, parent):
        super().bind(field_name, parent)
        self.child.bind(field_name='', parent=self)

    def to_internal_value(self, data):
        items = [item.strip() for item in str(data).split(',') if item.strip()]
        if not items:
            self.fail('empty')
        values, errors = [], []
        for position, item in enumerate(items, start=1):
            try:
                values.append(self.child.run_validation(item))
            except serializers.ValidationError as exc:
                errors.extend(f'item {position}: {message}' for message in exc.detail)
        if errors:
            raise serializers.ValidationError(errors)
        return tuple(values)

    def to_representation(self, value):
        return ', '.join(str(self.child.to_representation(item)) for item in value)


class StrictSerializer(serializers.Serializer):
    """Serializer that reports undeclared keys alongside its field errors."""
    unknown_message = 'Unknown key.'

    def to_internal_value(self, data):
        unknown = sorted(set(data) - set(self.fields)) if isinstance(data, Mapping) else []
        errors = {name: [self.unknown_message] for name in unknown}
        try:
            value = super().to_internal_value(data)
        except serializers.ValidationError as exc:
            detail = exc.detail if isinstance(exc.detail, dict) else {api_settings.NON_FIELD_ERRORS_KEY: exc.detail}
            errors.update(detail)
        if errors:
            raise serializers.ValidationError(errors)
        return value


class ExperimentSectionSerializer(StrictSerializer):
    scenario = serializers.ChoiceField(choices=SCENARIO_CHOICES)
    units_mode = serializers.ChoiceField(choices=UNITS_CHOICES, default=UNITS_ANGULAR)
    output_path = serializers.CharField(required=False)


class ChainSectionSerializer(StrictSerializer):
    n_sites = serializers.IntegerField(min_value=2, default=3)
    omega0 = serializers.FloatField(default=0.0)
    delta = serializers.FloatField(required=False)
    coupling_j = serializers.FloatField(min_value=0.0, default=1e3)
    gate_site = serializers.IntegerField(min_value=0, required=False)

    def validate(self, data):
        gate_site = data.get('gate_site')
        if gate_site is not None and gate_site >= data['n_sites']:
            raise serializers.ValidationError({'gate_site': f'Must be below n_sites = {data["n_sites"]}.'})
        return data


class InputSectionSerializer(StrictSerializer):
    alpha = ComplexField(default=1.0 + 0j)
    beta = ComplexField(default=0j)

    def validate(self, data):
        norm = abs(data['alpha']) ** 2 + abs(data['beta']) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise serializers.ValidationError(f'|alpha|^2 + |beta|^2 = {norm!r}, must be 1 within {NORM_TOL:.0e}.')
        return data


class RatesSectionSerializer(StrictSerializer):
    family = serializers.ChoiceField(choices=SOLVER_CHOICES, required=False)
    values = CommaSeparatedField(serializers.FloatField(min_value=0.0), required=False)


class TimeGridSectionSerializer(StrictSerializer):
    t_start = serializers.FloatField(min_value=0.0, default=0.0)
    t_end = serializers.FloatField(required=False)
    n_points = serializers.IntegerField(min_value=2, default=2001)

    def validate(self, data):
        t_end = data.get('t_end')
        if t_end is not None and not t_end > data['t_start']:
            raise serializers.ValidationError({'t_end': f'Must be greater than t_start = {data["t_start"]!r}.'})
        return data


class ClosedGateSectionSerializer(StrictSerializer):
    j_over_delta = CommaSeparatedField(serializers.FloatField(min_value=0.0), default=(0.05, 0.1, 0.2))
    delta_t_max = serializers.FloatField(min_value=0.0, default=20.0)

    def validate_j_over_delta(self, value):
        if any(ratio == 0 for ratio in value):
            raise serializers.ValidationError('Ratios must be > 0.')
        return value

    def validate_delta_t_max(self, value):
        if not value > 0:
            raise serializers.ValidationError('Must be > 0.')
        return value


class OptionsSectionSerializer(StrictSerializer):
    kinds = CommaSeparatedField(serializers.ChoiceField(choices=KIND_CHOICES), default=(KIND_TRANSFER, KIND_BLOCKADE))
    allow_detuned_transfer = serializers.BooleanField(default=False)
    allow_general_transfer_input = serializers.BooleanField(default=False)
    executor = serializers.ChoiceField(choices=EXECUTOR_CHOICES, required=False)

    def validate_kinds(self, value):
        if len(set(value)) != len(value):
            raise serializers.ValidationError('Kinds must not repeat.')
        return value


class ExperimentConfigSerializer(StrictSerializer):
    unknown_message = 'Unknown section.'

    experiment = ExperimentSectionSerializer()
    chain = ChainSectionSerializer()
    input = InputSectionSerializer()
    rates = RatesSectionSerializer()
    time_grid = TimeGridSectionSerializer()
    closed_gate = ClosedGateSectionSerializer()
    options = OptionsSectionSerializer()

    def validate(self, data):
        """Cross-section rules: keys the scenario does not use and the rate family."""
        scenario = data['experiment']['scenario']
        provided = self.initial_data
        errors = {}

        for section, keys in UNUSED_KEYS[scenario].items():
            given = provided.get(section) or {}
            names = sorted(given) if keys == ALL_KEYS else [name for name in keys if name in given]
            for name in names:
                errors.setdefault(section, {})[name] = [f'Not used by the {scenario} scenario.']

        expected = SWEEP_FAMILIES.get(scenario)
        family = data['rates'].get('family')
        if expected and family and family != expected:
            errors.setdefault('rates', {})['family'] = [f'{scenario} runs the {expected} family, got {family}.']

        if errors:
            raise serializers.ValidationError(errors)
        return data
