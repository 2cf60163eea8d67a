from django import forms
from django.forms import ValidationError
from django.utils.translation import gettext_lazy as _

from .config import INIT_MODES, DetectorConfig, ExperimentConfig, SimConfig, StrategySpec
from .exceptions import ConfigurationError
from .json import checked_loads

# seeds are unsigned 64-bit integers
MAX_SEED = 2 ** 64


def _as_list(value):
    if isinstance(value, str):
        return [item for item in (part.strip() for part in value.split(',')) if item]
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


class StrategyListField(forms.Field):
    """Parses strategy identifiers (``so-policy``, ``c-eps-greedy:0.8``, ...) into StrategySpecs."""
    default_error_messages = {
        'invalid': _('"%(value)s" is not a valid strategy identifier.'),
    }

    def to_python(self, value):
        if value in self.empty_values:
            return []

        specs = []
        for identifier in _as_list(value):
            try:
                spec = StrategySpec.parse(identifier)
            except ConfigurationError:
                raise ValidationError(
                    self.error_messages['invalid'],
                    code='invalid',
                    params={'value': identifier},
                )
            if spec not in specs:
                specs.append(spec)
        return specs


class SeedListField(forms.Field):
    default_error_messages = {
        'invalid': _('"%(value)s" is not a valid seed.'),
        'empty': _('At least one seed is required.'),
    }

    def to_python(self, value):
        if value in self.empty_values:
            return []
        return [self.to_seed(item) for item in _as_list(value)]

    def to_seed(self, item):
        invalid = ValidationError(self.error_messages['invalid'], code='invalid', params={'value': item})
        if isinstance(item, bool) or (isinstance(item, float) and not item.is_integer()):
            raise invalid
        try:
            seed = int(item)
        except (TypeError, ValueError):
            raise invalid
        if not 0 <= seed < MAX_SEED:
            raise invalid
        return seed

    def validate(self, value):
        super().validate(value)
        if self.required and not value:
            raise ValidationError(self.error_messages['empty'], code='empty')


class ConfigForm(forms.Form):
    """Validates one config section; only keys present in the input override defaults."""
    config_class = None

    def overrides(self):
        return {
            name: value
            for name, value in self.cleaned_data.items()
            if name in self.data and value is not None
        }

    def clean(self):
        cleaned_data = super().clean()
        if self.config_class is not None and not self.errors:
            try:
                self.config_class(**self.overrides())
            except ConfigurationError as exc:
                raise ValidationError(str(exc))
        return cleaned_data


class SimConfigForm(ConfigForm):
    config_class = SimConfig

    n_users = forms.IntegerField(min_value=0, required=False)
    n_frames = forms.IntegerField(min_value=0, required=False)
    seed = forms.IntegerField(min_value=0, max_value=MAX_SEED - 1, required=False)
    event_prob = forms.FloatField(min_value=0.0, max_value=1.0, required=False)
    event_len_min = forms.IntegerField(min_value=1, required=False)
    event_len_max = forms.IntegerField(min_value=1, required=False)
    powerlaw_exponent = forms.FloatField(required=False)
    noise_scale = forms.FloatField(min_value=0.0, required=False)
    trend_amplitude = forms.FloatField(min_value=0.0, required=False)
    trend_period = forms.FloatField(required=False)


class DetectorConfigForm(ConfigForm):
    config_class = DetectorConfig

    z_threshold = forms.FloatField(required=False)
    min_obs = forms.IntegerField(min_value=2, required=False)
    detector_window = forms.IntegerField(min_value=2, required=False)
    persistence = forms.IntegerField(min_value=1, required=False)


class ExperimentConfigForm(ConfigForm):
    capacity_fraction = forms.FloatField(required=False)
    strategies = StrategyListField(required=False)
    seeds = SeedListField(required=False)
    init_mode = forms.ChoiceField(choices=[(mode, mode) for mode in INIT_MODES], required=False)
    noisy_mix = forms.FloatField(min_value=0.0, max_value=1.0, required=False)
    window_k = forms.IntegerField(min_value=1, required=False)
    output_dir = forms.CharField(required=False)
    parallelism = forms.IntegerField(min_value=1, required=False)


SECTIONS = {
    'sim': SimConfigForm,
    'detector': DetectorConfigForm,
}


def _clean(form_class, data, prefix=None):
    if not isinstance(data, dict):
        raise ConfigurationError('Config section {0!r} must be an object.'.format(prefix))

    unknown = sorted(set(data) - set(form_class.base_fields))
    if unknown:
        raise ConfigurationError('Unknown config keys: {0}.'.format(', '.join(
            '{0}.{1}'.format(prefix, key) if prefix else key for key in unknown)))

    form = form_class(data=data)
    if not form.is_valid():
        errors = form.errors.get_json_data()
        if prefix:
            errors = {prefix: errors}
        raise ConfigurationError('Invalid configuration: {0}'.format(form.errors.as_text()), errors)
    return form.overrides()


def build_experiment_config(data) -> ExperimentConfig:
    """Validate a (possibly nested) config document and build an ExperimentConfig."""
    data = dict(checked_loads(data))
    sections = {name: data.pop(name, {}) for name in SECTIONS}

    sim = SimConfig(**_clean(SimConfigForm, sections['sim'], 'sim'))
    detector = DetectorConfig(**_clean(DetectorConfigForm, sections['detector'], 'detector'))
    overrides = _clean(ExperimentConfigForm, data)

    for name in ('strategies', 'seeds'):
        if name in overrides:
            overrides[name] = tuple(overrides[name])

    return ExperimentConfig(sim=sim, detector=detector, **overrides)
