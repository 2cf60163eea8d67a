from django.forms import ValidationError
from django.test import SimpleTestCase

from riskbandit.config import DEFAULT_STRATEGIES, ExperimentConfig, StrategySpec
from riskbandit.exceptions import ConfigurationError
from riskbandit.forms import SeedListField, SimConfigForm, StrategyListField, build_experiment_config


class BuildExperimentConfigTests(SimpleTestCase):

    def test_defaults(self):
        cfg = build_experiment_config({})
        self.assertEqual(cfg, ExperimentConfig())
        self.assertEqual([spec.identifier for spec in cfg.strategies], list(DEFAULT_STRATEGIES))
        self.assertEqual(cfg.capacity, 20)
        self.assertEqual(cfg.init_modes, ('oracle', 'noisy'))

    def test_nested_sections(self):
        cfg = build_experiment_config({
            'sim': {'n_users': 50, 'event_prob': 0.01},
            'detector': {'min_obs': 4, 'detector_window': 20},
            'capacity_fraction': 0.2,
            'init_mode': 'noisy',
        })
        self.assertEqual(cfg.sim.n_users, 50)
        self.assertEqual(cfg.sim.n_frames, 3000)
        self.assertEqual(cfg.detector.min_obs, 4)
        self.assertEqual(cfg.capacity, 10)
        self.assertEqual(cfg.init_modes, ('noisy',))

    def test_json_text(self):
        cfg = build_experiment_config('{"seeds": [4, 2], "strategies": ["gibbs"], "output_dir": "out"}')
        self.assertEqual(cfg.seeds, (4, 2))
        self.assertEqual(cfg.strategies, (StrategySpec('gibbs'),))
        self.assertEqual(cfg.output_dir, 'out')

    def test_null_keeps_default(self):
        cfg = build_experiment_config({'sim': {'n_users': None}})
        self.assertEqual(cfg.sim.n_users, 200)

    def test_invalid_documents(self):
        values = [
            # (label, document)
            ('not json', '{"seeds": '),
            ('not an object', '[1, 2]'),
            ('section not an object', {'sim': [1]}),
            ('no seeds', {'seeds': []}),
            ('no capacity', {'capacity_fraction': 0.001}),
            ('bad init mode', {'init_mode': 'sometimes'}),
        ]
        for label, document in values:
            with self.subTest(label=label):
                with self.assertRaises(ConfigurationError):
                    build_experiment_config(document)

    def test_field_errors(self):
        values = [
            # (document, section, field)
            ({'sim': {'n_users': -1}}, 'sim', 'n_users'),
            ({'sim': {'event_prob': 'often'}}, 'sim', 'event_prob'),
            ({'detector': {'min_obs': 1}}, 'detector', 'min_obs'),
            ({'sim': {'event_len_min': 30, 'event_len_max': 20}}, 'sim', '__all__'),
        ]
        for document, section, field in values:
            with self.subTest(section=section, field=field):
                with self.assertRaises(ConfigurationError) as cm:
                    build_experiment_config(document)
                self.assertIn(field, cm.exception.errors[section])

    def test_top_level_errors(self):
        with self.assertRaises(ConfigurationError) as cm:
            build_experiment_config({'strategies': ['c-eps-greedy:2']})
        self.assertEqual(cm.exception.errors['strategies'][0]['code'], 'invalid')

    def test_unknown_keys(self):
        with self.assertRaisesMessage(ConfigurationError, 'sim.users'):
            build_experiment_config({'sim': {'users': 10}})
        with self.assertRaisesMessage(ConfigurationError, 'epsilon'):
            build_experiment_config({'epsilon': 0.5})


class SimConfigFormTests(SimpleTestCase):

    def test_overrides_only_given_keys(self):
        form = SimConfigForm(data={'n_users': '12'})
        self.assertTrue(form.is_valid(), msg=form.errors)
        self.assertEqual(form.overrides(), {'n_users': 12})

    def test_cross_field_error(self):
        form = SimConfigForm(data={'event_len_min': 5, 'event_len_max': 4})
        self.assertFalse(form.is_valid())
        self.assertIn('__all__', form.errors)


class StrategyListFieldTests(SimpleTestCase):

    def test_parse(self):
        values = [
            # (input, identifiers)
            ('so-policy', ['so-policy']),
            ('so-policy, c-eps-greedy:0.8', ['so-policy', 'c-eps-greedy:0.8']),
            (['gibbs', 'gibbs', 'random'], ['gibbs', 'random']),
            (['c-eps-greedy:0.50', 'c-eps-greedy:0.5'], ['c-eps-greedy:0.5']),
        ]
        field = StrategyListField()
        for value, identifiers in values:
            with self.subTest(value=value):
                self.assertEqual([spec.identifier for spec in field.clean(value)], identifiers)

    def test_invalid(self):
        field = StrategyListField()
        for value in ('thompson', 'gibbs:0.5', 'c-eps-greedy', 'c-eps-greedy:x', 'c-eps-greedy:-0.1'):
            with self.subTest(value=value):
                with self.assertRaises(ValidationError) as cm:
                    field.clean(value)
                self.assertEqual(cm.exception.code, 'invalid')


class SeedListFieldTests(SimpleTestCase):

    def test_parse(self):
        field = SeedListField()
        values = [
            # (value, seeds)
            ([0, 1, 2], [0, 1, 2]),
            ('7, 8', [7, 8]),
            (3, [3]),
            ([4.0], [4]),
            ([2 ** 63 - 1], [2 ** 63 - 1]),
            ([2 ** 64 - 1], [2 ** 64 - 1]),
        ]
        for value, seeds in values:
            with self.subTest(value=value):
                self.assertEqual(field.clean(value), seeds)

    def test_invalid(self):
        field = SeedListField()
        for value in ([1.5], [-1], [True], ['x'], [2 ** 64], [float('inf')], [float('nan')]):
            with self.subTest(value=value):
                with self.assertRaises(ValidationError):
                    field.clean(value)

    def test_large_seed_in_config(self):
        cfg = build_experiment_config('{"seeds": [9223372036854775807]}')
        self.assertEqual(cfg.seeds, (2 ** 63 - 1,))

    def test_required(self):
        with self.assertRaises(ValidationError):
            SeedListField().clean([])
