import logging

from django.core.management.base import BaseCommand, CommandError

from ..config import C_EPS_GREEDY, StrategySpec
from ..exceptions import ConfigurationError, StreamParseError
from ..forms import build_experiment_config
from ..json import read_config

CONFIG_ERROR = 2
IO_ERROR = 3

# command line option -> (config section, key)
OVERRIDES = {
    'seed': ('sim', 'seed'),
    'frames': ('sim', 'n_frames'),
    'users': ('sim', 'n_users'),
    'out': (None, 'output_dir'),
    'capacity_fraction': (None, 'capacity_fraction'),
    'parallelism': (None, 'parallelism'),
}

VERBOSITY_LEVELS = {
    0: logging.WARNING,
    1: logging.INFO,
    2: logging.DEBUG,
    3: logging.DEBUG,
}


class ExperimentCommand(BaseCommand):
    """
    Shared option handling: a JSON ``--config`` file plus flags that override
    it, validated into an ExperimentConfig. Configuration errors exit with 2,
    I/O and parse errors with 3.
    """
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument('--config', help='JSON config file.')
        parser.add_argument('--seed', type=int, help='Run a single seed instead of the configured list.')
        parser.add_argument('--frames', type=int, help='Number of simulated frames.')
        parser.add_argument('--users', type=int, help='Number of simulated users.')
        parser.add_argument('--out', help='Output directory.')

    def add_experiment_arguments(self, parser):
        parser.add_argument(
            '--strategy', action='append', default=[],
            help='Run only this configured strategy (repeatable), e.g. so-policy, gibbs, c-eps-greedy:0.8.')
        parser.add_argument('--epsilon', type=float, help='Also run c-eps-greedy with this exploitation fraction.')
        parser.add_argument('--capacity-fraction', type=float, help='Share of users monitored per frame.')
        parser.add_argument('--parallelism', type=int, help='Concurrent (strategy, seed) runs.')

    def config_data(self, options):
        data = dict(read_config(options['config'])) if options.get('config') else {}
        sim = dict(data.get('sim') or {})

        if options.get('seed') is not None:
            data['seeds'] = [options['seed']]
        for option, (section, key) in OVERRIDES.items():
            if options.get(option) is not None:
                (sim if section == 'sim' else data)[key] = options[option]

        if sim:
            data['sim'] = sim
        return data

    def select_strategies(self, cfg, options):
        """
        Narrow the configured strategies to the ``--strategy`` ids, keeping their
        configured order; ``--epsilon`` adds a c-eps-greedy entry to the selection.
        """
        strategies = cfg.strategies
        wanted = [StrategySpec.parse(identifier) for identifier in options.get('strategy') or []]
        if wanted:
            missing = [spec.identifier for spec in wanted if spec not in strategies]
            if missing:
                raise ConfigurationError('Strategies not in the configuration: {0}.'.format(', '.join(missing)))
            strategies = tuple(spec for spec in strategies if spec in wanted)

        if options.get('epsilon') is not None:
            greedy = StrategySpec.parse('{0}:{1!r}'.format(C_EPS_GREEDY, options['epsilon']))
            if greedy not in strategies:
                strategies += (greedy,)
        return cfg.replace(strategies=strategies)

    def load_config(self, options):
        return self.select_strategies(build_experiment_config(self.config_data(options)), options)

    def configure_logging(self, verbosity):
        logging.getLogger('riskbandit').setLevel(VERBOSITY_LEVELS.get(verbosity, logging.DEBUG))

    def handle(self, *args, **options):
        self.configure_logging(options['verbosity'])
        try:
            self.run(options)
        except ConfigurationError as exc:
            raise CommandError(str(exc), returncode=CONFIG_ERROR)
        except (OSError, StreamParseError) as exc:
            raise CommandError(str(exc), returncode=IO_ERROR)

    def run(self, options):
        raise NotImplementedError
