import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .exceptions import ConfigurationError

SO_POLICY = 'so-policy'
RANDOM = 'random'
GIBBS = 'gibbs'
C_EPS_GREEDY = 'c-eps-greedy'
ORACLE = 'oracle'

STRATEGY_NAMES = (SO_POLICY, RANDOM, GIBBS, C_EPS_GREEDY, ORACLE)

INIT_ORACLE = 'oracle'
INIT_NOISY = 'noisy'
INIT_BOTH = 'both'

INIT_MODES = (INIT_ORACLE, INIT_NOISY, INIT_BOTH)

DEFAULT_STRATEGIES = (
    'so-policy',
    'random',
    'gibbs',
    'c-eps-greedy:0.2',
    'c-eps-greedy:0.5',
    'c-eps-greedy:0.8',
)

DEFAULT_SEEDS = tuple(range(10))


@dataclass(frozen=True)
class SimConfig:
    n_users: int = 200
    n_frames: int = 3000
    seed: int = 0
    event_prob: float = 0.001
    event_len_min: int = 200
    event_len_max: int = 300
    powerlaw_exponent: float = 1.5
    noise_scale: float = 0.3
    trend_amplitude: float = 0.2
    trend_period: float = 720.0

    def __post_init__(self):
        if self.n_users < 0 or self.n_frames < 0:
            raise ConfigurationError('n_users and n_frames must be non-negative.')
        if not 0.0 <= self.event_prob <= 1.0:
            raise ConfigurationError('event_prob must lie in [0, 1].')
        if not 0 < self.event_len_min <= self.event_len_max:
            raise ConfigurationError('event lengths must satisfy 0 < event_len_min <= event_len_max.')
        if self.powerlaw_exponent <= 0:
            raise ConfigurationError('powerlaw_exponent must be positive.')
        if self.noise_scale < 0 or self.trend_amplitude < 0:
            raise ConfigurationError('noise_scale and trend_amplitude must be non-negative.')
        if self.trend_period <= 0:
            raise ConfigurationError('trend_period must be positive.')

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class StrategySpec:
    """A parsed strategy identifier, e.g. ``c-eps-greedy:0.8``."""
    name: str
    epsilon: Optional[float] = None

    @classmethod
    def parse(cls, identifier):
        name, sep, param = str(identifier).strip().partition(':')
        if name not in STRATEGY_NAMES:
            raise ConfigurationError('Unknown strategy identifier {0!r}.'.format(identifier))

        if name != C_EPS_GREEDY:
            if sep:
                raise ConfigurationError('Strategy {0!r} takes no parameter.'.format(name))
            return cls(name)

        try:
            epsilon = float(param)
        except ValueError:
            raise ConfigurationError(
                'Strategy {0!r} requires a numeric epsilon, e.g. "c-eps-greedy:0.8".'.format(identifier))
        if not 0.0 <= epsilon <= 1.0 or math.isnan(epsilon):
            raise ConfigurationError('epsilon must lie in [0, 1], got {0!r}.'.format(param))
        return cls(name, epsilon)

    @property
    def identifier(self):
        if self.epsilon is None:
            return self.name
        return '{0}:{1:g}'.format(self.name, self.epsilon)

    @property
    def exploration_rate(self):
        """Share of capacity spent on uniform exploration, or None when not meaningful."""
        if self.name == C_EPS_GREEDY:
            return round(1.0 - self.epsilon, 12)
        if self.name == SO_POLICY:
            return 0.0
        if self.name == RANDOM:
            return 1.0
        return None

    def __str__(self):
        return self.identifier


@dataclass(frozen=True)
class StrategyConfig:
    capacity: int
    epsilon: float = 1.0
    window_k: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.capacity < 0:
            raise ConfigurationError('capacity must be non-negative.')
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigurationError('epsilon must lie in [0, 1].')
        if self.window_k < 1:
            raise ConfigurationError('window_k must be at least 1.')


@dataclass(frozen=True)
class DetectorConfig:
    """
    ``persistence`` is the number of consecutive same-direction flagged
    observations a user needs before a detection is emitted; 1 reports every
    flagged observation.
    """
    z_threshold: float = 2.5
    min_obs: int = 5
    detector_window: int = 50
    persistence: int = 2

    def __post_init__(self):
        if self.z_threshold <= 0:
            raise ConfigurationError('z_threshold must be positive.')
        if self.min_obs < 2:
            raise ConfigurationError('min_obs must be at least 2.')
        if self.detector_window < self.min_obs:
            raise ConfigurationError('detector_window must be at least min_obs.')
        if self.persistence < 1:
            raise ConfigurationError('persistence must be at least 1.')


@dataclass(frozen=True)
class ExperimentConfig:
    sim: SimConfig = field(default_factory=SimConfig)
    capacity_fraction: float = 0.10
    strategies: Tuple[StrategySpec, ...] = tuple(StrategySpec.parse(s) for s in DEFAULT_STRATEGIES)
    seeds: Tuple[int, ...] = DEFAULT_SEEDS
    init_mode: str = INIT_BOTH
    noisy_mix: float = 0.5
    window_k: int = 50
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    output_dir: str = 'results'
    parallelism: int = 1

    def __post_init__(self):
        if not 0.0 < self.capacity_fraction <= 1.0:
            raise ConfigurationError('capacity_fraction must lie in (0, 1].')
        if not self.seeds:
            raise ConfigurationError('At least one seed is required.')
        if self.init_mode not in INIT_MODES:
            raise ConfigurationError('init_mode must be one of {0}.'.format(', '.join(INIT_MODES)))
        if not 0.0 <= self.noisy_mix <= 1.0:
            raise ConfigurationError('noisy_mix must lie in [0, 1].')
        if self.window_k < 1:
            raise ConfigurationError('window_k must be at least 1.')
        if self.parallelism < 1:
            raise ConfigurationError('parallelism must be at least 1.')
        if self.capacity < 1:
            raise ConfigurationError(
                'capacity_fraction {0} of {1} users leaves no capacity.'.format(
                    self.capacity_fraction, self.sim.n_users))

    @property
    def capacity(self):
        return int(round(self.capacity_fraction * self.sim.n_users))

    @property
    def init_modes(self):
        if self.init_mode == INIT_BOTH:
            return (INIT_ORACLE, INIT_NOISY)
        return (self.init_mode,)

    def strategy_config(self, spec, seed, n_users=None):
        """Per-run policy parameters; capacity is capped at the population size."""
        n_users = self.sim.n_users if n_users is None else n_users
        return StrategyConfig(
            capacity=min(self.capacity, n_users),
            epsilon=1.0 if spec.epsilon is None else spec.epsilon,
            window_k=self.window_k,
            seed=seed,
        )

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)
