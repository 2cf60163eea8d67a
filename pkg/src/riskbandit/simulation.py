"""
Synthetic database-activity risk streams.

A population of users gets heavy-tailed base risks, a slow sinusoidal trend
and multiplicative Gaussian noise. Security events temporarily replace a
user's base risk with a fresh draw from the population prior.

Population, noise and event injection each read their own sub-stream of the
master seed, so toggling events never moves the event-free risk values.
"""
import logging
from dataclasses import dataclass, replace

import numpy as np

from .config import SimConfig
from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)

POPULATION_STREAM = 0
NOISE_STREAM = 1
EVENT_STREAM = 2


@dataclass(frozen=True)
class UserProfile:
    user_id: int
    base_risk: float
    phase: float = 0.0
    trend_amplitude: float = 0.0
    trend_period: float = 720.0
    noise_scale: float = 0.0

    def trend(self, t):
        return 1.0 + self.trend_amplitude * np.sin(2.0 * np.pi * np.asarray(t) / self.trend_period + self.phase)

    def with_base_risk(self, base_risk):
        return replace(self, base_risk=base_risk)


@dataclass(frozen=True)
class RiskFrame:
    t: int
    risks: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, RiskFrame):
            return NotImplemented
        return self.t == other.t and np.array_equal(self.risks, other.risks)


@dataclass(frozen=True)
class SecurityEvent:
    """
    A contiguous regime change for one user.

    ``length`` is the drawn length even when the event runs past the horizon;
    ``base_risk`` is the replacement profile's base risk, the user's trend and
    noise parameters stay in force.
    """
    user_id: int
    start: int
    length: int
    base_risk: float

    @property
    def end(self):
        return self.start + self.length

    def replacement_profile(self, profile):
        return profile.with_base_risk(self.base_risk)

    def contains(self, t):
        return self.start <= t < self.end


class GroundTruth:
    """Every simulated risk plus the injected events. Immutable once built."""

    def __init__(self, true_risks, events=()):
        risks = np.array(true_risks, dtype=float)
        if risks.ndim != 2:
            if risks.size:
                raise ConfigurationError('true_risks must be a (frames, users) matrix.')
            risks = risks.reshape((0, 0))
        risks.setflags(write=False)
        self.true_risks = risks
        self.events = tuple(sorted(events, key=lambda e: (e.start, e.user_id)))

    @property
    def n_frames(self):
        return self.true_risks.shape[0]

    @property
    def n_users(self):
        return self.true_risks.shape[1]

    def frame(self, t):
        return RiskFrame(t, self.true_risks[t])

    @property
    def frames(self):
        return [self.frame(t) for t in range(self.n_frames)]

    def event_mask(self):
        """Boolean (frames, users) matrix, True while a user is inside an event."""
        mask = np.zeros(self.true_risks.shape, dtype=bool)
        for event in self.events:
            mask[event.start:event.end, event.user_id] = True
        return mask

    def summary(self):
        mask = self.event_mask()
        return {
            'n_users': self.n_users,
            'n_frames': self.n_frames,
            'n_events': len(self.events),
            'mean_risk': float(self.true_risks.mean()) if self.true_risks.size else 0.0,
            'mean_event_risk': float(self.true_risks[mask].mean()) if mask.any() else None,
        }

    def __eq__(self, other):
        if not isinstance(other, GroundTruth):
            return NotImplemented
        # a stream file holds no dimensions for a truth without risk values
        if not self.true_risks.size and not other.true_risks.size:
            return self.events == other.events
        return (
            self.true_risks.shape == other.true_risks.shape
            and np.array_equal(self.true_risks, other.true_risks)
            and self.events == other.events
        )

    def __repr__(self):
        return '<GroundTruth frames={0} users={1} events={2}>'.format(self.n_frames, self.n_users, len(self.events))


def substreams(seed):
    """The three independent generators derived from a master seed."""
    children = np.random.SeedSequence(seed).spawn(3)
    return [np.random.default_rng(child) for child in children]


def _population_scale(raw):
    mean = raw.mean() if raw.size else 0.0
    return 1.0 / mean if mean > 0 else 1.0


def _draw_population(config, rng):
    raw = rng.pareto(config.powerlaw_exponent, size=config.n_users)
    scale = _population_scale(raw)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=config.n_users)
    profiles = [
        UserProfile(
            user_id=user_id,
            base_risk=float(raw[user_id] * scale),
            phase=float(phases[user_id]),
            trend_amplitude=config.trend_amplitude,
            trend_period=config.trend_period,
            noise_scale=config.noise_scale,
        )
        for user_id in range(config.n_users)
    ]
    return profiles, scale


def generate_population(config: SimConfig):
    """
    Draw ``n_users`` profiles whose base risks follow a Pareto (Lomax) law
    with shape ``powerlaw_exponent``, rescaled to a population mean of 1.0.
    """
    profiles, _ = _draw_population(config, substreams(config.seed)[POPULATION_STREAM])
    return profiles


def inject_events(config: SimConfig, n_users, prior_scale, rng):
    """
    Draw security events frame by frame: each user not already inside an
    event starts one with probability ``event_prob``. Events running past the
    horizon keep their drawn length.
    """
    if config.event_prob == 0 or n_users == 0 or config.n_frames == 0:
        return []

    triggers = rng.random((config.n_frames, n_users)) < config.event_prob
    starts, users = np.nonzero(triggers)
    lengths = rng.integers(config.event_len_min, config.event_len_max + 1, size=starts.size)
    replacements = rng.pareto(config.powerlaw_exponent, size=starts.size) * prior_scale

    busy_until = np.zeros(n_users, dtype=np.int64)
    events = []
    for start, user, length, base_risk in zip(starts, users, lengths, replacements):
        if start < busy_until[user]:
            continue
        busy_until[user] = start + length
        events.append(SecurityEvent(int(user), int(start), int(length), float(base_risk)))
    return events


def render(config: SimConfig, profiles, events=()) -> GroundTruth:
    """Produce the risk matrix for ``profiles`` with ``events`` applied."""
    n_users, n_frames = len(profiles), config.n_frames
    noise = substreams(config.seed)[NOISE_STREAM].standard_normal((n_frames, n_users))

    base = np.array([p.base_risk for p in profiles], dtype=float)
    effective = np.tile(base, (n_frames, 1))
    for event in events:
        effective[event.start:event.end, event.user_id] = event.base_risk

    t = np.arange(n_frames, dtype=float)[:, np.newaxis]
    amplitude = np.array([p.trend_amplitude for p in profiles], dtype=float)
    period = np.array([p.trend_period for p in profiles], dtype=float)
    phase = np.array([p.phase for p in profiles], dtype=float)
    noise_scale = np.array([p.noise_scale for p in profiles], dtype=float)
    trend = 1.0 + amplitude * np.sin(2.0 * np.pi * t / period + phase)

    risks = np.maximum(effective * trend + noise_scale * effective * noise, 0.0)
    return GroundTruth(risks.reshape((n_frames, n_users)), events)


def simulate(config: SimConfig) -> GroundTruth:
    population_rng, _, event_rng = substreams(config.seed)
    profiles, scale = _draw_population(config, population_rng)
    events = inject_events(config, len(profiles), scale, event_rng)
    gt = render(config, profiles, events)

    summary = gt.summary()
    logger.info(
        'Simulated %d users x %d frames (seed %d) with %d security events, mean risk %.4f, mean event risk %s.',
        summary['n_users'], summary['n_frames'], config.seed, summary['n_events'], summary['mean_risk'],
        'n/a' if summary['mean_event_risk'] is None else '{0:.4f}'.format(summary['mean_event_risk']),
    )
    return gt


def top_share(profiles, fraction=0.1):
    """Share of summed base risk held by the top ``fraction`` of users."""
    values = np.sort(np.array([p.base_risk for p in profiles], dtype=float))[::-1]
    total = values.sum()
    if total <= 0:
        return 0.0
    top = max(1, int(round(fraction * values.size)))
    return float(values[:top].sum() / total)


def lomax_top_share(exponent, fraction=0.1):
    """Closed-form top-``fraction`` share of a Lomax population with the given shape."""
    if exponent <= 1:
        return 1.0
    tail = 1.0 - 1.0 / exponent
    return (fraction ** tail / tail - fraction) * (exponent - 1.0)
