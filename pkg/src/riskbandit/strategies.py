"""
Sampling policies for budget-constrained monitoring.

Every policy picks exactly ``min(C, n_users)`` distinct users per frame and
learns only from the risks of the users it picked (partial feedback).

Note on epsilon: here ``epsilon`` is the *exploitation* fraction. With
``epsilon=0.8`` the top 80% of the capacity goes to the highest estimates and
20% is explored uniformly at random; ``epsilon=1`` is the static SO-policy and
``epsilon=0`` is pure random sampling. This is the reverse of the usual
epsilon-greedy naming.
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .config import C_EPS_GREEDY, GIBBS, ORACLE, RANDOM, SO_POLICY
from .exceptions import ConfigurationError, ContractViolation, InvalidPriors
from .sampling import weighted_sample

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SelectionSet:
    t: int
    users: Tuple[int, ...]

    def __post_init__(self):
        if len(set(self.users)) != len(self.users):
            raise ContractViolation('Selection for frame {0} holds duplicate users.'.format(self.t))

    def __len__(self):
        return len(self.users)

    def __contains__(self, user_id):
        return user_id in self.users

    def __iter__(self):
        return iter(self.users)

    def as_set(self):
        return frozenset(self.users)

    def mask(self, n_users):
        mask = np.zeros(n_users, dtype=bool)
        mask[list(self.users)] = True
        return mask


class ObservationStore:
    """
    Per-user sliding window of observed risks, with priors as the fallback.

    Observations live in a ring buffer of ``window_k + 1`` frame rows. Queries
    for frame ``t`` see the frames in ``[t - window_k, t)``.
    """

    def __init__(self, priors, window_k=50):
        priors = np.array(priors, dtype=float).reshape(-1)
        if not np.all(np.isfinite(priors)) or np.any(priors < 0):
            raise InvalidPriors('Priors must be finite and non-negative.')
        if window_k < 1:
            raise ConfigurationError('window_k must be at least 1.')

        priors.setflags(write=False)
        self.priors = priors
        self.window_k = int(window_k)
        self.sample_counts = np.zeros(priors.size, dtype=np.int64)
        self.t = -1
        self._values = np.full((self.window_k + 1, priors.size), np.nan)
        self._frames = np.full(self.window_k + 1, -1, dtype=np.int64)

    @property
    def n_users(self):
        return self.priors.size

    def observe(self, t, observed):
        if t < self.t:
            raise ContractViolation('Observation for frame {0} arrived after frame {1}.'.format(t, self.t))

        row = t % (self.window_k + 1)
        if self._frames[row] != t:
            self._values[row] = np.nan
            self._frames[row] = t

        if observed:
            users = np.fromiter(observed.keys(), dtype=np.int64, count=len(observed))
            risks = np.fromiter(observed.values(), dtype=float, count=len(observed))
            self._values[row, users] = risks
            np.add.at(self.sample_counts, users, 1)

        self.t = t
        stale = (self._frames >= 0) & (self._frames < t - self.window_k)
        self._values[stale] = np.nan
        self._frames[stale] = -1

    def _window(self, t):
        if t is None:
            t = self.t + 1
        rows = (self._frames >= max(t - self.window_k, 0)) & (self._frames < t)
        values = self._values[rows]
        return values, ~np.isnan(values)

    def window_mean(self, t=None):
        """Mean of the observed risks in the window, or the prior when there are none."""
        values, seen = self._window(t)
        counts = seen.sum(axis=0)
        sums = np.where(seen, values, 0.0).sum(axis=0)
        with np.errstate(invalid='ignore', divide='ignore'):
            return np.where(counts > 0, sums / counts, self.priors)

    def window_max(self, t=None):
        """Largest observed risk in the window, or the prior when there are none."""
        values, seen = self._window(t)
        counts = seen.sum(axis=0)
        peaks = np.where(seen, values, -np.inf).max(axis=0, initial=-np.inf)
        return np.where(counts > 0, peaks, self.priors)

    def estimate(self, user_id, t=None):
        return float(self.window_mean(t)[user_id])

    def window(self, user_id):
        """The (frame, risk) pairs currently held for ``user_id``, oldest first."""
        entries = [
            (int(frame), float(self._values[row, user_id]))
            for row, frame in enumerate(self._frames)
            if frame >= 0 and not np.isnan(self._values[row, user_id])
        ]
        return sorted(entries)


def initialize(priors, window_k=50):
    return ObservationStore(priors, window_k)


def oracle_priors(first_frame):
    return np.array(first_frame, dtype=float)


def noisy_priors(first_frame, rng, mix=0.5):
    """
    Mix each user's t0 risk with the t0 risk of a uniformly chosen other user.

    ``mix`` is the weight of the user's own risk.
    """
    own = np.array(first_frame, dtype=float)
    n = own.size
    if n < 2:
        return own
    partners = rng.integers(0, n - 1, size=n)
    partners += partners >= np.arange(n)
    return mix * own + (1.0 - mix) * own[partners]


def observe(store, t, observed, selection=None):
    """Record the risks revealed for ``t``; ``selection`` guards against unselected users."""
    if selection is not None:
        if selection.t != t:
            raise ContractViolation('Observation for frame {0} against the selection for frame {1}.'.format(
                t, selection.t))
        unselected = sorted(set(observed) - selection.as_set())
        if unselected:
            raise ContractViolation('Users {0} were not selected for frame {1}.'.format(unselected, t))
    store.observe(t, observed)


def _frame_index(store, t):
    return store.t + 1 if t is None else t


def _top(values, count):
    """Indices of the ``count`` largest values, ties broken by ascending index."""
    return np.argsort(-np.asarray(values, dtype=float), kind='stable')[:count]


def _as_selection(t, users):
    return SelectionSet(t, tuple(int(u) for u in users))


def select_so_policy(store, capacity, t=None):
    n = store.n_users
    return _as_selection(_frame_index(store, t), _top(store.priors, min(capacity, n)))


def select_random(store, capacity, rng, t=None):
    n = store.n_users
    return _as_selection(_frame_index(store, t), rng.choice(n, size=min(capacity, n), replace=False))


def select_gibbs(store, capacity, rng, t=None):
    t = _frame_index(store, t)
    size = min(capacity, store.n_users)
    estimates = store.window_max(t)
    positive = np.flatnonzero(estimates > 0)

    if positive.size >= size:
        return _as_selection(t, weighted_sample(estimates, size, rng))

    drawn = positive[weighted_sample(estimates[positive], positive.size, rng)]
    zeros = np.flatnonzero(estimates <= 0)
    filler = rng.choice(zeros, size=size - positive.size, replace=False)
    logger.info(
        'Gibbs smoothing at frame %d: %d users with positive estimate, filled %d uniformly.',
        t, positive.size, filler.size,
    )
    return _as_selection(t, np.concatenate([drawn, filler]))


def exploitation_slots(capacity, epsilon):
    return int(math.floor(epsilon * capacity + 1e-9))


def select_c_eps_greedy(store, capacity, epsilon, rng, t=None):
    t = _frame_index(store, t)
    n = store.n_users
    size = min(capacity, n)
    exploit = _top(store.window_mean(t), exploitation_slots(size, epsilon))

    remaining = np.setdiff1d(np.arange(n), exploit, assume_unique=True)
    explore = rng.choice(remaining, size=size - exploit.size, replace=False)
    return _as_selection(t, np.concatenate([exploit, explore]))


def select_oracle(true_risks_at_t, capacity, t=None):
    risks = getattr(true_risks_at_t, 'risks', true_risks_at_t)
    if t is None:
        t = getattr(true_risks_at_t, 't', 0)
    risks = np.asarray(risks, dtype=float)
    return _as_selection(t, _top(risks, min(capacity, risks.size)))


class Strategy:
    """
    A stateful policy: one store, one generator, one run.

    ``select`` must be followed by ``observe`` for the same frame before the
    next ``select``.
    """
    name = None

    def __init__(self, store, capacity, rng=None):
        self.store = store
        self.capacity = capacity
        self.rng = rng if rng is not None else np.random.default_rng()
        self.selection = None

    @property
    def identifier(self):
        return self.name

    def choose(self, t, frame):
        raise NotImplementedError

    def select(self, t, frame=None):
        self.selection = self.choose(t, frame)
        return self.selection

    def observe(self, t, observed):
        if self.selection is None:
            raise ContractViolation('Nothing was selected before observing frame {0}.'.format(t))
        observe(self.store, t, observed, self.selection)


class SOPolicy(Strategy):
    name = SO_POLICY

    def choose(self, t, frame):
        return select_so_policy(self.store, self.capacity, t)


class RandomSampling(Strategy):
    name = RANDOM

    def choose(self, t, frame):
        return select_random(self.store, self.capacity, self.rng, t)


class GibbsByRisk(Strategy):
    name = GIBBS

    def choose(self, t, frame):
        return select_gibbs(self.store, self.capacity, self.rng, t)


class CEpsGreedy(Strategy):
    name = C_EPS_GREEDY

    def __init__(self, store, capacity, rng=None, epsilon=0.8):
        super().__init__(store, capacity, rng)
        self.epsilon = epsilon

    @property
    def identifier(self):
        return '{0}:{1:g}'.format(self.name, self.epsilon)

    def choose(self, t, frame):
        return select_c_eps_greedy(self.store, self.capacity, self.epsilon, self.rng, t)


class Oracle(Strategy):
    """Hindsight top-C by true risk. Needs the frame, which only the harness holds."""
    name = ORACLE

    def choose(self, t, frame):
        if frame is None:
            raise ContractViolation('The oracle needs the true risks of frame {0}.'.format(t))
        return select_oracle(frame, self.capacity, t)


STRATEGY_CLASSES = {
    SO_POLICY: SOPolicy,
    RANDOM: RandomSampling,
    GIBBS: GibbsByRisk,
    C_EPS_GREEDY: CEpsGreedy,
    ORACLE: Oracle,
}


def build_strategy(spec, store, capacity, rng=None):
    """Instantiate the policy for a parsed ``StrategySpec``."""
    try:
        cls = STRATEGY_CLASSES[spec.name]
    except KeyError:
        raise ConfigurationError('Unknown strategy identifier {0!r}.'.format(spec.name))
    if spec.name == C_EPS_GREEDY:
        return cls(store, capacity, rng, epsilon=spec.epsilon)
    return cls(store, capacity, rng)
