import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ContractViolation, EmptyInput

COVERAGE_SAMPLES = 2


class Never(str):
    """Placeholder for a coverage target that is never reached."""


NEVER = Never('never')


@dataclass(frozen=True)
class RewardRecord:
    t: int
    rho: float
    rho_oracle: float
    ratio: float


@dataclass(frozen=True)
class CoverageCurve:
    """Fraction of users with at least two monitored frames, per frame ``frames[i]``."""
    frames: np.ndarray
    fractions: np.ndarray

    def __len__(self):
        return self.fractions.size

    def at(self, t):
        index = np.searchsorted(self.frames, t, side='right') - 1
        return float(self.fractions[index]) if index >= 0 else 0.0


def frame_reward(selection, true_risks, oracle) -> RewardRecord:
    """
    Monitored risk of ``selection`` against the oracle's.

    Frames where the oracle monitors no risk at all count as fully rewarded.
    """
    t = getattr(true_risks, 't', selection.t)
    if not selection.t == oracle.t == t:
        raise ContractViolation('Frame mismatch: selection {0}, oracle {1}, risks {2}.'.format(
            selection.t, oracle.t, t))

    risks = np.asarray(getattr(true_risks, 'risks', true_risks), dtype=float)
    # summed in sorted order so equal sets give bit-equal sums
    rho = float(np.sort(risks[list(selection.users)]).sum())
    rho_oracle = float(np.sort(risks[list(oracle.users)]).sum())
    if rho_oracle > 0:
        ratio = min(rho / rho_oracle, 1.0)
    else:
        ratio = 1.0
    return RewardRecord(t, rho, rho_oracle, ratio)


def reward_ratios(rho, rho_oracle):
    """Vectorised ``R_t`` for arrays of monitored and oracle risk sums."""
    rho = np.asarray(rho, dtype=float)
    rho_oracle = np.asarray(rho_oracle, dtype=float)
    with np.errstate(invalid='ignore', divide='ignore'):
        ratio = np.where(rho_oracle > 0, rho / rho_oracle, 1.0)
    return np.minimum(ratio, 1.0)


def summary_reward(records):
    """Mean of the per-frame reward ratios."""
    ratios = [getattr(record, 'ratio', record) for record in records]
    if not ratios:
        raise EmptyInput('summary_reward needs at least one reward record.')
    return math.fsum(ratios) / len(ratios)


def total_reward(records):
    """Sum of the per-frame reward ratios (``R_T`` in its summed form)."""
    return math.fsum(getattr(record, 'ratio', record) for record in records)


def coverage_curve(selection_log, n_users, initial=()) -> CoverageCurve:
    """
    Coverage after each logged frame: the share of users sampled at least
    twice so far, counting the users in ``initial`` once up front.
    """
    selection_log = list(selection_log)
    counts = np.zeros(n_users, dtype=np.int64)
    counts[np.asarray(initial, dtype=np.int64)] = 1
    frames = np.zeros(len(selection_log), dtype=np.int64)
    fractions = np.zeros(len(selection_log), dtype=float)
    covered = 0
    for i, selection in enumerate(selection_log):
        users = np.fromiter(selection.users, dtype=np.int64, count=len(selection.users))
        counts[users] += 1
        covered += int(np.count_nonzero(counts[users] == COVERAGE_SAMPLES))
        frames[i] = selection.t
        fractions[i] = covered / n_users if n_users else 0.0
    return CoverageCurve(frames, fractions)


def coverage_from_matrix(frames, selected, n_users, initial=()) -> CoverageCurve:
    """
    Coverage for a ``(frames, capacity)`` matrix of selected user ids.

    ``initial`` holds the users monitored before the first frame; each counts
    as one sample.
    """
    selected = np.asarray(selected, dtype=np.int64)
    hits = np.zeros((selected.shape[0], n_users), dtype=np.int64)
    np.put_along_axis(hits, selected, 1, axis=1)
    counts = np.cumsum(hits, axis=0)
    counts[:, np.asarray(initial, dtype=np.int64)] += 1
    fractions = (counts >= COVERAGE_SAMPLES).sum(axis=1) / n_users if n_users else np.zeros(len(frames))
    return CoverageCurve(np.asarray(frames, dtype=np.int64), np.asarray(fractions, dtype=float))


def time_to_coverage(curve, fraction):
    """First frame at which coverage reaches ``fraction``, or ``NEVER``."""
    if not 0 < fraction <= 1:
        raise ValueError('fraction must lie in (0, 1].')
    reached = np.flatnonzero(curve.fractions >= fraction)
    if reached.size == 0:
        return NEVER
    return int(curve.frames[reached[0]])
