"""
Downstream anomaly detection and event-level recall.

The detector runs unchanged on a strategy's sampled observations and on the
full stream; recall on the sample is normalized by recall on the full stream.
"""
import csv
import logging
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .config import DetectorConfig
from .exceptions import ContractViolation, UndefinedNormalization

logger = logging.getLogger(__name__)

MIN_SIGMA = 1e-9

RECALL_CAP_WARNING = (
    'Sampled recall {0:.4f} exceeds full-stream recall {1:.4f}; '
    'the normalized recall has been capped at 1.0.'
)

DETECTIONS_HEADER = ['user_id', 't', 'z_score']


class NoEvents(str):
    """Recall placeholder for ground truth without any events."""


NO_EVENTS = NoEvents('no-events')


@dataclass(frozen=True)
class DetectionRecord:
    user_id: int
    t: int
    z_score: float


def _columns(observations):
    if isinstance(observations, tuple) and len(observations) == 3 and isinstance(observations[0], np.ndarray):
        ts, users, risks = observations
    else:
        rows = list(observations)
        ts = np.array([row[0] for row in rows], dtype=np.int64)
        users = np.array([row[1] for row in rows], dtype=np.int64)
        risks = np.array([row[2] for row in rows], dtype=float)
    return np.asarray(ts, dtype=np.int64), np.asarray(users, dtype=np.int64), np.asarray(risks, dtype=float)


class Detector:
    """Interface for detectors: observations in, DetectionRecords out."""

    def detect(self, observations):
        raise NotImplementedError


class ZScoreDetector(Detector):
    """
    Per-user trailing-window z-score.

    Each observation is scored against the mean and sample standard deviation
    of that user's previous ``detector_window`` observations (never itself),
    once at least ``min_obs`` of them exist. An observation is flagged when
    its score exceeds ``z_threshold`` in absolute value; a detection is
    emitted for every flagged observation that closes a run of
    ``persistence`` consecutive flags in the same direction.

    Windows and runs count observations, not frames.
    """

    def __init__(self, config=None):
        self.config = config or DetectorConfig()

    def detect(self, observations):
        ts, users, risks = _columns(observations)
        if ts.size and np.any(np.diff(ts) < 0):
            position = int(np.flatnonzero(np.diff(ts) < 0)[0]) + 1
            raise ContractViolation('Observations are not time-ordered at position {0}.'.format(position))

        records = []
        order = np.argsort(users, kind='stable')
        boundaries = np.flatnonzero(np.diff(users[order])) + 1
        for group in np.split(order, boundaries):
            if group.size:
                records.extend(self.detect_series(int(users[group[0]]), ts[group], risks[group]))

        records.sort(key=lambda record: (record.t, record.user_id))
        return records

    def scores(self, risks):
        """z-score of every observation against its baseline; NaN where it can't be scored."""
        cfg = self.config
        risks = np.asarray(risks, dtype=float)
        size, window = risks.size, cfg.detector_window
        mu = np.full(size, np.nan)
        sigma = np.full(size, np.nan)

        for i in range(cfg.min_obs, min(window, size)):
            mu[i] = risks[:i].mean()
            sigma[i] = risks[:i].std(ddof=1)

        if size > window and window >= cfg.min_obs:
            baselines = sliding_window_view(risks, window)[:size - window]
            mu[window:] = baselines.mean(axis=1)
            sigma[window:] = baselines.std(axis=1, ddof=1)

        with np.errstate(invalid='ignore', divide='ignore'):
            z = (risks - mu) / sigma
        z[~(sigma > MIN_SIGMA)] = np.nan
        return z

    def confirmed(self, z):
        """Indices of flagged scores that close a same-direction run of ``persistence`` flags."""
        run = self.config.persistence
        with np.errstate(invalid='ignore'):
            direction = np.where(np.abs(z) > self.config.z_threshold, np.sign(z), 0.0)
        if run == 1:
            return np.flatnonzero(direction)
        if direction.size < run:
            return np.array([], dtype=np.int64)

        windows = sliding_window_view(direction, run)
        steady = np.all(windows == windows[:, :1], axis=1) & (windows[:, 0] != 0)
        return np.flatnonzero(steady) + run - 1

    def detect_series(self, user_id, ts, risks):
        z = self.scores(risks)
        return [DetectionRecord(user_id, int(ts[i]), float(z[i])) for i in self.confirmed(z)]


def detect(observations, cfg=None):
    return ZScoreDetector(cfg).detect(observations)


def event_recall(detections, ground_truth):
    """
    Fraction of events with at least one detection for their user inside
    ``[start, start + length)``. Returns ``NO_EVENTS`` when there are no events.
    """
    events = getattr(ground_truth, 'events', ground_truth)
    events = list(events or ())
    if not events:
        return NO_EVENTS

    by_user = {}
    for record in detections:
        by_user.setdefault(record.user_id, []).append(record.t)
    by_user = {user: np.sort(np.array(times)) for user, times in by_user.items()}

    detected = 0
    for event in events:
        times = by_user.get(event.user_id)
        if times is None:
            continue
        index = np.searchsorted(times, event.start, side='left')
        if index < times.size and times[index] < event.start + event.length:
            detected += 1
    return detected / len(events)


def normalized_recall(sampled_recall, full_data_recall):
    if isinstance(full_data_recall, NoEvents) or isinstance(sampled_recall, NoEvents):
        return NO_EVENTS
    if full_data_recall <= 0:
        raise UndefinedNormalization('Full-stream recall is zero; normalized recall is undefined.')

    ratio = sampled_recall / full_data_recall
    if ratio > 1.0:
        message = RECALL_CAP_WARNING.format(sampled_recall, full_data_recall)
        warnings.warn(message, RuntimeWarning)
        logger.warning(message)
        ratio = 1.0
    return ratio


def write_detections(records, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as fp:
        writer = csv.writer(fp, lineterminator='\n')
        writer.writerow(DETECTIONS_HEADER)
        writer.writerows((r.user_id, r.t, repr(r.z_score)) for r in records)
    return path
