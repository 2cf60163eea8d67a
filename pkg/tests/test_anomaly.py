import os
import tempfile

import numpy as np
from django.test import SimpleTestCase

from riskbandit.anomaly import (
    NO_EVENTS,
    DetectionRecord,
    NoEvents,
    ZScoreDetector,
    detect,
    event_recall,
    normalized_recall,
    write_detections,
)
from riskbandit.config import DetectorConfig
from riskbandit.exceptions import ConfigurationError, ContractViolation, UndefinedNormalization
from riskbandit.simulation import GroundTruth, SecurityEvent

# every flagged observation is a detection
SINGLE = DetectorConfig(z_threshold=3.0, persistence=1)

QUIET = [1.0, 1.1, 0.9, 1.0, 1.05, 1.0, 0.95, 1.1, 0.9, 1.0]


def series(user_id, risks, start=0):
    return [(start + i, user_id, float(risk)) for i, risk in enumerate(risks)]


class DetectorTests(SimpleTestCase):

    def test_constant_stream(self):
        self.assertEqual(detect(series(0, [1.0] * 100)), [])

    def test_spike_after_noise(self):
        rng = np.random.default_rng(0)
        risks = list(rng.normal(1.0, 0.1, size=50)) + [10.0]

        detections = detect(series(3, risks), SINGLE)
        self.assertIn(50, [record.t for record in detections])
        spike = [record for record in detections if record.t == 50][0]
        self.assertEqual(spike.user_id, 3)
        self.assertGreater(spike.z_score, 3.0)

    def test_warm_up(self):
        # nothing can be scored before min_obs prior observations exist
        detections = detect(series(0, [1.0, 1.1, 0.9, 1.0, 50.0]), SINGLE)
        self.assertEqual(detections, [])

        detections = detect(series(0, [1.0, 1.1, 0.9, 1.0, 1.05, 50.0]), SINGLE)
        self.assertEqual([record.t for record in detections], [5])

    def test_window_forgets_old_baseline(self):
        cfg = DetectorConfig(min_obs=3, detector_window=5)
        scores = ZScoreDetector(cfg).scores([5.0, 5.1, 4.9, 1.0, 1.1, 0.9, 1.0, 1.05, 1.0])
        self.assertTrue(np.all(np.isnan(scores[:3])))
        # the last score only sees frames 3..7
        baseline = np.array([1.0, 1.1, 0.9, 1.0, 1.05])
        self.assertAlmostEqual(scores[8], (1.0 - baseline.mean()) / baseline.std(ddof=1))

    def test_unordered_input(self):
        with self.assertRaises(ContractViolation):
            detect([(2, 0, 1.0), (1, 0, 1.0)])

    def test_users_are_independent(self):
        rng = np.random.default_rng(1)
        quiet = series(0, [1.0, 1.1] * 20)
        loud = series(1, list(rng.normal(1.0, 0.1, size=39)) + [8.0])
        merged = sorted(quiet + loud)

        detections = detect(merged, SINGLE)
        self.assertEqual({record.user_id for record in detections if record.t == 39}, {1})

    def test_array_columns(self):
        ts = np.arange(20)
        users = np.zeros(20, dtype=np.int64)
        risks = np.r_[np.linspace(1.0, 1.2, 19), 20.0]
        self.assertEqual([r.t for r in detect((ts, users, risks), SINGLE)], [19])

    def test_subsample_detections_are_full_stream_detections(self):
        rng = np.random.default_rng(2)
        risks = rng.normal(1.0, 0.2, size=(200, 4))
        risks[120:140, 2] += 5.0
        full = [(t, u, risks[t, u]) for t in range(200) for u in range(4)]
        subset = [(t, u, risks[t, u]) for t in range(200) for u in range(4) if u != 1]
        full_keys = {(r.t, r.user_id) for r in detect(full)}
        sub_keys = {(r.t, r.user_id) for r in detect(subset)}
        self.assertTrue(sub_keys <= full_keys)


class PersistenceTests(SimpleTestCase):

    def test_defaults(self):
        cfg = DetectorConfig()
        self.assertEqual((cfg.z_threshold, cfg.min_obs, cfg.detector_window, cfg.persistence), (2.5, 5, 50, 2))

    def test_single_spike_is_not_reported(self):
        self.assertEqual(detect(series(0, QUIET + [8.0])), [])
        self.assertEqual(detect(series(0, QUIET + [8.0, 1.0])), [])

    def test_shift_is_reported_on_second_observation(self):
        # t=10 scores about 100; t=11 sees a baseline holding the first 8.0 and scores about 3.0
        detections = detect(series(0, QUIET + [8.0, 8.0]))
        self.assertEqual([record.t for record in detections], [11])
        self.assertGreater(detections[0].z_score, 2.5)

    def test_direction_must_hold(self):
        scores = ZScoreDetector().scores(QUIET + [8.0, -6.0])
        self.assertGreater(scores[10], 2.5)
        self.assertLess(scores[11], -2.5)
        self.assertEqual(detect(series(0, QUIET + [8.0, -6.0])), [])

    def test_longer_runs(self):
        cfg = DetectorConfig(persistence=3)
        self.assertEqual(detect(series(0, QUIET + [8.0, 8.0]), cfg), [])
        self.assertEqual(detect(series(0, [1.0, 2.0]), cfg), [])

    def test_sparse_sampling_sees_the_same_run(self):
        # the same values observed every tenth frame give the same detections, ten times later
        risks = QUIET + [8.0, 8.0]
        dense = detect(series(0, risks))
        sparse = detect([(10 * i, 0, risk) for i, risk in enumerate(risks)])
        self.assertEqual([10 * record.t for record in dense], [record.t for record in sparse])

    def test_invalid(self):
        with self.assertRaises(ConfigurationError):
            DetectorConfig(persistence=0)


class EventRecallTests(SimpleTestCase):

    def setUp(self):
        events = [SecurityEvent(0, 10, 5, 3.0), SecurityEvent(1, 20, 5, 3.0), SecurityEvent(2, 30, 5, 3.0)]
        self.gt = GroundTruth(np.ones((40, 3)), events)

    def test_recall_values(self):
        values = [
            ('nothing', [], 0.0),
            ('all', [DetectionRecord(0, 10, 4.0), DetectionRecord(1, 24, 4.0), DetectionRecord(2, 31, 4.0)], 1.0),
            ('two of three', [DetectionRecord(0, 12, 4.0), DetectionRecord(1, 21, 4.0)], 2 / 3),
            ('outside the interval', [DetectionRecord(0, 9, 4.0), DetectionRecord(0, 15, 4.0)], 0.0),
            ('wrong user', [DetectionRecord(2, 12, 4.0)], 0.0),
        ]
        for label, detections, expected in values:
            with self.subTest(label=label):
                self.assertAlmostEqual(event_recall(detections, self.gt), expected)

    def test_repeated_detections_count_once(self):
        detections = [DetectionRecord(0, t, 4.0) for t in range(10, 15)]
        self.assertAlmostEqual(event_recall(detections, self.gt), 1 / 3)

    def test_no_events(self):
        recall = event_recall([DetectionRecord(0, 1, 5.0)], GroundTruth(np.ones((5, 2))))
        self.assertIs(recall, NO_EVENTS)
        self.assertIsInstance(recall, NoEvents)


class NormalizedRecallTests(SimpleTestCase):

    def test_ratio(self):
        self.assertEqual(normalized_recall(0.4, 0.8), 0.5)
        self.assertEqual(normalized_recall(0.8, 0.8), 1.0)
        self.assertEqual(normalized_recall(0.0, 0.5), 0.0)

    def test_undefined(self):
        with self.assertRaises(UndefinedNormalization):
            normalized_recall(0.3, 0.0)

    def test_capped(self):
        with self.assertWarns(RuntimeWarning):
            self.assertEqual(normalized_recall(0.9, 0.6), 1.0)

    def test_no_events(self):
        self.assertIs(normalized_recall(NO_EVENTS, NO_EVENTS), NO_EVENTS)


class WriteDetectionsTests(SimpleTestCase):

    def test_write(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'nested', 'detections.csv')
            written = write_detections([DetectionRecord(1, 4, 3.5), DetectionRecord(0, 7, -4.25)], path)

            self.assertEqual(str(written), path)
            with open(path, encoding='utf-8') as fp:
                self.assertEqual(fp.read(), 'user_id,t,z_score\n1,4,3.5\n0,7,-4.25\n')
