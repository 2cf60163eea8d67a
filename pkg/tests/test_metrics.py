import numpy as np
from django.test import SimpleTestCase

from riskbandit.exceptions import ContractViolation, EmptyInput
from riskbandit.metrics import (
    NEVER,
    CoverageCurve,
    Never,
    RewardRecord,
    coverage_curve,
    coverage_from_matrix,
    frame_reward,
    reward_ratios,
    summary_reward,
    time_to_coverage,
    total_reward,
)
from riskbandit.simulation import RiskFrame
from riskbandit.strategies import SelectionSet, select_oracle


class FrameRewardTests(SimpleTestCase):

    def setUp(self):
        self.frame = RiskFrame(4, np.array([4.0, 3.0, 2.0, 1.0]))
        self.oracle = select_oracle(self.frame, 2)

    def test_oracle_selection(self):
        record = frame_reward(self.oracle, self.frame, self.oracle)
        self.assertEqual(record, RewardRecord(4, 7.0, 7.0, 1.0))

    def test_partial(self):
        record = frame_reward(SelectionSet(4, (0, 3)), self.frame, self.oracle)
        self.assertEqual(record.rho, 5.0)
        self.assertAlmostEqual(record.ratio, 5 / 7)

        record = frame_reward(SelectionSet(4, (1, 2)), self.frame, self.oracle)
        self.assertAlmostEqual(record.ratio, 5 / 7)

        record = frame_reward(SelectionSet(4, (0, 2)), self.frame, self.oracle)
        self.assertAlmostEqual(record.ratio, 6 / 7)

    def test_all_zero_frame(self):
        frame = RiskFrame(2, np.zeros(4))
        record = frame_reward(SelectionSet(2, (1, 3)), frame, select_oracle(frame, 2))
        self.assertEqual(record.ratio, 1.0)
        self.assertEqual(record.rho_oracle, 0.0)

    def test_frame_mismatch(self):
        with self.assertRaises(ContractViolation):
            frame_reward(SelectionSet(5, (0, 1)), self.frame, self.oracle)

    def test_order_does_not_change_sum(self):
        frame = RiskFrame(0, np.array([0.1, 0.2, 0.3, 1e-17]))
        oracle = select_oracle(frame, 4)
        shuffled = SelectionSet(0, (3, 0, 2, 1))
        self.assertEqual(frame_reward(shuffled, frame, oracle).ratio, 1.0)

    def test_vectorised_ratios(self):
        np.testing.assert_array_equal(reward_ratios([1.0, 0.0, 3.0], [2.0, 0.0, 3.0]), [0.5, 1.0, 1.0])


class SummaryRewardTests(SimpleTestCase):

    def test_mean(self):
        records = [RewardRecord(t, 1.0, 2.0, ratio) for t, ratio in enumerate([1.0, 0.5, 0.75])]
        self.assertAlmostEqual(summary_reward(records), 0.75)
        self.assertAlmostEqual(total_reward(records), 2.25)

    def test_plain_floats(self):
        self.assertEqual(summary_reward([1.0, 1.0]), 1.0)

    def test_empty(self):
        with self.assertRaises(EmptyInput):
            summary_reward([])


class CoverageTests(SimpleTestCase):

    def test_nothing_logged(self):
        curve = coverage_curve([], 10)
        self.assertEqual(len(curve), 0)
        self.assertEqual(curve.at(5), 0.0)

    def test_two_samples_required(self):
        log = [SelectionSet(1, (0,)), SelectionSet(2, (1,)), SelectionSet(3, (2,)), SelectionSet(5, (0,))]
        curve = coverage_curve(log, 4)

        np.testing.assert_array_equal(curve.frames, [1, 2, 3, 5])
        np.testing.assert_array_equal(curve.fractions, [0.0, 0.0, 0.0, 0.25])
        self.assertEqual(curve.at(4), 0.0)
        self.assertEqual(curve.at(5), 0.25)
        self.assertEqual(time_to_coverage(curve, 0.25), 5)

    def test_matrix_matches_log(self):
        rng = np.random.default_rng(0)
        selected = np.array([rng.choice(10, size=3, replace=False) for _ in range(30)])
        frames = np.arange(1, 31)
        log = [SelectionSet(int(t), tuple(int(u) for u in row)) for t, row in zip(frames, selected)]

        from_log = coverage_curve(log, 10)
        from_matrix = coverage_from_matrix(frames, selected, 10)
        np.testing.assert_array_equal(from_log.fractions, from_matrix.fractions)

    def test_initial_selection_counts_once(self):
        log = [SelectionSet(1, (0, 1)), SelectionSet(2, (2, 3))]
        frames, selected = np.array([1, 2]), np.array([[0, 1], [2, 3]])
        values = [
            ('log', lambda initial: coverage_curve(log, 4, initial)),
            ('matrix', lambda initial: coverage_from_matrix(frames, selected, 4, initial)),
        ]
        for label, curve in values:
            with self.subTest(label=label):
                np.testing.assert_array_equal(curve(()).fractions, [0.0, 0.0])
                np.testing.assert_array_equal(curve((0, 1)).fractions, [0.5, 0.5])
                np.testing.assert_array_equal(curve((1, 2)).fractions, [0.25, 0.5])

    def test_monotone(self):
        rng = np.random.default_rng(1)
        selected = np.array([rng.choice(50, size=5, replace=False) for _ in range(100)])
        curve = coverage_from_matrix(np.arange(100), selected, 50)
        self.assertTrue(np.all(np.diff(curve.fractions) >= 0))


class TimeToCoverageTests(SimpleTestCase):

    def test_never(self):
        curve = CoverageCurve(np.arange(3), np.array([0.0, 0.1, 0.2]))
        result = time_to_coverage(curve, 0.95)
        self.assertIs(result, NEVER)
        self.assertIsInstance(result, Never)
        self.assertEqual(str(result), 'never')

    def test_first_frame_reaching(self):
        curve = CoverageCurve(np.array([1, 2, 3, 4]), np.array([0.2, 0.6, 0.96, 1.0]))
        self.assertEqual(time_to_coverage(curve, 0.95), 3)
        self.assertEqual(time_to_coverage(curve, 1.0), 4)

    def test_invalid_fraction(self):
        curve = CoverageCurve(np.arange(1), np.ones(1))
        for fraction in (0.0, -0.5, 1.5):
            with self.subTest(fraction=fraction):
                with self.assertRaises(ValueError):
                    time_to_coverage(curve, fraction)
