from unittest import mock

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from rankrange.counterexample import (
    CounterexampleSpec,
    build_counterexample,
    largest_preserving_epsilon,
    perturb_nonnormal,
    rotation_certificate,
    strictly_upper_direction,
)
from rankrange.engine import Emptiness, RankRangeQuery, emptiness_check
from rankrange.exceptions import DimensionMismatch, EmptinessLost, ThresholdViolated
from rankrange.linalg import max_abs
from rankrange.normal import is_normal

W = np.exp(2j * np.pi / 3)


class BuildCounterexampleTestCase(SimpleTestCase):
    def test_three_by_three(self):
        assert_allclose(build_counterexample(CounterexampleSpec(3, 2)), np.diag([1, W, W**2]))

    def test_six_by_six(self):
        assert_allclose(
            build_counterexample(CounterexampleSpec(6, 3)), np.diag([1, 1, W, W, W**2, W**2])
        )

    def test_leading_block(self):
        assert_allclose(
            build_counterexample(CounterexampleSpec(5, 3)), np.diag([1, 1, W, W, W**2])
        )

    def test_below_threshold(self):
        with self.assertRaises(ThresholdViolated):
            CounterexampleSpec(4, 2)

    def test_k_out_of_range(self):
        with self.assertRaises(DimensionMismatch):
            CounterexampleSpec(3, 4)

    def test_emptiness_is_proved(self):
        for n, k in [(3, 2), (5, 3), (6, 3), (9, 4), (12, 5)]:
            with self.subTest(n=n, k=k):
                a = build_counterexample(CounterexampleSpec(n, k))
                result = emptiness_check(RankRangeQuery(a, k))
                self.assertEqual(result.verdict, Emptiness.PROVABLY_EMPTY)

    def test_rotation_certificate(self):
        for n, k in [(3, 2), (6, 3), (9, 4), (12, 5)]:
            with self.subTest(n=n, k=k):
                a = build_counterexample(CounterexampleSpec(n, k))
                self.assertLess(rotation_certificate(a, k).radius, -0.1)


class PerturbationTestCase(SimpleTestCase):
    def setUp(self):
        self.a = build_counterexample(CounterexampleSpec(3, 2))

    def test_direction(self):
        n = strictly_upper_direction(4, seed=1)
        self.assertTrue(np.all(np.tril(n) == 0))
        self.assertAlmostEqual(max_abs(n), 1.0)
        assert_allclose(n, strictly_upper_direction(4, seed=1))

    def test_zero_epsilon_is_identity(self):
        assert_allclose(perturb_nonnormal(self.a, 2, 0.0), self.a)

    def test_small_perturbation_stays_empty(self):
        perturbed = perturb_nonnormal(self.a, 2, 1e-3, seed=3)
        self.assertFalse(is_normal(perturbed))
        result = emptiness_check(RankRangeQuery(perturbed, 2))
        self.assertEqual(result.verdict, Emptiness.PROVABLY_EMPTY)

    def test_largest_preserving_epsilon(self):
        epsilon = largest_preserving_epsilon(self.a, 2, 1e-3, seed=3)
        self.assertGreater(epsilon, 0.99e-3)
        self.assertLessEqual(epsilon, 1e-3)

    def test_lost_emptiness_reports_safe_epsilon(self):
        base = self.a

        def stays_empty(matrix, k, settings):
            return max_abs(matrix - base) < 0.5

        with mock.patch("rankrange.counterexample._stays_empty", side_effect=stays_empty):
            with self.assertRaises(EmptinessLost) as ctx:
                perturb_nonnormal(base, 2, 1.0, seed=0)
        self.assertAlmostEqual(ctx.exception.largest_preserving_epsilon, 0.5, places=4)

    def test_negative_epsilon(self):
        with self.assertRaises(ValueError):
            perturb_nonnormal(self.a, 2, -1.0)
