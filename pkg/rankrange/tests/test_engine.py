import math
from unittest import mock

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from rankrange.conf import DEFAULTS
from rankrange.engine import (
    Emptiness,
    EmptyCertificate,
    Membership,
    NonEmptyWitness,
    RankRangeQuery,
    Threshold,
    boundary_region,
    emptiness_check,
    grid_angles,
    membership,
    nonemptiness_threshold,
    outer_planes,
    support_value,
    support_values,
)
from rankrange.exceptions import DimensionMismatch, SynthesisFailed
from rankrange.geometry import ConvexRegion, RegionKind, hausdorff_distance
from rankrange.linalg import adjoint, random_gaussian_matrix, random_hermitian, random_unitary
from rankrange.normal import NormalSpectrum, hermitian_rank_interval, normal_exact_region
from rankrange.witness import verify_compression

W = np.exp(2j * np.pi / 3)
CUBE_ROOTS = np.diag([1.0, W, W**2])
FOURTH_ROOTS = np.diag([1.0, 1j, -1.0, -1j])
PLAIN = DEFAULTS.with_overrides(refine=False)


def outer_region(matrix, k, grid=720, settings=PLAIN):
    query = RankRangeQuery(matrix, k, grid_size=grid)
    return boundary_region(query, settings, attach_witness=False).region


class RankRangeQueryTestCase(SimpleTestCase):
    def test_defaults_come_from_settings(self):
        query = RankRangeQuery(np.eye(3), 1)
        self.assertEqual(query.grid_size, DEFAULTS.grid_size)
        self.assertEqual(query.n, 3)

    def test_k_out_of_range(self):
        with self.assertRaises(DimensionMismatch):
            RankRangeQuery(np.eye(3), 4)
        with self.assertRaises(DimensionMismatch):
            RankRangeQuery(np.eye(3), 0)

    def test_grid_too_small(self):
        with self.assertRaises(DimensionMismatch):
            RankRangeQuery(np.eye(3), 1, grid_size=4)


class SupportValueTestCase(SimpleTestCase):
    def test_cube_roots(self):
        self.assertAlmostEqual(support_value(CUBE_ROOTS, 2, 0.0), -1.0, places=12)

    def test_identity(self):
        for t in (0.0, 0.4, 2.0, 5.5):
            for k in (1, 3):
                self.assertAlmostEqual(support_value(np.eye(4), k, t), 2 * math.cos(t), places=12)

    def test_fourth_roots(self):
        self.assertAlmostEqual(support_value(FOURTH_ROOTS, 2, 0.0), 0.0, places=12)

    def test_batched_matches_single(self):
        a = random_gaussian_matrix(5, np.random.default_rng(2))
        angles = grid_angles(16)
        batched = support_values(a, 2, angles)
        assert_allclose(batched, [support_value(a, 2, t) for t in angles], atol=1e-12)

    def test_periodic_and_odd_under_half_turn(self):
        a = random_gaussian_matrix(4, np.random.default_rng(4))
        t = 0.9
        self.assertAlmostEqual(support_value(a, 1, t), support_value(a, 1, t + 2 * math.pi), places=10)
        # lambda_k(-H) = -lambda_{n-k+1}(H)
        self.assertAlmostEqual(support_value(a, 1, t + math.pi), -support_value(a, 4, t), places=10)


class MembershipTestCase(SimpleTestCase):
    def test_fourth_roots_origin(self):
        result = membership(RankRangeQuery(FOURTH_ROOTS, 2), 0)
        self.assertIn(result.verdict, (Membership.INSIDE, Membership.BOUNDARY))
        self.assertIsNone(result.violating_angle)

    def test_cube_roots_left_point_is_outside(self):
        result = membership(RankRangeQuery(CUBE_ROOTS, 2), -0.5)
        self.assertEqual(result.verdict, Membership.OUTSIDE)
        distance = min(
            abs(result.violating_angle - 2 * math.pi / 3),
            abs(result.violating_angle - 4 * math.pi / 3),
        )
        self.assertLess(distance, 1e-2)
        self.assertLess(result.min_slack, -1.0)

    def test_identity_single_point_is_boundary(self):
        result = membership(RankRangeQuery(np.eye(3), 1), 1)
        self.assertEqual(result.verdict, Membership.BOUNDARY)

    def test_far_point_is_outside(self):
        result = membership(RankRangeQuery(FOURTH_ROOTS, 1), 3 + 3j)
        self.assertEqual(result.verdict, Membership.OUTSIDE)

    def test_interior_point_is_inside(self):
        result = membership(RankRangeQuery(FOURTH_ROOTS, 1), 0.1 + 0.1j)
        self.assertEqual(result.verdict, Membership.INSIDE)


class BoundaryRegionTestCase(SimpleTestCase):
    def test_cube_roots_rank_two_is_empty(self):
        result = boundary_region(RankRangeQuery(CUBE_ROOTS, 2))
        self.assertTrue(result.region.is_empty)
        self.assertIsInstance(result.certificate, EmptyCertificate)
        assert_allclose(
            sorted(result.certificate.angles), [0.0, 2 * math.pi / 3, 4 * math.pi / 3], atol=1e-9
        )
        self.assertLess(result.certificate.radius, -0.1)
        self.assertTrue(ConvexRegion.empty().is_empty)

    def test_hermitian_single_value(self):
        result = boundary_region(RankRangeQuery(np.diag([3.0, 2.0, 1.0]), 2))
        self.assertEqual(result.region.kind, RegionKind.POINT)
        self.assertLess(abs(result.region.vertices[0] - 2.0), 1e-6)
        self.assertIsInstance(result.certificate, NonEmptyWitness)

    def test_fourth_roots_numerical_range(self):
        m = 720
        result = boundary_region(RankRangeQuery(FOURTH_ROOTS, 1, grid_size=m))
        exact = normal_exact_region(NormalSpectrum.of(FOURTH_ROOTS), 1)
        bound = 2 * math.sin(math.pi / (2 * m)) ** 2 * exact.diameter
        self.assertEqual(result.region.kind, RegionKind.POLYGON)
        self.assertLessEqual(hausdorff_distance(result.region, exact), bound + 1e-9)
        self.assertIsInstance(result.certificate, NonEmptyWitness)
        witness = result.certificate
        self.assertTrue(verify_compression(FOURTH_ROOTS, witness.isometry, witness.mu))

    def test_contains_exact_normal_region(self):
        rng = np.random.default_rng(21)
        values = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        u = random_unitary(6, rng)
        a = u @ np.diag(values) @ adjoint(u)
        exact = normal_exact_region(NormalSpectrum(tuple(values)), 2)
        outer = outer_region(a, 2)
        self.assertTrue(outer.contains_region(exact, tol=1e-8))

    def test_normal_matrices_match_exact_region(self):
        rng = np.random.default_rng(90)
        for n in range(3, 9):
            values = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            u = random_unitary(n, rng)
            a = u @ np.diag(values) @ adjoint(u)
            bound = 5e-3 * (1.0 + float(np.max(np.abs(values))))
            for k in range(1, n + 1):
                exact = normal_exact_region(NormalSpectrum(tuple(values)), k)
                region = outer_region(a, k, grid=1440)
                with self.subTest(n=n, k=k):
                    self.assertEqual(region.is_empty, exact.is_empty)
                    if not exact.is_empty:
                        self.assertLessEqual(hausdorff_distance(region, exact), bound)

    def test_fourth_roots_rank_two_is_origin(self):
        result = boundary_region(RankRangeQuery(FOURTH_ROOTS, 2))
        exact = normal_exact_region(NormalSpectrum.of(FOURTH_ROOTS), 2)
        self.assertEqual(result.region.kind, RegionKind.POINT)
        self.assertEqual(exact.kind, RegionKind.POINT)
        self.assertLess(abs(result.region.vertices[0]), 1e-3)
        self.assertLess(abs(result.region.vertices[0] - exact.vertices[0]), 1e-3)

    def test_hermitian_intervals(self):
        rng = np.random.default_rng(8)
        n, k = 6, 2
        for index in range(50):
            h = random_hermitian(n, rng)
            region = outer_region(h, k)
            exact = hermitian_rank_interval(np.linalg.eigvalsh(h), k)
            with self.subTest(index=index):
                self.assertEqual(region.kind, RegionKind.SEGMENT)
                assert_allclose(
                    sorted(z.real for z in region.vertices),
                    sorted(z.real for z in exact.vertices),
                    atol=1e-6,
                )
                self.assertLess(max(abs(z.imag) for z in region.vertices), 1e-6)

    def test_refinement_keeps_grid_monotonicity(self):
        a = random_gaussian_matrix(5, np.random.default_rng(14))
        refined = outer_region(a, 2, grid=64, settings=DEFAULTS)
        plain = outer_region(a, 2, grid=64)
        self.assertTrue(plain.contains_region(refined, tol=1e-9))
        query = RankRangeQuery(a, 2, grid_size=64)
        self.assertGreater(len(outer_planes(query, DEFAULTS)), 64)


class InvarianceTestCase(SimpleTestCase):
    grid = 64

    def instances(self, seed, count=50):
        rng = np.random.default_rng(seed)
        for index in range(count):
            yield index, rng, random_gaussian_matrix(4 + index % 3, rng)

    def test_unitary_similarity(self):
        for index, rng, a in self.instances(101):
            u = random_unitary(a.shape[0], rng)
            first = outer_region(a, 2, grid=self.grid)
            second = outer_region(adjoint(u) @ a @ u, 2, grid=self.grid)
            with self.subTest(index=index):
                self.assertLess(hausdorff_distance(first, second), 1e-8)

    def test_affine_covariance(self):
        for index, rng, a in self.instances(102):
            n = a.shape[0]
            turns = int(rng.integers(self.grid))
            alpha = rng.uniform(0.5, 2.0) * np.exp(2j * math.pi * turns / self.grid)
            beta = complex(rng.standard_normal(), rng.standard_normal())
            first = outer_region(alpha * a + beta * np.eye(n), 2, grid=self.grid)
            second = outer_region(a, 2, grid=self.grid).transformed(alpha, beta)
            with self.subTest(index=index):
                self.assertLess(hausdorff_distance(first, second), 1e-8)

    def test_nesting_in_k(self):
        for index, rng, a in self.instances(103):
            larger = outer_region(a, 1, grid=self.grid)
            smaller = outer_region(a, 2, grid=self.grid)
            with self.subTest(index=index):
                self.assertTrue(larger.contains_region(smaller, tol=1e-9))

    def test_half_turn_periodicity(self):
        for index, rng, a in self.instances(104):
            n = a.shape[0]
            k = int(rng.integers(1, n + 1))
            t = rng.uniform(0.0, 2.0 * math.pi)
            with self.subTest(index=index, k=k):
                self.assertAlmostEqual(
                    support_value(a, k, t + math.pi), -support_value(a, n - k + 1, t), places=9
                )

    def test_grid_refinement_monotonicity(self):
        for index, rng, a in self.instances(105):
            coarse = outer_region(a, 2, grid=self.grid)
            fine = outer_region(a, 2, grid=2 * self.grid)
            refined = outer_region(a, 2, grid=self.grid, settings=DEFAULTS)
            with self.subTest(index=index):
                self.assertTrue(coarse.contains_region(fine, tol=1e-9))
                self.assertTrue(coarse.contains_region(refined, tol=1e-9))
                self.assertTrue(refined.contains_region(fine, tol=1e-9))


class EmptinessTestCase(SimpleTestCase):
    def test_below_threshold_always_nonempty(self):
        rng = np.random.default_rng(300)
        for n in range(4, 11):
            for k in range(1, n + 1):
                if 3 * (k - 1) >= n:
                    continue
                for _ in range(2):
                    a = random_gaussian_matrix(n, rng)
                    with self.subTest(n=n, k=k):
                        result = emptiness_check(RankRangeQuery(a, k, grid_size=128))
                        self.assertEqual(result.verdict, Emptiness.PROVABLY_NONEMPTY)
                        witness = result.certificate
                        self.assertTrue(verify_compression(a, witness.isometry, witness.mu))

    def test_random_four_by_four_rank_two(self):
        a = random_gaussian_matrix(4, np.random.default_rng(31))
        result = emptiness_check(RankRangeQuery(a, 2))
        self.assertEqual(result.verdict, Emptiness.PROVABLY_NONEMPTY)
        self.assertEqual(result.threshold, Threshold.GUARANTEED_NONEMPTY)
        witness = result.certificate
        self.assertTrue(verify_compression(a, witness.isometry, witness.mu))

    def test_six_by_six_direct_sum(self):
        a = np.diag([1.0, 1.0, W, W, W**2, W**2])
        result = emptiness_check(RankRangeQuery(a, 3))
        self.assertEqual(result.verdict, Emptiness.PROVABLY_EMPTY)
        self.assertEqual(result.threshold, Threshold.POSSIBLY_EMPTY)
        self.assertIsInstance(result.certificate, EmptyCertificate)

    def test_zero_matrix(self):
        for k in (1, 2, 4):
            result = emptiness_check(RankRangeQuery(np.zeros((4, 4)), k))
            self.assertEqual(result.verdict, Emptiness.PROVABLY_NONEMPTY)
            self.assertLess(abs(result.certificate.mu), 1e-9)
            self.assertEqual(result.certificate.isometry.k, k)

    def test_rank_one_falls_back_to_eigenspace_witness(self):
        a = random_gaussian_matrix(5, np.random.default_rng(51))
        failing = mock.patch(
            "rankrange.engine.synthesize_isometry", side_effect=SynthesisFailed("stub", 1.0)
        )
        with failing:
            result = emptiness_check(RankRangeQuery(a, 1))
        self.assertEqual(result.verdict, Emptiness.PROVABLY_NONEMPTY)
        witness = result.certificate
        self.assertEqual(witness.isometry.k, 1)
        self.assertTrue(verify_compression(a, witness.isometry, witness.mu))

    def test_empty_certificate_planes_have_no_common_point(self):
        result = emptiness_check(RankRangeQuery(CUBE_ROOTS, 2))
        planes = result.certificate.planes()
        self.assertLessEqual(len(planes), 3)
        for mu in (0, -0.5, 0.25 + 0.4j):
            self.assertFalse(all(p.contains(mu) for p in planes))


class ThresholdTestCase(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(nonemptiness_threshold(4, 2), Threshold.GUARANTEED_NONEMPTY)
        self.assertEqual(nonemptiness_threshold(3, 2), Threshold.POSSIBLY_EMPTY)
        self.assertEqual(nonemptiness_threshold(6, 3), Threshold.POSSIBLY_EMPTY)
        self.assertEqual(nonemptiness_threshold(7, 3), Threshold.GUARANTEED_NONEMPTY)

    def test_invalid(self):
        with self.assertRaises(DimensionMismatch):
            nonemptiness_threshold(3, 4)
