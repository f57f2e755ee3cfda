from unittest import mock

from django.contrib.auth.models import User
from rest_framework import status
from rest_framework.test import APITestCase

from rankrange.exceptions import NoConvergence, Unbounded
from rankrange.models import RangeComputation, StoredMatrix


def diagonal_payload(values, name="diag"):
    n = len(values)
    real = [[0.0] * n for _ in range(n)]
    imag = [[0.0] * n for _ in range(n)]
    for i, v in enumerate(values):
        real[i][i] = complex(v).real
        imag[i][i] = complex(v).imag
    return {"name": name, "n": n, "real": real, "imag": imag}


class StoredMatrixViewSetTestCase(APITestCase):
    def setUp(self):
        self.admin_user = User.objects.create_user(
            username="admin",
            password="testpass123",
            is_staff=True,
        )
        self.regular_user = User.objects.create_user(
            username="user",
            password="testpass123",
        )
        self.matrix = StoredMatrix.objects.create(**diagonal_payload([1, 1j, -1, -1j], "roots"))

    def test_list_matrices(self):
        response = self.client.get("/api/matrices/")
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data), 1)
        self.assertIn("total_computations", response.data[0])

    def test_retrieve_matrix(self):
        response = self.client.get(f"/api/matrices/{self.matrix.id}/")
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["n"], 4)
        self.assertEqual(response.data["imag"][1][1], 1.0)

    def test_create_matrix_admin(self):
        self.client.force_authenticate(user=self.admin_user)
        response = self.client.post(
            "/api/matrices/", diagonal_payload([2, 3], "small"), format="json"
        )
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertEqual(StoredMatrix.objects.count(), 2)

    def test_create_matrix_anonymous_forbidden(self):
        response = self.client.post("/api/matrices/", diagonal_payload([2, 3]), format="json")
        self.assertEqual(response.status_code, status.HTTP_403_FORBIDDEN)

    def test_create_matrix_regular_user_forbidden(self):
        self.client.force_authenticate(user=self.regular_user)
        response = self.client.post("/api/matrices/", diagonal_payload([2, 3]), format="json")
        self.assertEqual(response.status_code, status.HTTP_403_FORBIDDEN)

    def test_create_matrix_wrong_shape(self):
        self.client.force_authenticate(user=self.admin_user)
        data = {"n": 2, "real": [[1, 2, 3], [4, 5, 6]], "imag": [[0, 0], [0, 0]]}
        response = self.client.post("/api/matrices/", data, format="json")
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn("real", response.data)

    def test_partial_update_matrix_admin(self):
        self.client.force_authenticate(user=self.admin_user)
        response = self.client.patch(
            f"/api/matrices/{self.matrix.id}/", {"name": "renamed"}, format="json"
        )
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.matrix.refresh_from_db()
        self.assertEqual(self.matrix.name, "renamed")

    def test_delete_matrix_admin(self):
        self.client.force_authenticate(user=self.admin_user)
        response = self.client.delete(f"/api/matrices/{self.matrix.id}/")
        self.assertEqual(response.status_code, status.HTTP_204_NO_CONTENT)
        self.assertEqual(StoredMatrix.objects.count(), 0)

    def test_range_is_stored(self):
        self.client.force_authenticate(user=self.admin_user)
        response = self.client.get(f"/api/matrices/{self.matrix.id}/range/", {"k": 1, "grid": 64})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["kind"], "polygon")
        self.assertEqual(response.data["grid_size"], 64)
        self.assertEqual(response.data["certificate_type"], "witness")
        self.assertEqual(RangeComputation.objects.count(), 1)
        self.assertEqual(self.matrix.total_computations, 1)

    def test_anonymous_range_is_not_stored(self):
        response = self.client.get(f"/api/matrices/{self.matrix.id}/range/", {"k": 1, "grid": 64})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["kind"], "polygon")
        self.assertIsNone(response.data["id"])
        self.assertEqual(RangeComputation.objects.count(), 0)

    def test_range_k_too_large(self):
        response = self.client.get(f"/api/matrices/{self.matrix.id}/range/", {"k": 5})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertEqual(RangeComputation.objects.count(), 0)

    def test_range_missing_k(self):
        response = self.client.get(f"/api/matrices/{self.matrix.id}/range/")
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_membership(self):
        url = f"/api/matrices/{self.matrix.id}/membership/"
        response = self.client.get(url, {"k": 1, "re": 0, "im": 0})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["verdict"], "inside")
        self.assertIsNone(response.data["violating_angle"])

        response = self.client.get(url, {"k": 1, "re": 2, "im": 2})
        self.assertEqual(response.data["verdict"], "outside")
        self.assertIsNotNone(response.data["violating_angle"])

    def test_witness(self):
        url = f"/api/matrices/{self.matrix.id}/witness/"
        response = self.client.get(url, {"k": 2, "re": 0})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertTrue(response.data["verified"])
        self.assertLessEqual(response.data["residual"], 1e-8)
        self.assertEqual(len(response.data["isometry"]["re"]), 4)

    def test_emptiness(self):
        response = self.client.get(f"/api/matrices/{self.matrix.id}/emptiness/", {"k": 2})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["verdict"], "provably_nonempty")
        self.assertEqual(response.data["threshold"], "guaranteed_nonempty")

    @mock.patch("rankrange.views.check_membership")
    def test_membership_numerical_failure(self, check):
        check.side_effect = NoConvergence("Hermitian eigendecomposition is inaccurate", 1.0)
        url = f"/api/matrices/{self.matrix.id}/membership/"
        response = self.client.get(url, {"k": 1, "re": 0})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    @mock.patch("rankrange.views.emptiness_check")
    def test_emptiness_numerical_failure(self, check):
        check.side_effect = Unbounded("no feasible point")
        response = self.client.get(f"/api/matrices/{self.matrix.id}/emptiness/", {"k": 2})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_emptiness_of_cube_roots(self):
        w = complex(-0.5, 3**0.5 / 2)
        stored = StoredMatrix.objects.create(**diagonal_payload([1, w, w.conjugate()]))
        response = self.client.get(f"/api/matrices/{stored.id}/emptiness/", {"k": 2})
        self.assertEqual(response.data["verdict"], "provably_empty")
        self.assertEqual(response.data["certificate"]["type"], "empty")


class RangeComputationViewSetTestCase(APITestCase):
    def setUp(self):
        self.first = StoredMatrix.objects.create(**diagonal_payload([1, 2], "first"))
        self.second = StoredMatrix.objects.create(**diagonal_payload([3, 4], "second"))
        for matrix in (self.first, self.second):
            RangeComputation.objects.create(
                matrix=matrix,
                k=1,
                grid_size=720,
                kind="segment",
                vertices=[[1.0, 0.0], [2.0, 0.0]],
                certificate={"type": "approximate"},
            )

    def test_list_computations(self):
        response = self.client.get("/api/computations/")
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data), 2)

    def test_filter_by_matrix(self):
        response = self.client.get(f"/api/computations/?matrix={self.first.id}")
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data), 1)
        self.assertEqual(response.data[0]["matrix"], self.first.id)

    def test_read_only(self):
        admin = User.objects.create_user(username="admin", password="x", is_staff=True)
        self.client.force_authenticate(user=admin)
        response = self.client.post("/api/computations/", {}, format="json")
        self.assertEqual(response.status_code, status.HTTP_405_METHOD_NOT_ALLOWED)


class ConstructionViewsTestCase(APITestCase):
    def test_counterexample(self):
        response = self.client.get("/api/counterexample/", {"n": 3, "k": 2})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["n"], 3)
        self.assertAlmostEqual(response.data["re"][1][1], -0.5)
        self.assertAlmostEqual(response.data["im"][2][2], -(3**0.5) / 2)

    def test_counterexample_below_threshold(self):
        response = self.client.get("/api/counterexample/", {"n": 4, "k": 2})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_threshold(self):
        response = self.client.get("/api/threshold/", {"n": 4, "k": 2})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["threshold"], "guaranteed_nonempty")
        response = self.client.get("/api/threshold/", {"n": 3, "k": 2})
        self.assertEqual(response.data["threshold"], "possibly_empty")

    def test_threshold_invalid(self):
        response = self.client.get("/api/threshold/", {"n": 2, "k": 3})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_schema(self):
        response = self.client.get("/api/schema/")
        self.assertEqual(response.status_code, status.HTTP_200_OK)
