import numpy as np
from django.db import models

from .geometry import RegionKind


class StoredMatrix(models.Model):
    """A square complex matrix kept for repeated rank-k range queries."""

    name = models.CharField(max_length=100, blank=True)
    n = models.PositiveIntegerField()

    # Row-major real and imaginary parts, n x n each
    real = models.JSONField()
    imag = models.JSONField()

    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    def __str__(self):
        return f"Matrix {self.id}: {self.name or 'unnamed'} ({self.n}x{self.n})"

    def as_array(self):
        return np.array(self.real, dtype=float) + 1j * np.array(self.imag, dtype=float)

    @property
    def total_computations(self):
        return self.computations.count()


class RangeComputation(models.Model):
    """Stored outcome of one boundary-region computation."""

    KIND_CHOICES = [(kind.value, kind.name.title()) for kind in RegionKind]

    matrix = models.ForeignKey(
        StoredMatrix, on_delete=models.CASCADE, related_name="computations"
    )
    k = models.PositiveIntegerField()
    grid_size = models.PositiveIntegerField()
    kind = models.CharField(max_length=10, choices=KIND_CHOICES)
    vertices = models.JSONField(default=list)
    certificate = models.JSONField(default=dict)

    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ["-created_at"]

    def __str__(self):
        return f"Rank-{self.k} range of matrix {self.matrix_id}: {self.kind}"

    @property
    def certificate_type(self):
        return self.certificate.get("type", "approximate")
