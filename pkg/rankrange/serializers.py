import math

from rest_framework import serializers

from .models import RangeComputation, StoredMatrix


class StoredMatrixSerializer(serializers.ModelSerializer):
    """Serializer for StoredMatrix with shape and finiteness validation."""

    total_computations = serializers.IntegerField(read_only=True)

    class Meta:
        model = StoredMatrix
        fields = [
            "id",
            "name",
            "n",
            "real",
            "imag",
            "created_at",
            "updated_at",
            "total_computations",  # model property
        ]
        read_only_fields = ["id", "created_at", "updated_at"]

    def validate_n(self, value):
        if value <= 0:
            raise serializers.ValidationError("n must be positive")
        return value

    def validate(self, attrs):
        n = attrs.get("n", getattr(self.instance, "n", None))
        for name in ("real", "imag"):
            rows = attrs.get(name, getattr(self.instance, name, None))
            if not isinstance(rows, list) or len(rows) != n:
                raise serializers.ValidationError({name: f"must be a {n}x{n} array"})
            for row in rows:
                if not isinstance(row, list) or len(row) != n:
                    raise serializers.ValidationError({name: f"must be a {n}x{n} array"})
                for value in row:
                    if not isinstance(value, (int, float)) or not math.isfinite(value):
                        raise serializers.ValidationError(
                            {name: "entries must be finite numbers"}
                        )
        return attrs


class RangeComputationSerializer(serializers.ModelSerializer):
    """Serializer for stored range computations."""

    certificate_type = serializers.CharField(read_only=True)

    class Meta:
        model = RangeComputation
        fields = [
            "id",
            "matrix",
            "k",
            "grid_size",
            "kind",
            "vertices",
            "certificate",
            "certificate_type",  # model property
            "created_at",
        ]
        read_only_fields = fields


class RangeParamsSerializer(serializers.Serializer):
    k = serializers.IntegerField(min_value=1)
    grid = serializers.IntegerField(min_value=8, required=False)

    def validate_k(self, value):
        n = self.context.get("n")
        if n is not None and value > n:
            raise serializers.ValidationError(f"k must not exceed n={n}")
        return value


class PointParamsSerializer(RangeParamsSerializer):
    re = serializers.FloatField()
    im = serializers.FloatField(default=0.0)


class ThresholdParamsSerializer(serializers.Serializer):
    n = serializers.IntegerField(min_value=1)
    k = serializers.IntegerField(min_value=1)

    def validate(self, attrs):
        if attrs["k"] > attrs["n"]:
            raise serializers.ValidationError("k must not exceed n")
        return attrs


class CounterexampleParamsSerializer(ThresholdParamsSerializer):
    epsilon = serializers.FloatField(min_value=0.0, default=0.0)
    seed = serializers.IntegerField(default=0)
