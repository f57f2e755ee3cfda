"""Matrix files: JSON ``{"n", "re", "im"}`` or CSV cells written as ``a+bi``."""

import csv
import json
import math
from pathlib import Path

import numpy as np
from rest_framework import serializers

from .exceptions import MatrixFormatError


def format_float(value):
    return format(float(value), ".17g")


def format_complex(z):
    z = complex(z)
    imag = format_float(z.imag)
    sign = "" if imag.startswith("-") else "+"
    return f"{format_float(z.real)}{sign}{imag}i"


def parse_complex(cell):
    text = cell.strip().replace(" ", "").replace("i", "j")
    try:
        value = complex(text)
    except ValueError as exc:
        raise MatrixFormatError(f"cannot parse complex cell {cell!r}") from exc
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise MatrixFormatError(f"non-finite cell {cell!r}")
    return value


class MatrixPayloadSerializer(serializers.Serializer):
    """Validates the JSON matrix format shared by files and the HTTP API."""

    n = serializers.IntegerField(min_value=1)
    re = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()))
    im = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField()), required=False
    )

    def validate(self, attrs):
        n = attrs["n"]
        real = attrs["re"]
        imag = attrs.get("im") or [[0.0] * n for _ in range(n)]
        for name, rows in (("re", real), ("im", imag)):
            if len(rows) != n or any(len(row) != n for row in rows):
                raise serializers.ValidationError({name: f"must be a {n}x{n} array"})
            if not all(math.isfinite(v) for row in rows for v in row):
                raise serializers.ValidationError({name: "entries must be finite"})
        attrs["im"] = imag
        return attrs


def payload_to_matrix(payload):
    serializer = MatrixPayloadSerializer(data=payload)
    if not serializer.is_valid():
        raise MatrixFormatError(f"invalid matrix payload: {serializer.errors}")
    data = serializer.validated_data
    return np.array(data["re"], dtype=float) + 1j * np.array(data["im"], dtype=float)


def matrix_to_payload(matrix):
    a = np.asarray(matrix, dtype=np.complex128)
    return {
        "n": int(a.shape[0]),
        "re": [[float(v) for v in row] for row in a.real],
        "im": [[float(v) for v in row] for row in a.imag],
    }


def read_matrix(path):
    path = Path(path)
    try:
        if path.suffix.lower() == ".csv":
            with open(path, newline="", encoding="utf-8") as handle:
                rows = [row for row in csv.reader(handle) if row]
            if not rows or any(len(row) != len(rows) for row in rows):
                raise MatrixFormatError(f"{path} does not hold a square matrix")
            return np.array([[parse_complex(cell) for cell in row] for row in rows])
        with open(path, encoding="utf-8") as handle:
            return payload_to_matrix(json.load(handle))
    except FileNotFoundError as exc:
        raise MatrixFormatError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path} is not valid JSON: {exc}") from exc


def write_matrix(matrix, path):
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            for row in np.asarray(matrix):
                writer.writerow([format_complex(z) for z in row])
        return path
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(matrix_to_payload(matrix), handle, indent=2)
    return path
