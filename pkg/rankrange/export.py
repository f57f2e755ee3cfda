"""Region exports: vertex CSV, full JSON record and an SVG plot."""

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from django.template.loader import render_to_string

from .engine import Approximate, EmptyCertificate, NonEmptyWitness
from .geometry import RegionKind
from .matrix_io import format_float

VIEWPORT = 800
MARGIN = 0.1


@dataclass(frozen=True)
class RegionExport:
    kind: str
    vertices: tuple
    angles: tuple = ()
    offsets: tuple = ()
    certificate: dict = field(default_factory=dict)

    @classmethod
    def from_result(cls, result):
        return cls(
            kind=result.region.kind.value,
            vertices=tuple((z.real, z.imag) for z in result.region.vertices),
            angles=tuple(p.angle for p in result.planes),
            offsets=tuple(p.offset for p in result.planes),
            certificate=certificate_payload(result.certificate),
        )

    def to_payload(self):
        return {
            "kind": self.kind,
            "vertices": [list(v) for v in self.vertices],
            "angles": list(self.angles),
            "offsets": list(self.offsets),
            "certificate": self.certificate,
        }

    @classmethod
    def from_payload(cls, payload):
        return cls(
            kind=payload["kind"],
            vertices=tuple(tuple(v) for v in payload["vertices"]),
            angles=tuple(payload.get("angles", ())),
            offsets=tuple(payload.get("offsets", ())),
            certificate=payload.get("certificate", {}),
        )


def certificate_payload(certificate):
    if isinstance(certificate, EmptyCertificate):
        return {
            "type": certificate.kind,
            "angles": list(certificate.angles),
            "offsets": list(certificate.offsets),
            "radius": certificate.radius,
        }
    if isinstance(certificate, NonEmptyWitness):
        x = certificate.isometry.matrix
        return {
            "type": certificate.kind,
            "mu": [certificate.mu.real, certificate.mu.imag],
            "isometry": {"re": x.real.tolist(), "im": x.imag.tolist()},
        }
    return {"type": Approximate.kind}


def write_region_csv(export, path):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x", "y"])
        for x, y in export.vertices:
            writer.writerow([format_float(x), format_float(y)])
    return Path(path)


def read_region_csv(path):
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        return tuple((float(row["x"]), float(row["y"])) for row in reader)


def write_region_json(export, path):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(export.to_payload(), handle, indent=2)
    return Path(path)


def read_region_json(path):
    with open(path, encoding="utf-8") as handle:
        return RegionExport.from_payload(json.load(handle))


def render_region_svg(region, spectral_radius):
    """SVG of the region in an 800x800 viewport with a 10% margin.

    The unit circle is drawn for reference when the spectral radius is at most 5.
    """
    show_circle = spectral_radius <= 5
    points = [complex(0.0)] + list(region.vertices)
    if show_circle:
        points += [1, -1, 1j, -1j]
    z = np.array(points, dtype=np.complex128)
    low = complex(z.real.min(), z.imag.min())
    high = complex(z.real.max(), z.imag.max())
    span = max(high.real - low.real, high.imag - low.imag) or 1.0
    scale = VIEWPORT * (1 - 2 * MARGIN) / span
    middle = 0.5 * (low + high)

    def to_view(w):
        return (
            round(VIEWPORT / 2 + (w.real - middle.real) * scale, 3),
            round(VIEWPORT / 2 - (w.imag - middle.imag) * scale, 3),
        )

    view = [to_view(w) for w in region.vertices]
    origin = to_view(0j)
    context = {
        "size": VIEWPORT,
        "kind": region.kind.value,
        "origin": origin,
        "circle": {"cx": origin[0], "cy": origin[1], "r": round(scale, 3)} if show_circle else None,
        "polygon": " ".join(f"{x},{y}" for x, y in view) if region.kind == RegionKind.POLYGON else None,
        "point": view[0] if region.kind == RegionKind.POINT else None,
        "segment": view if region.kind == RegionKind.SEGMENT else None,
    }
    return render_to_string("rankrange/region.svg", context)


def write_region_svg(region, spectral_radius, path):
    Path(path).write_text(render_region_svg(region, spectral_radius), encoding="utf-8")
    return Path(path)
