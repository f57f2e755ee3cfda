import json
from pathlib import Path

import numpy as np
from django.core.management.base import BaseCommand, CommandError

from rankrange.counterexample import CounterexampleSpec, build_counterexample, perturb_nonnormal
from rankrange.engine import (
    EmptyCertificate,
    Membership,
    NonEmptyWitness,
    RankRangeQuery,
    boundary_region,
    membership,
)
from rankrange.exceptions import EmptinessLost, RankRangeError, SynthesisFailed
from rankrange.export import (
    RegionExport,
    write_region_csv,
    write_region_json,
    write_region_svg,
)
from rankrange.linalg import adjoint
from rankrange.matrix_io import format_float, matrix_to_payload, read_matrix, write_matrix
from rankrange.normal import NormalSpectrum, is_normal, normal_exact_region
from rankrange.witness import compression_residual, synthesize_isometry

EXIT_USAGE = 1
EXIT_EMPTY = 2
EXIT_SYNTHESIS = 3


def _point(x, y):
    return f"({x:.6f}, {y:.6f})"


class Command(BaseCommand):
    help = "Rank-k numerical range of a square complex matrix: range, member, witness, counterexample, normal-exact"

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest="subcommand", required=True)

        cmd = subparsers.add_parser("range", help="Outer polygon of the rank-k range with a certificate")
        self._matrix_arguments(cmd)
        cmd.add_argument("--grid", type=int, default=None, help="Number of sampled angles")
        cmd.add_argument("--out", type=str, default=None, help="Vertex CSV path; JSON (and SVG) written alongside")
        cmd.add_argument("--svg", action="store_true", help="Also write an SVG plot next to --out")

        cmd = subparsers.add_parser("member", help="Is the point inside the rank-k range?")
        self._matrix_arguments(cmd)
        self._point_arguments(cmd)
        cmd.add_argument("--grid", type=int, default=None, help="Number of sampled angles")

        cmd = subparsers.add_parser("witness", help="Isometry X with X*AX = mu I_k")
        self._matrix_arguments(cmd)
        self._point_arguments(cmd)
        cmd.add_argument("--out", type=str, default="witness.json", help="JSON path for X. Default: witness.json")
        cmd.add_argument("--seed", type=int, default=0, help="Seed for the random starts. Default: 0")

        cmd = subparsers.add_parser("counterexample", help="Matrix with empty rank-k range")
        cmd.add_argument("--n", type=int, required=True)
        cmd.add_argument("--k", type=int, required=True)
        cmd.add_argument("--epsilon", type=float, default=0.0, help="Non-normal perturbation size. Default: 0")
        cmd.add_argument("--seed", type=int, default=0, help="Seed of the perturbation direction. Default: 0")
        cmd.add_argument("--out", type=str, default=None, help="Matrix file (.json or .csv); stdout when omitted")

        cmd = subparsers.add_parser("normal-exact", help="Exact rank-k range of a normal matrix")
        self._matrix_arguments(cmd)
        cmd.add_argument("--out", type=str, default=None, help="Vertex CSV path; JSON written alongside")

    def _matrix_arguments(self, parser):
        parser.add_argument("--matrix", type=str, required=True, help="Matrix file (.json or .csv)")
        parser.add_argument("--k", type=int, required=True)

    def _point_arguments(self, parser):
        parser.add_argument("--re", type=float, required=True)
        parser.add_argument("--im", type=float, default=0.0)

    def handle(self, *args, **options):
        handlers = {
            "range": self.handle_range,
            "member": self.handle_member,
            "witness": self.handle_witness,
            "counterexample": self.handle_counterexample,
            "normal-exact": self.handle_normal_exact,
        }
        try:
            handlers[options["subcommand"]](options)
        except EmptinessLost as exc:
            raise CommandError(str(exc), returncode=EXIT_USAGE)
        except SynthesisFailed as exc:
            raise CommandError(str(exc), returncode=EXIT_SYNTHESIS)
        except RankRangeError as exc:
            raise CommandError(str(exc), returncode=EXIT_USAGE)

    def _query(self, options):
        matrix = read_matrix(options["matrix"])
        return RankRangeQuery(matrix, options["k"], grid_size=options.get("grid"))

    def _write_region(self, export, out, region=None, spectral_radius=None, svg=False):
        csv_path = Path(out)
        write_region_csv(export, csv_path)
        write_region_json(export, csv_path.with_suffix(".json"))
        written = [csv_path, csv_path.with_suffix(".json")]
        if svg:
            written.append(write_region_svg(region, spectral_radius, csv_path.with_suffix(".svg")))
        for path in written:
            self.stdout.write(f"Wrote {path}")

    def _print_region(self, export):
        self.stdout.write(f"{export.kind.upper()} ({len(export.vertices)} vertices)")
        for x, y in export.vertices:
            self.stdout.write(f"  {_point(x, y)}")

    def handle_range(self, options):
        query = self._query(options)
        result = boundary_region(query)
        export = RegionExport.from_result(result)
        self._print_region(export)

        certificate = result.certificate
        if isinstance(certificate, EmptyCertificate):
            angles = ", ".join(f"{t:.3f}" for t in certificate.angles)
            self.stdout.write(f"Certificate: empty, angles {angles}, radius {certificate.radius:.3e}")
        elif isinstance(certificate, NonEmptyWitness):
            self.stdout.write(
                self.style.SUCCESS(
                    f"Certificate: witness isometry at {_point(certificate.mu.real, certificate.mu.imag)}"
                )
            )
        else:
            self.stdout.write(self.style.WARNING("Certificate: approximate (no witness verified)"))

        if options["out"]:
            spectral_radius = float(max(abs(v) for v in NormalSpectrum.of(query.matrix).eigenvalues))
            self._write_region(export, options["out"], result.region, spectral_radius, options["svg"])

        if result.region.is_empty:
            raise CommandError(f"rank-{query.k} range is empty", returncode=EXIT_EMPTY)

    def handle_member(self, options):
        query = self._query(options)
        mu = complex(options["re"], options["im"])
        result = membership(query, mu)
        if result.verdict == Membership.OUTSIDE:
            self.stdout.write(
                self.style.WARNING(f"Outside (violating angle {result.violating_angle:.6f})")
            )
            raise CommandError(
                f"{mu} lies outside the rank-{query.k} range", returncode=EXIT_EMPTY
            )
        self.stdout.write(self.style.SUCCESS(result.verdict.value.title()))

    def handle_witness(self, options):
        query = self._query(options)
        mu = complex(options["re"], options["im"])
        isometry = synthesize_isometry(query.matrix, query.k, mu, seed=options["seed"])
        x = isometry.matrix
        orthonormality = float(abs(adjoint(x) @ x - np.eye(query.k)).max())
        residual = compression_residual(query.matrix, isometry, mu)

        payload = {
            "n": query.n,
            "k": query.k,
            "mu": [mu.real, mu.imag],
            "re": x.real.tolist(),
            "im": x.imag.tolist(),
        }
        out = Path(options["out"])
        out.write_text(json.dumps(payload, indent=2), encoding="utf-8")
        self.stdout.write(
            self.style.SUCCESS(
                f"Witness written to {out}\n"
                f"Compression residual: {format_float(residual)}\n"
                f"Orthonormality residual: {format_float(orthonormality)}"
            )
        )

    def handle_counterexample(self, options):
        spec = CounterexampleSpec(options["n"], options["k"], options["epsilon"], options["seed"])
        matrix = perturb_nonnormal(
            build_counterexample(spec), spec.k, spec.perturbation, seed=spec.seed
        )
        if options["out"]:
            path = write_matrix(matrix, options["out"])
            self.stdout.write(self.style.SUCCESS(f"Wrote {spec.n}x{spec.n} matrix to {path}"))
        else:
            self.stdout.write(json.dumps(matrix_to_payload(matrix)))

    def handle_normal_exact(self, options):
        matrix = read_matrix(options["matrix"])
        if not is_normal(matrix):
            raise CommandError("matrix is not normal", returncode=EXIT_USAGE)
        region = normal_exact_region(NormalSpectrum.of(matrix), options["k"])
        export = RegionExport(
            kind=region.kind.value,
            vertices=tuple((z.real, z.imag) for z in region.vertices),
        )
        self._print_region(export)
        if options["out"]:
            self._write_region(export, options["out"])
        if region.is_empty:
            raise CommandError(f"rank-{options['k']} range is empty", returncode=EXIT_EMPTY)
