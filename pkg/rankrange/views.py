import logging

from drf_spectacular.types import OpenApiTypes
from drf_spectacular.utils import OpenApiParameter, extend_schema
from rest_framework import viewsets
from rest_framework.decorators import action
from rest_framework.exceptions import ValidationError
from rest_framework.response import Response
from rest_framework.views import APIView

from .counterexample import CounterexampleSpec, build_counterexample, perturb_nonnormal
from .engine import (
    RankRangeQuery,
    boundary_region,
    emptiness_check,
    membership as check_membership,
    nonemptiness_threshold,
)
from .exceptions import EmptinessLost, RankRangeError, SynthesisFailed
from .export import RegionExport, certificate_payload
from .matrix_io import matrix_to_payload
from .models import RangeComputation, StoredMatrix
from .permissions import IsAdminOrReadOnly
from .serializers import (
    CounterexampleParamsSerializer,
    PointParamsSerializer,
    RangeComputationSerializer,
    RangeParamsSerializer,
    StoredMatrixSerializer,
    ThresholdParamsSerializer,
)
from .witness import compression, compression_residual, synthesize_isometry

logger = logging.getLogger(__name__)

K_PARAM = OpenApiParameter(
    name="k", type=OpenApiTypes.INT, location=OpenApiParameter.QUERY, required=True
)
GRID_PARAM = OpenApiParameter(
    name="grid",
    type=OpenApiTypes.INT,
    location=OpenApiParameter.QUERY,
    description="Number of sampled angles (default from settings)",
)
POINT_PARAMS = [
    K_PARAM,
    OpenApiParameter(name="re", type=OpenApiTypes.FLOAT, location=OpenApiParameter.QUERY, required=True),
    OpenApiParameter(name="im", type=OpenApiTypes.FLOAT, location=OpenApiParameter.QUERY),
]


def _params(serializer_class, request, **context):
    serializer = serializer_class(data=request.query_params, context=context)
    serializer.is_valid(raise_exception=True)
    return serializer.validated_data


def _bad_request(exc):
    logger.info("rejected request: %s", exc)
    return ValidationError({"detail": str(exc)})


@extend_schema(
    tags=["Matrices"],
    description="""
    Stored complex matrices and the rank-k numerical range queries on them.

    **Permissions:**
    - Anonymous users: Read-only (GET, HEAD, OPTIONS), including all queries
    - Admin users: Full access (GET, POST, PUT, PATCH, DELETE)
    """,
)
class StoredMatrixViewSet(viewsets.ModelViewSet):
    """ViewSet for StoredMatrix CRUD plus range, membership, witness and emptiness queries."""

    queryset = StoredMatrix.objects.all()
    serializer_class = StoredMatrixSerializer
    permission_classes = [IsAdminOrReadOnly]

    def _query(self, params):
        stored = self.get_object()
        try:
            return RankRangeQuery(stored.as_array(), params["k"], grid_size=params.get("grid"))
        except RankRangeError as exc:
            raise _bad_request(exc)

    @extend_schema(parameters=[K_PARAM, GRID_PARAM])
    @action(detail=True, methods=["get"])
    def range(self, request, pk=None):
        stored = self.get_object()
        params = _params(RangeParamsSerializer, request, n=stored.n)
        query = self._query(params)
        try:
            result = boundary_region(query)
        except RankRangeError as exc:
            raise _bad_request(exc)
        export = RegionExport.from_result(result)
        computation = RangeComputation(
            matrix=stored,
            k=query.k,
            grid_size=query.grid_size,
            kind=export.kind,
            vertices=[list(v) for v in export.vertices],
            certificate=export.certificate,
        )
        # only staff results are kept; anonymous queries are answered without a row
        if request.user and request.user.is_staff:
            computation.save()
        return Response(RangeComputationSerializer(computation).data)

    @extend_schema(parameters=POINT_PARAMS)
    @action(detail=True, methods=["get"])
    def membership(self, request, pk=None):
        stored = self.get_object()
        params = _params(PointParamsSerializer, request, n=stored.n)
        mu = complex(params["re"], params["im"])
        try:
            result = check_membership(self._query(params), mu)
        except RankRangeError as exc:
            raise _bad_request(exc)
        return Response(
            {
                "verdict": result.verdict.value,
                "min_slack": result.min_slack,
                "violating_angle": result.violating_angle,
            }
        )

    @extend_schema(parameters=POINT_PARAMS)
    @action(detail=True, methods=["get"])
    def witness(self, request, pk=None):
        stored = self.get_object()
        params = _params(PointParamsSerializer, request, n=stored.n)
        mu = complex(params["re"], params["im"])
        query = self._query(params)
        try:
            isometry = synthesize_isometry(query.matrix, query.k, mu)
        except SynthesisFailed as exc:
            return Response({"verified": False, "best_residual": exc.best_residual})
        except RankRangeError as exc:
            raise _bad_request(exc)
        c = compression(query.matrix, isometry)
        return Response(
            {
                "verified": True,
                "residual": compression_residual(query.matrix, isometry, mu),
                "isometry": {"re": isometry.matrix.real.tolist(), "im": isometry.matrix.imag.tolist()},
                "compression": {"re": c.real.tolist(), "im": c.imag.tolist()},
            }
        )

    @extend_schema(parameters=[K_PARAM, GRID_PARAM])
    @action(detail=True, methods=["get"])
    def emptiness(self, request, pk=None):
        stored = self.get_object()
        params = _params(RangeParamsSerializer, request, n=stored.n)
        try:
            result = emptiness_check(self._query(params))
        except RankRangeError as exc:
            raise _bad_request(exc)
        return Response(
            {
                "verdict": result.verdict.value,
                "threshold": result.threshold.value,
                "kind": result.region.kind.value,
                "certificate": certificate_payload(result.certificate),
            }
        )


@extend_schema(
    tags=["Computations"],
    description="""
    Stored boundary-region computations (read-only).

    **Filtering:**
    - Use ?matrix={id} query parameter to filter computations by matrix
    """,
)
class RangeComputationViewSet(viewsets.ReadOnlyModelViewSet):
    """Read-only ViewSet for RangeComputation with optional filtering by matrix."""

    queryset = RangeComputation.objects.select_related("matrix").all()
    serializer_class = RangeComputationSerializer

    def get_queryset(self):
        queryset = RangeComputation.objects.select_related("matrix").all()
        matrix_id = self.request.query_params.get("matrix", None)
        if matrix_id is not None:
            queryset = queryset.filter(matrix_id=matrix_id)
        return queryset


@extend_schema(
    tags=["Constructions"],
    parameters=[
        OpenApiParameter(name="n", type=OpenApiTypes.INT, location=OpenApiParameter.QUERY, required=True),
        K_PARAM,
        OpenApiParameter(name="epsilon", type=OpenApiTypes.FLOAT, location=OpenApiParameter.QUERY),
        OpenApiParameter(name="seed", type=OpenApiTypes.INT, location=OpenApiParameter.QUERY),
    ],
)
class CounterexampleView(APIView):
    """Direct sum of scaled identities whose rank-k range is empty, optionally perturbed."""

    def get(self, request):
        params = _params(CounterexampleParamsSerializer, request)
        try:
            spec = CounterexampleSpec(params["n"], params["k"], params["epsilon"], params["seed"])
            matrix = build_counterexample(spec)
            matrix = perturb_nonnormal(matrix, spec.k, spec.perturbation, seed=spec.seed)
        except EmptinessLost as exc:
            raise ValidationError(
                {
                    "detail": str(exc),
                    "largest_preserving_epsilon": exc.largest_preserving_epsilon,
                }
            )
        except RankRangeError as exc:
            raise _bad_request(exc)
        return Response(matrix_to_payload(matrix))


@extend_schema(
    tags=["Constructions"],
    parameters=[
        OpenApiParameter(name="n", type=OpenApiTypes.INT, location=OpenApiParameter.QUERY, required=True),
        K_PARAM,
    ],
)
class ThresholdView(APIView):
    """Whether every n x n matrix has a nonempty rank-k range."""

    def get(self, request):
        params = _params(ThresholdParamsSerializer, request)
        threshold = nonemptiness_threshold(params["n"], params["k"])
        return Response({"n": params["n"], "k": params["k"], "threshold": threshold.value})
