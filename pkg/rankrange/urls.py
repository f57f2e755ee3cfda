from django.urls import path, include
from rest_framework.routers import DefaultRouter
from .views import (
    CounterexampleView,
    RangeComputationViewSet,
    StoredMatrixViewSet,
    ThresholdView,
)

router = DefaultRouter()
router.register(r"matrices", StoredMatrixViewSet, basename="matrix")
router.register(r"computations", RangeComputationViewSet, basename="computation")

urlpatterns = [
    path("", include(router.urls)),
    path("counterexample/", CounterexampleView.as_view(), name="counterexample"),
    path("threshold/", ThresholdView.as_view(), name="threshold"),
]
