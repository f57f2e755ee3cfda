from django.contrib import admin
from .models import RangeComputation, StoredMatrix


@admin.register(StoredMatrix)
class StoredMatrixAdmin(admin.ModelAdmin):
    list_display = ["id", "name", "n", "created_at"]
    list_filter = ["n", "created_at"]
    search_fields = ["id", "name"]
    readonly_fields = ["created_at", "updated_at"]

    def get_queryset(self, request):
        qs = super().get_queryset(request)
        return qs.prefetch_related("computations")


@admin.register(RangeComputation)
class RangeComputationAdmin(admin.ModelAdmin):
    list_display = ["id", "matrix", "k", "grid_size", "kind", "certificate_type", "created_at"]
    list_filter = ["kind", "created_at", "matrix"]
    search_fields = ["matrix__id", "matrix__name"]
    date_hierarchy = "created_at"
    readonly_fields = ["created_at", "certificate_type"]

    def certificate_type(self, obj):
        return obj.certificate_type

    certificate_type.short_description = "Certificate"
