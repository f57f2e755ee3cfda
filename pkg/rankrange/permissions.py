from rest_framework import permissions


class IsAdminOrReadOnly(permissions.BasePermission):
    """Anyone may query stored matrices; only staff may store or change them."""

    def has_permission(self, request, view):
        # SAFE_METHODS are GET, HEAD, OPTIONS
        if request.method in permissions.SAFE_METHODS:
            return True

        # Storing matrices or computations requires admin
        return bool(request.user and request.user.is_staff)
