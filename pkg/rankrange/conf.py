"""Tolerances and iteration limits shared by every numerical module.

Defaults live on :class:`RankRangeSettings`; a project overrides them through
the ``RANKRANGE`` dict in Django settings, e.g.::

    RANKRANGE = {"GEOMETRY_TOL": 1e-10, "GRID_SIZE": 1440}
"""

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class RankRangeSettings:
    geometry_tol: float = 1e-9
    hermitian_tol: float = 1e-10
    eig_tol: float = 1e-10
    isometry_tol: float = 1e-10
    subspace_tol: float = 1e-8
    compression_tol: float = 1e-8
    boundary_compression_tol: float = 1e-6
    normal_tol: float = 1e-10
    riccati_tol: float = 1e-8
    riccati_max_iter: int = 100
    grid_size: int = 720
    refine: bool = True
    synthesis_starts: int = 20
    synthesis_max_iter: int = 5000
    combinatorial_limit: int = 10**6
    workers: int = 1

    def with_overrides(self, **overrides):
        return replace(self, **overrides)


DEFAULTS = RankRangeSettings()


def get_settings():
    """Build the settings record from ``django.conf.settings.RANKRANGE``.

    Falls back to the dataclass defaults when Django is not configured, so the
    numerical modules stay importable as a plain library.
    """
    from django.conf import settings

    if not settings.configured:
        return DEFAULTS

    overrides = getattr(settings, "RANKRANGE", None) or {}
    known = {f.name for f in fields(RankRangeSettings)}
    values = {}
    for key, value in overrides.items():
        name = key.lower()
        if name in known:
            values[name] = value
    return replace(DEFAULTS, **values)
