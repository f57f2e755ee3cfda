"""WSGI entry point serving the rank-k numerical range API.

Numerical tolerances, logging level and the database are read from the
``RANKRANGE_*`` environment variables by ``rankrange_site.settings``.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "rankrange_site.settings")

application = get_wsgi_application()
