#!/usr/bin/env python
"""Entry point for the rank-k numerical range project.

Besides the usual Django commands (migrate, runserver, test) it runs the
numerical command line, e.g. ``python manage.py rankrange range --matrix
data/normal4.json --k 1``.
"""
import os
import sys


def main():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "rankrange_site.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Django is required to run rankrange; install requirements.txt "
            "into the active virtual environment."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
