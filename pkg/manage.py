#!/usr/bin/env python
"""Command-line entry point: python manage.py <subcommand> ..."""
import os
import sys


def main():
    """Run a geomkit subcommand and exit with its code."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'project.settings')
    try:
        import django
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    django.setup()
    from geomkit.cli import dispatch
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == '__main__':
    main()
