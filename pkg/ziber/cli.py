"""`ziber` console script: manage.py for the ziber commands."""
import os
import sys


def main(argv=None):
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'ziber_project.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable?"
        ) from exc
    argv = sys.argv[1:] if argv is None else list(argv)
    execute_from_command_line(['ziber', *argv])


if __name__ == '__main__':
    main()
