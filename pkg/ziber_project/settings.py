"""
Django settings for the ziber project.

The project has no database, URLs or middleware; Django provides the
settings layer, logging configuration and the management-command CLI.
"""
import os
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent


SECRET_KEY = os.environ.get('ZIBER_SECRET_KEY', 'ziber-local-only-not-a-secret')

DEBUG = False

ALLOWED_HOSTS = []


INSTALLED_APPS = [
    'rest_framework',
    'ziber',
]

DATABASES = {}

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


ZIBER = {
    'MAX_ITERS': 500,
    'GRAD_TOL': 1e-6,
    'N_RESTARTS': 5,
    'EPS_BOUNDS': (-0.5, 0.95),
    'SEED': 0,
    'LEVEL': 0.95,
    'DIVERGENCE_GUARD': 30.0,
    'TABLE_DECIMALS': 4,
}


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'ziber': {
            'handlers': ['console'],
            'level': os.environ.get('ZIBER_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}
