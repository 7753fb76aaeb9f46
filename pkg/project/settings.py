"""
Django settings for the geomkit project.

Only the run ledger touches the database; everything else is read by the
command layer and handed to the kernel as explicit arguments.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
import os
import dj_database_url
from dotenv import load_dotenv
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv("DJANGO_SECRET_KEY", "change-me-in-prod")

DEBUG = os.getenv("DJANGO_DEBUG", "0") == "1"

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'geomkit',
]


# Database (run ledger)
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    "default": dj_database_url.config(
        # local default is sqlite; DATABASE_URL overrides it
        default=f"sqlite:///{BASE_DIR / 'db.sqlite3'}",
        conn_max_age=600,
        ssl_require=False,
    )
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Kernel defaults

GEOMKIT = {
    "DEFAULT_TRUNC": int(os.getenv("GEOMKIT_DEFAULT_TRUNC", "8")),
    "DEFAULT_ORDER": int(os.getenv("GEOMKIT_DEFAULT_ORDER", "6")),
    "DEFAULT_TOL": float(os.getenv("GEOMKIT_DEFAULT_TOL", "1e-8")),
    "DEFAULT_DEPTH": int(os.getenv("GEOMKIT_DEFAULT_DEPTH", "3")),
    "RETRY_CAP": int(os.getenv("GEOMKIT_RETRY_CAP", "16")),
    "DEFAULT_SEED": int(os.getenv("GEOMKIT_DEFAULT_SEED", "0")),
    "REPORT_SCHEMA": "geomkit.report/1",
}


# Logging: stdout carries the JSON report, so everything goes to stderr

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "stderr": {
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
            "formatter": "plain",
        },
    },
    "loggers": {
        "geomkit": {
            "handlers": ["stderr"],
            "level": os.getenv("GEOMKIT_LOG_LEVEL", "WARNING").upper(),
            "propagate": False,
        },
    },
}
