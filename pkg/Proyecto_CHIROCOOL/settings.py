"""
Django settings for Proyecto_CHIROCOOL project.

El proyecto no expone superficie web: Django aporta la configuración, el
registro de corridas (ORM + migraciones), los formularios de validación y los
comandos de administración que forman la línea de comandos.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
# Solo se usa para firmar; no hay sesiones ni usuarios.
SECRET_KEY = os.environ.get(
    "CHIROCOOL_SECRET_KEY", "django-insecure-chirocool-local-simulation-key"
)

DEBUG = os.environ.get("CHIROCOOL_DEBUG", "0") == "1"

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "App_CHIROCOOL",
]

MIDDLEWARE = []


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": BASE_DIR / "db.sqlite3",
    }
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = "es-AR"

TIME_ZONE = "America/Argentina/Buenos_Aires"

USE_I18N = True

USE_TZ = True


# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Logging
# https://docs.djangoproject.com/en/5.2/topics/logging/

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {
            "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "loggers": {
        "App_CHIROCOOL": {
            "handlers": ["console"],
            "level": os.environ.get("CHIROCOOL_LOG_LEVEL", "INFO"),
            "propagate": False,
        },
    },
}


# Parámetros numéricos del simulador (unidades: nu = 1, tiempos en 1/nu).
CHIROCOOL = {
    # Dimensión D máxima del espacio de Hilbert para ensamblar L explícito (D^2 x D^2)
    "SUPEROPERATOR_MAX_DIM": 256,
    # Hasta esta D el espacio nulo se obtiene con SVD densa
    "DENSE_SVD_MAX_DIM": 16,
    "DEGENERACY_RATIO": 1e3,
    "STEADY_RESIDUAL_TOL": 1e-10,
    "ODE_RTOL": 1e-9,
    "ODE_ATOL": 1e-12,
    "TRACE_DRIFT_TOL": 1e-8,
    "FIT_TRANSIENT_FACTOR": 5.0,
    "CROSSING_BAND": 0.005,
    "REDUCED_MAX_CONDITION": 1e12,
    "JOBS": int(os.environ.get("CHIROCOOL_JOBS", os.cpu_count() or 1)),
    "RESULTS_DIR": BASE_DIR / "results",
}
