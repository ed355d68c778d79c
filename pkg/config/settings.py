"""
Django settings for the Three-Spin Quantum Transistor Simulator.
"""

from pathlib import Path
from decouple import config

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config('SECRET_KEY', default='your-secret-key-change-in-production')

DEBUG = config('DEBUG', default=True, cast=bool)

# Application Branding
APP_NAME = config('APP_NAME', default='Three-Spin Quantum Transistor Simulator')
APP_SHORT_NAME = config('APP_SHORT_NAME', default='QTRANS')
APP_VERSION = config('APP_VERSION', default='1.0.0')

# Application definition
INSTALLED_APPS = [
    # Third party apps
    'rest_framework',

    # Local apps
    'apps.qmatrix',
    'apps.spinchain',
    'apps.unitary',
    'apps.opensys',
    'apps.transistor',
]

# Simulations keep no persistent state; run artifacts are CSV and manifest files.
DATABASES = {}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

# Logging
LOG_LEVEL = config('LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'apps': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}

# Linear algebra
QMATRIX_JACOBI_MAX_DIM = config('QMATRIX_JACOBI_MAX_DIM', default=64, cast=int)
QMATRIX_KRON_MAX_ENTRIES = config('QMATRIX_KRON_MAX_ENTRIES', default=2 ** 20, cast=int)

# Solvers
RK4_MAX_HALVINGS = config('RK4_MAX_HALVINGS', default=8, cast=int)
BLOCKADE_SCAN_MAX_POINTS = config('BLOCKADE_SCAN_MAX_POINTS', default=50_000_000, cast=int)

# Experiment runs
TRANSISTOR_OUTPUT_DIR = config('TRANSISTOR_OUTPUT_DIR', default=str(BASE_DIR / 'output'))
SWEEP_EXECUTOR = config('SWEEP_EXECUTOR', default='threads')
SWEEP_MAX_WORKERS = config('SWEEP_MAX_WORKERS', default=4, cast=int)

# Celery Configuration
CELERY_BROKER_URL = config('CELERY_BROKER_URL', default='redis://localhost:6379')
CELERY_RESULT_BACKEND = config('CELERY_RESULT_BACKEND', default='redis://localhost:6379')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TASK_ALWAYS_EAGER = config('CELERY_TASK_ALWAYS_EAGER', default=False, cast=bool)
