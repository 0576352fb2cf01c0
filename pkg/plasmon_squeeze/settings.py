"""
Django settings for the plasmon_squeeze project.

The project has no database, URLs or views: Django is used for its app
registry, settings and management-command framework. Each simulation
module is an installed app exposing services, and the `experiments` app
exposes the command-line surface.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Load environment variables from .env file
load_dotenv(BASE_DIR / '.env')


SECRET_KEY = os.environ.get('PLASMON_SQUEEZE_SECRET_KEY', 'plasmon-squeeze-offline-only')

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'optics',
    'quantum',
    'kinetics',
    'detection',
    'fitting',
    'experiments',
]

DATABASES = {}

USE_TZ = True

TIME_ZONE = 'UTC'

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Run outputs

OUTPUT_ROOT = Path(os.environ.get('PLASMON_SQUEEZE_OUTPUT_ROOT', BASE_DIR / 'output'))

REFERENCE_VALUES_PATH = BASE_DIR / 'experiments' / 'data' / 'reference_values.json'

TOOL_VERSION = '0.1.0'


LOG_LEVEL = os.environ.get('PLASMON_SQUEEZE_LOG', 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': LOG_LEVEL,
    },
}
