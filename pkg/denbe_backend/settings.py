"""
Django settings for denbe_backend project.

Values are read from the environment (and an optional ``.env`` file next to
manage.py) through django-environ. The ``DENBE`` dictionary holds the
estimator and harness defaults; the CLI flags override them per invocation.
"""

from pathlib import Path

import environ

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

env = environ.Env(
    DEBUG=(bool, False),
    ALLOWED_HOSTS=(list, ['localhost', '127.0.0.1']),
    CORS_ALLOWED_ORIGINS=(list, ['http://localhost:5173']),
    DENBE_LOG_LEVEL=(str, 'INFO'),
)
environ.Env.read_env(BASE_DIR / '.env')

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = env('SECRET_KEY', default='django-insecure-denbe-local-development-key')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = env('DEBUG')

ALLOWED_HOSTS = env('ALLOWED_HOSTS')

# Application definition

INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
    'rest_framework',
    'corsheaders',
    'drr.apps.DrrConfig',
]

MIDDLEWARE = [
    'corsheaders.middleware.CorsMiddleware',
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'denbe_backend.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

WSGI_APPLICATION = 'denbe_backend.wsgi.application'


# Database
# Evaluation runs and their trial records. sqlite unless DATABASE_URL is set.

DATABASES = {
    'default': env.db('DATABASE_URL', default=f'sqlite:///{BASE_DIR / "db.sqlite3"}'),
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# Static files (CSS, JavaScript, Images)

STATIC_URL = 'static/'


# REST framework: the report API is read-only JSON.

REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
        'rest_framework.renderers.BrowsableAPIRenderer',
    ],
    'DEFAULT_PERMISSION_CLASSES': [
        'rest_framework.permissions.AllowAny',
    ],
}

# Plot front-ends fetch boxplot data from the report API.
CORS_ALLOWED_ORIGINS = env('CORS_ALLOWED_ORIGINS')
CORS_ALLOW_METHODS = ['GET', 'OPTIONS']


# Logging

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
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
        'drr': {
            'handlers': ['console'],
            'level': env('DENBE_LOG_LEVEL'),
            'propagate': False,
        },
    },
}


# DENBE estimator and harness defaults

DENBE = {
    # STFT: 32 ms sqrt-Hann frames, 50 % overlap
    'FRAME_MS': env.float('DENBE_FRAME_MS', default=32.0),
    'HOP_FRACTION': env.float('DENBE_HOP_FRACTION', default=0.5),
    'WINDOW': env.str('DENBE_WINDOW', default='sqrt_hann'),
    # reported dB range; the floor doubles as the "unable to estimate" sentinel
    'FLOOR_DB': env.float('DENBE_FLOOR_DB', default=-20.0),
    'CEIL_DB': env.float('DENBE_CEIL_DB', default=30.0),
    # fullband integration range
    'RANGE_LOW_HZ': env.float('DENBE_RANGE_LOW_HZ', default=200.0),
    'RANGE_HIGH_HZ': env.float('DENBE_RANGE_HIGH_HZ', default=6300.0),
    # beamformer usable floor
    'FLOOR_FREQUENCY_HZ': env.float('DENBE_FLOOR_FREQUENCY_HZ', default=200.0),
    'MIN_GAIN_SQ': env.float('DENBE_MIN_GAIN_SQ', default=1e-3),
    'MIC_SPACING_M': env.float('DENBE_MIC_SPACING_M', default=0.05),
    'SOUND_SPEED': env.float('DENBE_SOUND_SPEED', default=343.0),
    'REFERENCE_CHANNEL': env.int('DENBE_REFERENCE_CHANNEL', default=0),
    'ACTIVITY_GATE': env.float('DENBE_ACTIVITY_GATE', default=1e-6),
    'SILENT_BAND_DB': env.float('DENBE_SILENT_BAND_DB', default=-70.0),
    'MAX_LAG_S': env.float('DENBE_MAX_LAG_S', default=0.01),
    'MIN_CENTER_HZ': env.float('DENBE_MIN_CENTER_HZ', default=100.0),
    'WORKERS': env.int('DENBE_WORKERS', default=1),
    'SEED': env.int('DENBE_SEED', default=0),
}
