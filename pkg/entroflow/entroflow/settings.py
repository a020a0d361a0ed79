import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# Quick-start development settings - unsuitable for production
# See https://docs.djangoproject.com/en/4.2/howto/deployment/checklist/

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv(
    'ENTROFLOW_SECRET_KEY',
    'django-insecure-entroflow-numerical-toolkit-without-web-surface',
)

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = False

ALLOWED_HOSTS: list = []


# Application definition

INSTALLED_APPS = [
    'core.apps.CoreConfig',
    'manifold.apps.ManifoldConfig',
    'operators.apps.OperatorsConfig',
    'flow.apps.FlowConfig',
    'entropy.apps.EntropyConfig',
    'diagnostics.apps.DiagnosticsConfig',
    'runner.apps.RunnerConfig',
]

TEMPLATES_DIR = BASE_DIR / 'templates'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [TEMPLATES_DIR],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [],
        },
    },
]


# Расчёты не используют базу данных.

DATABASES: dict = {}


# Internationalization
# https://docs.djangoproject.com/en/4.2/topics/i18n/

LANGUAGE_CODE = 'ru-RU'

TIME_ZONE = 'Europe/Moscow'

USE_I18N = True

USE_TZ = True


# Логирование

LOG_LEVEL = os.getenv('ENTROFLOW_LOG_LEVEL', 'WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '%(asctime)s [%(levelname)s] %(name)s: %(message)s',
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
    'loggers': {
        app: {
            'handlers': ['console'],
            'level': os.getenv('ENTROFLOW_APP_LOG_LEVEL', 'INFO'),
            'propagate': False,
        }
        for app in (
            'manifold',
            'operators',
            'flow',
            'entropy',
            'diagnostics',
            'runner',
        )
    },
}


# Численные параметры по умолчанию.

ENTROFLOW = {
    # Шаг по времени и сохранение массы.
    'DT_MAX': 0.05,
    'MASS_TOL': 1e-9,
    'SOLVER_RESIDUAL_TOL': 1e-10,
    # Порог плотности относительно max ũ и допустимая маскированная доля.
    'DENSITY_FLOOR': 1e-14,
    'MASKED_LIMIT': 0.01,
    'NORMALIZATION_TOL': 1e-8,
    # Спектр.
    'SEED': 42,
    'DENSE_SPECTRUM_LIMIT': 4096,
    'SPECTRAL_SHIFT': -1e-3,
    'EIGSH_MAXITER': 20000,
    'FIRST_NONZERO_FLOOR': 1e-9,
    'MULTIPLICITY_RTOL': 1e-6,
    'TRUNCATION_TOL': 1e-8,
    # Сборка операторов.
    'DEGENERATE_AREA': 1e-14,
    # Проверки: константы C модели допуска C·(Δx² + dt) по семействам
    # до калибровки на паре разрешений.
    'TOLERANCE_CONSTANTS': {
        'torus_kernel': 10.0,
        'sphere_kernel': 10.0,
        'weighted_torus': 10.0,
        'euclidean_oracle': 0.0,
        'custom': 10.0,
    },
    'ORACLE_TOL': 1e-8,
    'MONOTONE_TOL': 1e-6,
    'RIGIDITY_THRESHOLD': 1e-6,
    # Относительный шаг центральной разности для производных энтропий.
    'RATE_STEP': 1e-4,
    # Калибровка C: запас над наблюдаемым отношением ошибки к модели
    # и требуемое уменьшение невязки тождества при измельчении сетки.
    'CALIBRATION_MARGIN': 2.0,
    'REFINEMENT_FACTOR': 3.0,
    'MIN_RESOLUTION': 4,
    # Артефакты.
    'OUTPUT_DIR': 'runs',
    'CALIBRATION_FILE': 'calibration.json',
    'CHART_SIZE': (960, 540),
    'CSV_DIGITS': 17,
}
