"""Settings used when riskbandit runs outside a Django project."""

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'riskbandit': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
    },
}

DEFAULTS = {
    'INSTALLED_APPS': ['riskbandit'],
    'USE_I18N': False,
    'LOGGING': LOGGING,
}
