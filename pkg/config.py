"""
Configuration presets for the binary forms toolkit.
Contains settings for the different environments the toolkit runs in.
"""

import os

# Bumped whenever a change alters census output; part of every cache key
CODE_VERSION = "1.0.0"

# Version of the JSON documents printed by the CLI
SCHEMA_VERSION = "1"

BASE_PRECISION = {
    'ladder': (256, 1024, 4096),
    'max_bits': 4096,
    'denominator_bound': 10 ** 6,
    'profile_digits': 12
}

# Environment-specific configurations
ENVIRONMENTS = {
    'development': {
        'precision': {**BASE_PRECISION},
        'census': {
            'cache_path': None,
            'jobs': 1,
            'fingerprint_bound': 1
        },
        'logging': {
            'level': 'DEBUG',
            'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            'json': False
        }
    },

    'testing': {
        'precision': {
            **BASE_PRECISION,
            'ladder': (256, 1024)
        },
        'census': {
            'cache_path': None,
            'jobs': 1,
            'fingerprint_bound': 1
        },
        'logging': {
            'level': 'WARNING',
            'format': '%(levelname)s - %(name)s - %(message)s',
            'json': False
        }
    },

    'production': {
        'precision': {**BASE_PRECISION},
        'census': {
            'cache_path': None,
            'jobs': os.cpu_count() or 1,
            'fingerprint_bound': 1
        },
        'logging': {
            'level': 'WARNING',
            'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            'json': True
        }
    }
}
