"""
Settings for lyapid, read from YAML.
"""

import logging
import os

import yaml

log = logging.getLogger(__name__)

DEFAULTS_PATH = os.path.join(os.path.dirname(__file__), 'defaults.yaml')

SETTINGS = {'seed': int,
            'oracle_samples': int,
            'threads': int,
            'prefix_pairs': int,
            'database': str,
            'noise': str}
OPTIONAL_SETTINGS = {'noise'}
MINIMUM_VALUES = {'oracle_samples': 1, 'threads': 1, 'prefix_pairs': 0}
ENVIRONMENT = {'seed': 'LYAPID_SEED', 'database': 'LYAPID_DB'}


def _load_settings(file_path):
    """Read the known settings from one YAML file, checking their types."""
    with open(file_path, 'r') as file_stream:
        contents = yaml.safe_load(file_stream) or {}
    if not isinstance(contents, dict):
        raise ValueError('Config file {} must contain a mapping of settings'.format(file_path))
    settings = {}
    for setting, typ in SETTINGS.items():
        if setting not in contents:
            continue
        value = contents[setting]
        if value is None and setting in OPTIONAL_SETTINGS:
            settings[setting] = None
        elif isinstance(value, typ) and not isinstance(value, bool):
            settings[setting] = value
        else:
            raise ValueError('Config setting {} has wrong type; expected {}, got {}'.format(
                setting, typ.__name__, type(value).__name__))
    return settings


def _environment_settings():
    settings = {}
    for setting, variable in ENVIRONMENT.items():
        value = os.getenv(variable)
        if not value:
            continue
        if SETTINGS[setting] is int:
            try:
                value = int(value)
            except ValueError:
                raise ValueError('Environment variable {} must be an integer, got "{}"'.format(
                    variable, value)) from None
        settings[setting] = value
    return settings


def read_config(file_path=None):
    """Build the settings dictionary.

    Package defaults are overridden by LYAPID_SEED and LYAPID_DB, and those
    by the settings in `file_path` when one is given.

    :param file_path: optional path to a YAML configuration file
    """
    config = _load_settings(DEFAULTS_PATH)
    config.update(_environment_settings())
    if file_path is not None:
        log.info('Reading settings from %s', file_path)
        config.update(_load_settings(file_path))
    for setting, minimum in MINIMUM_VALUES.items():
        if config[setting] < minimum:
            raise ValueError('Config setting {} must be at least {}, got {}'.format(
                setting, minimum, config[setting]))
    return config
