"""Numerical defaults and their overrides from YAML configuration files."""

import logging

from ruamel.yaml import YAML
from ruamel.yaml.constructor import DuplicateKeyError
from ruamel.yaml.error import YAMLError

from diffbyint import suggestions
from diffbyint.exceptions import ConfigError

logger = logging.getLogger(__name__)

DEFAULTS = {
    "quad_tol": 1e-10,
    "validation_tol": 1e-9,
    "grid_size": 4097,
    "interpolation_degree": 7,
    "fabius_grid_size": 4097,
    "fabius_tol": 1e-12,
    "fabius_max_iterations": 200,
    "fabius_max_order": 8,
}

INTEGER_KEYS = {
    "grid_size",
    "interpolation_degree",
    "fabius_grid_size",
    "fabius_max_iterations",
    "fabius_max_order",
}


def _coerce(key, value):
    """Convert a configuration value to the type of its default."""
    if isinstance(value, bool):
        raise ConfigError(f"Configuration key '{key}' expects a number, got '{value}'.")
    try:
        converted = float(value)
    except (TypeError, ValueError):
        raise ConfigError(
            f"Configuration key '{key}' expects a number, got '{value}'."
        ) from None
    if key in INTEGER_KEYS:
        if not converted.is_integer():
            raise ConfigError(f"Configuration key '{key}' expects an integer, got '{value}'.")
        converted = int(converted)
    if not converted > 0:
        raise ConfigError(f"Configuration key '{key}' has to be positive, got '{value}'.")
    return converted


def parse_config(data):
    """Merge a mapping of overrides into the defaults."""
    if data is None:
        return dict(DEFAULTS)
    if not isinstance(data, dict):
        raise ConfigError("A configuration file has to contain a mapping of keys to values.")

    config = dict(DEFAULTS)
    for key, value in data.items():
        if key not in DEFAULTS:
            raise ConfigError(suggestions.fix_config_key(str(key), list(DEFAULTS)))
        config[key] = _coerce(key, value)
        logger.debug("Configuration sets %s = %r", key, config[key])
    return config


def load_config(file_path=None):
    """Read a YAML configuration file. Without a path the defaults are used."""
    if file_path is None:
        return dict(DEFAULTS)

    logger.info("Reading configuration from %s", file_path)
    yaml_parser = YAML(typ="rt")
    try:
        with open(file_path, "r") as yml_file:
            data = yaml_parser.load(yml_file)
    except DuplicateKeyError as dke:
        raise ConfigError(f"ruamel.yaml says '{dke.problem}'") from None
    except YAMLError as err:
        raise ConfigError(f"Cannot parse configuration file {file_path}: {err}") from None
    except OSError as err:
        raise ConfigError(f"Cannot read configuration file {file_path}: {err}") from None
    return parse_config(data)
