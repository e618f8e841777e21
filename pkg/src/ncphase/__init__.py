"""
ncphase
"""
from __future__ import annotations
from typing import Dict, Union

import sys
import os
import json
import logging

from .errors import (
    NCPhaseError,
    ValidationError,
    ConstraintViolation,
    DomainError,
    QuantumNumberError,
    DegenerateGamma,
    ConfigError,
    NumericalError,
    QuadratureFailure,
    ConvergenceError,
)

__version__ = "1.0.0"

MAX_WORKERS = 4

_max_workers = None


def is_testing() -> bool:
    """Returns unit testing state.

    Returns:
        True if performing unit tests, False otherwise
    """
    return getattr(sys.modules[__name__], "TESTING", False)


def _coerce(val: str) -> Union[int, float, str]:
    """Converts an environment string to int or float when possible."""
    for cls in (int, float):
        try:
            return cls(val)
        except ValueError:
            pass
    return val


def get_environment_config(key: str) -> Dict:
    """Returns configuration parameters for the specified key from environmental variables.

    Args:
        key (str): Configuration key.

    Returns:
        Dictionary of configuration parameters for the specified key.

    Examples:
        >>> # NCPHASE_NC_ETA=0.5
        >>> ncphase.get_environment_config("nc")
        >>> {'eta': 0.5}
    """
    config = {}

    prefix = "NCPHASE_" + key.upper() + "_"
    start = len(prefix)
    for name, val in os.environ.items():
        if not name.startswith(prefix):
            continue
        config[name[start:].lower()] = _coerce(val)

    return config


def config_paths() -> list:
    """Returns the directories searched for ``config.json``, lowest priority first."""
    paths = [os.path.join(__path__[0], "data")]
    if not is_testing():
        paths.append(os.path.expanduser("~/.ncphase"))
    return paths


def get_config(key: str) -> Dict:
    """Returns configuration parameters for the specified key.

    Configuration parameters are read from the following sources:

    1. Configuration file of the package located at ``{package_root}/data/config.json``
    2. Configuration file of the user located at ``~/.ncphase/config.json`` (skipped while testing).
    3. Environmental variables of the user starting with ``NCPHASE_{KEY}_``.

    Args:
        key (str): Configuration key (``nc``, ``quadrature``, ``series`` or ``wigner``).

    Returns:
        Dictionary of configuration parameters for the specified key.

    Raises:
        ConfigError("Invalid configuration file"): If a configuration file is not a JSON object.

    Examples:
        >>> ncphase.get_config("nc")
        >>> {'theta': 0.0, 'eta': 2.0, 'hbar': 1.0, 'mass': 1.0, 'mu': 1.0}
    """
    config = {}

    for path in config_paths():
        try:
            with open(os.path.join(path, "config.json"), "r") as file:
                data = json.load(file)
        except FileNotFoundError:
            continue
        if not isinstance(data, dict):
            raise ConfigError(f"Invalid configuration file {path}")
        logging.info("Configuration is read from %s.", path)
        if key in data and isinstance(data[key], dict):
            config.update(data[key])

    config.update(get_environment_config(key))

    return config


def set_max_workers(num: int=None, force: bool=False) -> int:
    """Sets number of maximum workers for grid evaluations and sweeps.

    Maximum number of workers is limited to `MAX_WORKERS`, unless `force`
    flag is set. If ``num`` is not given, ``NCPHASE_JOBS`` is used when set.

    Args:
        num (int): Maximum number of workers.
        force (bool): Set True to increase the number beyond `MAX_WORKERS` (default False).

    Returns:
        Maximum number of workers.

    Raises:
        ValidationError("Invalid maximum number of workers"): If the number is more than the number of available cores.
    """
    global _max_workers

    if num is None and os.environ.get("NCPHASE_JOBS"):
        try:
            num = int(os.environ["NCPHASE_JOBS"])
        except ValueError:
            raise ValidationError("Invalid NCPHASE_JOBS value")

    if not num and num is not None:
        num = 1

    if hasattr(os, "sched_getaffinity"):
        max = len(os.sched_getaffinity(0))
    else:
        max = os.cpu_count() or 1
    logging.info("Number of available cores is %d.", max)

    if num is None:
        num = max

    elif num > max and not force:
        raise ValidationError("Invalid maximum number of workers")

    if not force and num > MAX_WORKERS:
        logging.info("Limiting %d maximum workers to %d.", num, MAX_WORKERS)
        num = MAX_WORKERS

    _max_workers = num

    return _max_workers


def max_workers() -> int:
    """Returns maximum number of workers for grid evaluations and sweeps."""
    global _max_workers

    return _max_workers if _max_workers else set_max_workers()


def debug(state: bool=True) -> None:
    level = logging.DEBUG if state else logging.INFO
    logging.basicConfig(level=level)


from . import nc_core, numerics, dynamics, wigner, qinfo, thermo
