import os
import sys
import json
from typing import Dict

from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

import typer
import ncphase
from ncphase.errors import ConfigError

app = typer.Typer()

SECTIONS = ("nc", "quadrature", "series", "wigner")

# Values read with --config, keyed by section
_overrides: Dict[str, Dict] = {}


def defaults() -> Dict[str, Dict]:
    """Returns the package configuration, which also defines the valid keys."""
    with open(os.path.join(ncphase.__path__[0], "data", "config.json"), "r") as file:
        return json.load(file)


def _assign(config: Dict[str, Dict], key: str, val, known: Dict[str, Dict]) -> None:
    section, _, name = key.strip().partition(".")
    if section not in known or name not in known[section]:
        raise ConfigError(f"Invalid configuration key {key}")
    if isinstance(val, str):
        val = ncphase._coerce(val.strip())
    config.setdefault(section, {})[name] = val


def read_config_file(path: str) -> Dict[str, Dict]:
    """Reads a run configuration file.

    The file is either a flat ``section.name = value`` list, or a YAML mapping
    of sections when its suffix is ``.yaml`` or ``.yml``. Blank lines and
    ``#`` comments are ignored.

    Args:
        path (str): Path of the file.

    Returns:
        Dictionary of configuration values keyed by section.

    Raises:
        ConfigError("Invalid configuration"): If the file cannot be read or a key is unknown.

    Examples:
        >>> # nc.theta = 0.1
        >>> read_config_file("run.cfg")
        >>> {'nc': {'theta': 0.1}}
    """
    known = defaults()
    config = {}
    try:
        with open(path, "r", encoding="utf-8") as file:
            if path.endswith((".yaml", ".yml")):
                data = YAML(typ="safe").load(file) or {}
                if not isinstance(data, dict):
                    raise ConfigError(f"Invalid configuration file {path}")
                for section, vals in data.items():
                    if not isinstance(vals, dict):
                        _assign(config, str(section), vals, known)
                        continue
                    for name, val in vals.items():
                        _assign(config, f"{section}.{name}", val, known)
                return config

            for num, line in enumerate(file, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"Invalid configuration line {num} in {path}")
                key, val = line.split("=", 1)
                _assign(config, key, val, known)
    except (OSError, YAMLError) as err:
        raise ConfigError(f"Invalid configuration file {path}: {err}")

    return config


def load(path: str = None) -> None:
    """Sets the values of a run configuration file, or clears them."""
    global _overrides

    _overrides = read_config_file(path) if path else {}


def settings(section: str) -> Dict:
    """Returns the effective configuration of a section.

    Values of the run configuration file take precedence over
    :func:`ncphase.get_config`.
    """
    config = ncphase.get_config(section)
    config.update(_overrides.get(section, {}))
    return config


@app.command()
def show():
    '''Show the effective configuration'''
    yaml = YAML()
    print(f"You can edit the user config file located at: {os.path.expanduser('~/.ncphase/config.json')}")

    print("NCPHASE CONFIG")
    print("--------------------")

    yaml.dump({section: settings(section) for section in SECTIONS}, sys.stdout)


if __name__ == "__main__":
    app()
