import pytest

import math
import os.path

import numpy as np

import ncphase
from ncphase.nc_core import PhaseState

ncphase.TESTING = True


def random_states(num: int=100, scale: float=5.0, seed: int=0):
    """Returns random phase-space states.

    Returns:
        List of states with components in (-scale, scale)
    """
    rng = np.random.default_rng(seed)
    return [PhaseState.from_array(vals) for vals in rng.uniform(-scale, scale, size=(num, 4))]


def nc_parameters():
    """Returns (theta, eta, hbar) triples with theta * eta < hbar^2."""
    return [
        (0.0, 0.0, 1.0),
        (0.3, 0.7, 1.0),
        (0.75, 1.0, 1.0),
        (0.1, 2.5, 0.8),
        (2.0, 0.45, 1.0),
    ]


def gamma_times():
    """Returns values of gamma t covering one period of the entropies."""
    return [0.0, math.pi / 6, math.pi / 4, math.pi / 3, math.pi / 2, 2 * math.pi / 3, math.pi, 5 * math.pi / 4]


def sigma_grid(num: int=31):
    return np.geomspace(0.1, 10.0, num)


def rotor_models():
    return ["rotor2d-nc", "rotor2d-std", "rotor3d-nc", "rotor3d-std"]


def read_table(path):
    """Reads a CSV table written by the command-line interface.

    Returns:
        Tuple of comments, header and rows; numeric cells are converted to float
    """
    comments, rows = [], []
    header = None

    def convert(cell):
        if cell == "":
            return None
        try:
            return float(cell)
        except ValueError:
            return cell

    with open(path, "r") as file:
        for line in file.read().splitlines():
            if line.startswith("#"):
                comments.append(line[1:].strip())
            elif header is None:
                header = line.split(",")
            else:
                rows.append([convert(cell) for cell in line.split(",")])

    return comments, header, rows


def write_config(path, text: str):
    """Writes a run configuration file and returns its path."""
    with open(path, "w") as file:
        file.write(text)
    return str(path)
