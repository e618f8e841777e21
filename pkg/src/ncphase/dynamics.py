"""Exact dynamics of the noncommutative free particle.

The equations of motion of the commutative variables are

    dQ1/dt = Pi1/m + gamma Q2        dPi1/dt = -m gamma^2 Q1 + gamma Pi2
    dQ2/dt = Pi2/m - gamma Q1        dPi2/dt = -m gamma^2 Q2 - gamma Pi1

and the flow is linear with period pi/gamma. Closed forms are evaluated with
``sin(gamma t) / gamma = t sinc(gamma t / pi)`` so that they stay exact as
gamma approaches zero.
"""
from __future__ import annotations
from typing import List, Sequence

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging
import math

import numpy as np

import ncphase
from .errors import DegenerateGamma, ValidationError
from .nc_core import Coefficients, PhaseState

InitialConditions = PhaseState
"""Initial conditions ``(x, y, pi_x, pi_y)`` stored as a phase state at ``t = 0``."""

COMMUTATIVE_THRESHOLD = 1e-10


def initial_conditions(x: float, y: float, pix: float, piy: float) -> InitialConditions:
    return PhaseState(x, y, pix, piy, 0.0)


@dataclass(frozen=True)
class Trajectory:
    """Phase-space states sampled on an increasing time grid.

    Attributes:
        states: Sampled states.
        omegas: Constant of motion per sample.
        gamma: Frequency used for the evolution.
    """
    states: List[PhaseState]
    omegas: np.ndarray
    gamma: float

    @property
    def times(self) -> np.ndarray:
        return np.array([state.t for state in self.states])

    def as_array(self) -> np.ndarray:
        """Returns rows ``(t, Q1, Q2, Pi1, Pi2, Omega)``."""
        return np.column_stack([
            self.times,
            np.array([state.as_array() for state in self.states]).reshape(-1, 4),
            self.omegas,
        ])

    @property
    def omega_drift(self) -> float:
        """Returns the maximum relative deviation of Omega from its first sample."""
        ref = self.omegas[0]
        scale = abs(ref) if ref != 0 else 1.0
        return float(np.max(np.abs(self.omegas - ref)) / scale)


def free_particle_coefficients(gamma: float, m: float = 1.0, hbar: float = 1.0) -> Coefficients:
    """Returns the Hamiltonian coefficients with ``mu = 1`` for a given frequency.

    The momentum noncommutativity is ``eta = 2 m hbar gamma``, so that
    ``alpha / beta = m gamma``.
    """
    if gamma < 0 or m <= 0 or hbar <= 0:
        raise ValidationError("Invalid free particle parameters")
    eta = 2.0 * m * hbar * gamma
    return Coefficients(
        alpha2=eta ** 2 / (8.0 * m * hbar ** 2),
        beta2=1.0 / (2.0 * m),
        gamma=gamma,
    )


def evolution_matrix(gamma: float, m: float, t: float) -> np.ndarray:
    """Returns the 4x4 flow matrix acting on ``(Q1, Q2, Pi1, Pi2)``.

    ``gamma = 0`` gives the free motion ``Q(t) = Q + Pi t / m``.

    Raises:
        ValidationError: If gamma is negative or m is not positive.
    """
    if gamma < 0:
        raise ValidationError("Invalid gamma, must be non-negative")
    if m <= 0:
        raise ValidationError("Invalid mass, must be positive")

    c = math.cos(gamma * t)
    s = math.sin(gamma * t)
    sg = t * float(np.sinc(gamma * t / math.pi))
    k = m * gamma
    return np.array([
        [c * c, s * c, sg * c / m, s * sg / m],
        [-s * c, c * c, -s * sg / m, sg * c / m],
        [-k * s * c, -k * s * s, c * c, s * c],
        [k * s * s, -k * s * c, -s * c, c * c],
    ])


def evolve(ic: InitialConditions, gamma: float, m: float, t: float) -> PhaseState:
    """Evolves initial conditions with the closed-form solutions.

    Args:
        ic (InitialConditions): State at ``t = 0``.
        gamma (float): Characteristic frequency, positive.
        m (float): Mass.
        t (float): Time.

    Returns:
        State at time ``t``.

    Raises:
        DegenerateGamma: If ``gamma <= 0``; use :func:`evolve_commutative`.

    Examples:
        >>> evolve(initial_conditions(0.5, 0.5, 0.5, 0.5), 1.0, 1.0, math.pi / 2)
        >>> PhaseState(q1=0.5, q2=-0.5, pi1=-0.5, pi2=0.5, t=1.5707963267948966)
    """
    if not gamma > 0:
        raise DegenerateGamma(f"Invalid gamma {gamma}, use the commutative evolution")
    vals = evolution_matrix(gamma, m, t) @ ic.as_array()
    return PhaseState.from_array(vals, t)


def evolve_commutative(ic: InitialConditions, m: float, t: float) -> PhaseState:
    """Evolves initial conditions as a commutative free particle.

    ``Q(t) = Q + Pi t / m`` and ``Pi(t) = Pi``, the gamma -> 0 limit of :func:`evolve`.
    """
    if m <= 0:
        raise ValidationError("Invalid mass, must be positive")
    return PhaseState(ic.q1 + ic.pi1 * t / m, ic.q2 + ic.pi2 * t / m, ic.pi1, ic.pi2, t)


def invert_evolution(state: PhaseState, gamma: float, m: float, t: float) -> InitialConditions:
    """Recovers initial conditions from the state at time ``t``.

    The flow is a one-parameter group, hence the inverse is the evolution by ``-t``.

    Raises:
        DegenerateGamma: If ``gamma <= 0``.
    """
    if not gamma > 0:
        raise DegenerateGamma(f"Invalid gamma {gamma}, use the commutative evolution")
    vals = evolution_matrix(gamma, m, -t) @ state.as_array()
    return PhaseState.from_array(vals, 0.0)


def omega(state: PhaseState, coeff: Coefficients, m: float = 1.0) -> float:
    """Returns the constant of motion Omega.

    ``Omega = (alpha/beta) Q^2 + (beta/alpha) Pi^2 + 2 (Pi1 Q2 - Pi2 Q1)``,
    which equals ``H / (alpha beta)``. The mass enters through the coefficients.

    Raises:
        ValidationError: If alpha or beta is not positive.
    """
    if not (coeff.alpha2 > 0 and coeff.beta2 > 0):
        raise ValidationError("Invalid coefficients, alpha and beta must be positive")
    ratio = coeff.ratio
    q1, q2, pi1, pi2 = state.q1, state.q2, state.pi1, state.pi2
    return (
        ratio * (q1 * q1 + q2 * q2)
        + (pi1 * pi1 + pi2 * pi2) / ratio
        + 2.0 * (pi1 * q2 - pi2 * q1)
    )


def sample_trajectory(ic: InitialConditions, gamma: float, m: float, t_grid: Sequence[float], hbar: float = 1.0) -> Trajectory:
    """Samples the closed-form trajectory on a time grid.

    If ``gamma`` is zero, or ``gamma * max|t| * max|ic|`` is positive and below
    ``1e-10``, the commutative free motion is used instead. Omega is computed
    whenever ``gamma > 0`` and reported as zero otherwise.

    Args:
        ic (InitialConditions): State at ``t = 0``.
        gamma (float): Characteristic frequency, non-negative.
        m (float): Mass.
        t_grid: Strictly increasing times.
        hbar (float): Reduced Planck constant, used for the Omega coefficients.

    Returns:
        Trajectory with Omega attached to every sample.

    Raises:
        ValidationError: If the grid is empty or not strictly increasing.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) == 0:
        raise ValidationError("Invalid time grid")
    if np.any(np.diff(t_grid) <= 0):
        raise ValidationError("Invalid time grid, must be strictly increasing")
    if gamma < 0:
        raise ValidationError("Invalid gamma, must be non-negative")

    scale = float(np.max(np.abs(t_grid))) * float(np.max(np.abs(ic.as_array())))
    # a zero scale leaves nothing to evolve, the closed form is exact there
    if gamma == 0 or 0 < gamma * scale < COMMUTATIVE_THRESHOLD:
        logging.warning("gamma = %g is negligible, using commutative free motion.", gamma)
        states = [evolve_commutative(ic, m, t) for t in t_grid]
        if gamma == 0:
            return Trajectory(states, np.zeros(len(states)), gamma)
    else:
        with ThreadPoolExecutor(max_workers=ncphase.max_workers()) as executor:
            states = list(executor.map(lambda t: evolve(ic, gamma, m, float(t)), t_grid))

    coeff = free_particle_coefficients(gamma, m, hbar)
    if not coeff.alpha2 > 0:
        # gamma underflows in alpha
        return Trajectory(states, np.zeros(len(states)), gamma)
    omegas = np.array([omega(state, coeff, m) for state in states])

    return Trajectory(states, omegas, gamma)
