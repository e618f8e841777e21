"""Wigner functions of the noncommutative free particle.

Two families of states are provided:

* star-genstates, stationary Wigner functions written with Laguerre
  polynomials of the constant of motion Omega, and
* Gaussian envelopes in the momenta of the inverted dynamics, which
  decohere and revive with period pi/gamma.

Positions are confined to a box of half-width ``a`` so that the free
particle states can be normalized.
"""
from __future__ import annotations
from typing import Callable, Optional, Sequence, Tuple

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging
import math

import numpy as np
from scipy.integrate import simpson

import ncphase
from .errors import QuantumNumberError, ValidationError
from .nc_core import Coefficients, PhaseState
from .dynamics import evolution_matrix, omega
from .numerics import QuadratureSpec, integrate_1d, integrate_2d

DEFAULT_BOX = 3.0

# |det P| below this value means the envelope is spread over all momenta.
DELOCALISED = 1e-12

LAGUERRE_CLIP = 2000.0


def laguerre(n: int, x):
    """Returns the Laguerre polynomial ``L_n^0(x)``.

    Uses the recurrence ``(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}``.

    Args:
        n (int): Degree, non-negative.
        x: Scalar or array argument.

    Returns:
        Polynomial value(s) with the shape of ``x``.

    Raises:
        QuantumNumberError: If ``n`` is negative.

    Examples:
        >>> laguerre(1, 2.0)
        >>> -1.0
    """
    if n < 0 or int(n) != n:
        raise QuantumNumberError(f"Invalid degree {n}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 - x
    for k in range(1, int(n)):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def stargen_energy(n: int, gamma: float, hbar: float = 1.0) -> float:
    """Returns the star-genvalue ``E_n = hbar gamma (2n + 1)``."""
    if n < 0:
        raise QuantumNumberError(f"Invalid quantum number {n}")
    return hbar * gamma * (2 * n + 1)


@dataclass(frozen=True)
class StargenState:
    """Star-genstate of the free particle.

    Attributes:
        n: Quantum number.
        coeff: Hamiltonian coefficients.
        a: Half-width of the position box.
        norm: Normalization constant.
        hbar: Reduced Planck constant.
    """
    n: int
    coeff: Coefficients
    a: float = DEFAULT_BOX
    norm: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.n < 0:
            raise QuantumNumberError(f"Invalid quantum number {self.n}")
        if not self.a > 0:
            raise ValidationError("Invalid box half-width, must be positive")
        if not self.norm > 0:
            raise ValidationError("Invalid normalization, must be positive")
        if not (self.coeff.alpha2 > 0 and self.coeff.beta2 > 0):
            raise ValidationError("Invalid coefficients, star-genstates need gamma > 0")

    @property
    def energy(self) -> float:
        return stargen_energy(self.n, self.coeff.gamma, self.hbar)


def _stargen_values(s: StargenState, q1, q2, pi1, pi2, norm: float):
    q1, q2, pi1, pi2 = np.broadcast_arrays(*(np.asarray(val, dtype=float) for val in (q1, q2, pi1, pi2)))
    x = omega(PhaseState(q1, q2, pi1, pi2), s.coeff) / s.hbar
    sign = -1.0 if s.n % 2 else 1.0
    # exp(-x/2) vanishes beyond the clip
    x = np.minimum(x, LAGUERRE_CLIP)
    return norm * sign / (math.pi * s.hbar) * np.exp(-0.5 * x) * laguerre(s.n, x)


def stargen_density(s: StargenState, p: PhaseState):
    """Evaluates the star-genstate Wigner function.

    ``rho_n = N (-1)^n / (pi hbar) exp(-Omega / 2 hbar) L_n(Omega / hbar)``,
    which is normalizable in the momenta for every ``n``. Since Omega is a
    constant of motion, the density is stationary.

    Args:
        s (StargenState): State.
        p (PhaseState): Phase-space point(s).

    Returns:
        Density value(s).
    """
    return _stargen_values(s, p.q1, p.q2, p.pi1, p.pi2, s.norm)


def stargen_state(n: int, coeff: Coefficients, a: float = DEFAULT_BOX, hbar: float = 1.0, quad: QuadratureSpec = None) -> StargenState:
    """Creates a star-genstate normalized to a unit momentum marginal.

    Integrating the window ``Q2 in (-a, a)`` translates the momentum ``Pi1``,
    so the marginal integrates to ``4 a^2 N J`` where ``J`` is the integral
    over both momenta at ``Q = 0``. ``J`` is evaluated numerically.

    Raises:
        QuadratureFailure: If ``J`` cannot be integrated to tolerance.
    """
    unit = StargenState(n, coeff, a, 1.0, hbar)
    quad = quad or QuadratureSpec()
    inf = (-math.inf, math.inf)
    total, _ = integrate_2d(lambda p1, p2: _stargen_values(unit, 0.0, 0.0, p1, p2, 1.0), inf, inf, quad)
    if not total > 0:
        raise ValidationError(f"Invalid star-genstate {n}, momentum integral {total} is not positive")
    norm = 1.0 / (4.0 * a * a * total)
    logging.debug("Star-genstate %d normalized with N = %g.", n, norm)
    return StargenState(n, coeff, a, norm, hbar)


def momentum_marginal(s: StargenState, y: float, pi1, x: float = 0.0, piy: float = 0.0, quad: QuadratureSpec = None) -> np.ndarray:
    """Returns the stationary momentum distribution ``|phi(Pi1)|^2``.

    The density is integrated over ``Q2 in (y - a, y + a)`` and over
    ``Pi2 = piy + u`` for all real ``u``, and multiplied by ``2a`` for the
    ``Q1`` window. The result depends neither on ``x`` nor on ``piy`` and
    integrates to one over ``Pi1``.

    Args:
        s (StargenState): Normalized state, see :func:`stargen_state`.
        y (float): Centre of the ``Q2`` window.
        pi1: Momentum ``Pi1`` evaluation point(s).
        x (float): Position ``Q1`` at which the density is evaluated.
        piy (float): Initial momentum ``Pi2``, the origin of the ``Pi2`` integration.
        quad (QuadratureSpec): Tolerances.

    Returns:
        Distribution values at ``pi1``.

    Raises:
        QuadratureFailure: If the integration does not converge.
    """
    pi1 = np.atleast_1d(np.asarray(pi1, dtype=float))
    if not np.all(np.isfinite(pi1)) or not math.isfinite(piy):
        raise ValidationError("Invalid momentum grid, values must be finite")
    quad = quad or QuadratureSpec()

    def integrand(q2, u):
        return _stargen_values(s, x, q2[:, None], pi1[None, :], piy + u[:, None], s.norm)

    vals, _ = integrate_2d(integrand, (y - s.a, y + s.a), (-math.inf, math.inf), quad)
    return 2.0 * s.a * np.atleast_1d(vals)


@dataclass(frozen=True)
class GaussianState:
    """Gaussian envelope in the momenta of the inverted dynamics.

    Attributes:
        a: Half-width of the position box.
        pix: Momentum centre along axis 1.
        piy: Momentum centre along axis 2.
        x: Centre of the position box along axis 1.
        y: Centre of the position box along axis 2.
    """
    a: float = DEFAULT_BOX
    pix: float = 0.0
    piy: float = 0.0
    x: float = 0.0
    y: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValidationError("Invalid box half-width, must be positive")
        if not all(math.isfinite(val) for val in (self.pix, self.piy, self.x, self.y)):
            raise ValidationError("Invalid Gaussian state, values must be finite")

    @property
    def norm(self) -> float:
        return 1.0 / (4.0 * math.pi * self.a ** 2)

    @property
    def centre(self) -> np.ndarray:
        return np.array([self.pix, self.piy])

    def box(self, axis: int) -> Tuple[float, float]:
        """Returns the position interval of an axis (1 or 2)."""
        if axis not in (1, 2):
            raise ValidationError(f"Invalid axis {axis}")
        centre = self.x if axis == 1 else self.y
        return centre - self.a, centre + self.a


def _inverted_blocks(gamma: float, m: float, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """Returns K and P with inverted momenta ``K Q + P Pi``."""
    matrix = evolution_matrix(gamma, m, -t)
    return matrix[2:, :2], matrix[2:, 2:]


def gaussian_density(g: GaussianState, p: PhaseState, gamma: float, m: float, t: float):
    """Evaluates the Gaussian envelope at time ``t``.

    ``(4 pi a^2)^-1 exp(-|Pi~(t) - pi0|^2)``, where ``Pi~`` are the momenta
    of the initial conditions recovered by the inverse evolution. For
    ``gamma = 0`` the inverted momenta equal ``Pi`` and the state is stationary.

    Args:
        g (GaussianState): State.
        p (PhaseState): Phase-space point(s).
        gamma (float): Frequency, non-negative.
        m (float): Mass.
        t (float): Time.

    Returns:
        Density value(s).
    """
    k, pm = _inverted_blocks(gamma, m, t)
    q = np.stack(np.broadcast_arrays(np.asarray(p.q1, float), np.asarray(p.q2, float)))
    pi = np.stack(np.broadcast_arrays(np.asarray(p.pi1, float), np.asarray(p.pi2, float)))
    shape = q.shape[1:]
    v = k @ q.reshape(2, -1) + pm @ pi.reshape(2, -1) - g.centre[:, None]
    vals = g.norm * np.exp(-np.sum(v * v, axis=0))
    return vals.reshape(shape) if shape else float(vals[0])


def plane_gaussian(scale: float) -> float:
    """Returns the integral of ``exp(-scale |v|^2)`` over the plane, ``pi / scale``."""
    if not scale > 0:
        raise ValidationError("Invalid scale, must be positive")
    return math.pi / scale


def state_mass(g: GaussianState, gamma: float, m: float, t: float) -> float:
    """Returns the integral of :func:`gaussian_density` over the box and all momenta.

    The exponent depends on the momenta only through ``v = K Q + P Pi - pi0``,
    so the momentum integral is ``pi / |det P|``.

    Returns:
        The mass, ``inf`` if the state is delocalised (``det P = 0``).
    """
    _, pm = _inverted_blocks(gamma, m, t)
    det = abs(float(np.linalg.det(pm)))
    if det <= DELOCALISED:
        return math.inf
    return g.norm * (2.0 * g.a) ** 2 * plane_gaussian(1.0) / det


@dataclass(frozen=True)
class Ridge:
    """Reduced density of one sector written in its ridge coordinate.

    After the other momentum is integrated out, the reduced density depends
    on ``(Q, Pi)`` only through ``s = c_pi Pi + c_q Q - c_0``, and equals
    ``factor`` times the integral of ``exp(-(s + c_other Q')^2)`` over the
    other position ``Q'`` in ``window``.
    """
    c_pi: float
    c_q: float
    c_other: float
    c_0: float
    factor: float
    window: Tuple[float, float]
    quad: QuadratureSpec

    def coordinate(self, q, pi):
        return self.c_pi * np.asarray(pi, dtype=float) + self.c_q * np.asarray(q, dtype=float) - self.c_0

    def profile(self, s):
        """Returns the reduced density as a function of the ridge coordinate."""
        s = np.asarray(s, dtype=float)
        flat = s.ravel()

        def integrand(other):
            arg = flat[None, :] + self.c_other * other[:, None]
            return np.exp(-arg * arg)

        vals, _ = integrate_1d(integrand, self.window, self.quad)
        return (self.factor * np.asarray(vals)).reshape(s.shape)

    def density(self, q, pi):
        q, pi = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(pi, dtype=float))
        return self.profile(self.coordinate(q, pi))


def ridge(g: GaussianState, axis: int, gamma: float, m: float, t: float, quad: QuadratureSpec = None) -> Optional[Ridge]:
    """Builds the ridge form of a reduced Wigner function.

    The inverted momenta are ``v = K Q + P Pi - pi0``. Integrating the other
    momentum along the column of ``P`` that multiplies it leaves
    ``sqrt(pi) / |b| exp(-(v . n)^2)`` with ``b`` that column and ``n`` its
    unit normal. The result is divided by :func:`state_mass`.

    Returns:
        The ridge, or ``None`` if the state is delocalised.
    """
    if axis not in (1, 2):
        raise ValidationError(f"Invalid axis {axis}")
    quad = quad or QuadratureSpec()
    k_idx, o_idx = axis - 1, 2 - axis

    kq, pm = _inverted_blocks(gamma, m, t)
    mass = state_mass(g, gamma, m, t)
    column = pm[:, o_idx]
    length = float(np.hypot(column[0], column[1]))
    if math.isinf(mass) or length == 0.0:
        logging.warning("Gaussian state is delocalised at gamma t = %g.", gamma * t)
        return None

    normal = np.array([-column[1], column[0]]) / length
    return Ridge(
        c_pi=float(pm[:, k_idx] @ normal),
        c_q=float(kq[:, k_idx] @ normal),
        c_other=float(kq[:, o_idx] @ normal),
        c_0=float(g.centre @ normal),
        factor=g.norm / mass * math.sqrt(math.pi) / length,
        window=g.box(3 - axis),
        quad=quad,
    )


def reduced_density(g: GaussianState, axis: int, gamma: float, m: float, t: float, quad: QuadratureSpec = None) -> Callable:
    """Returns the reduced Wigner function of one phase-space sector.

    The other momentum is integrated in closed form along the Gaussian ridge
    and the other position numerically over the box, see :func:`ridge`. The
    density integrates to one over the box and all momenta.

    Args:
        g (GaussianState): State.
        axis (int): Kept sector, 1 or 2.
        gamma (float): Frequency, non-negative.
        m (float): Mass.
        t (float): Time.
        quad (QuadratureSpec): Tolerances.

    Returns:
        Vectorized function ``rho(Q, Pi)`` of the kept position and momentum.
        It vanishes identically if the state is delocalised.
    """
    reduced = ridge(g, axis, gamma, m, t, quad)
    if reduced is None:
        return lambda q, pi: np.zeros(np.broadcast(np.asarray(q), np.asarray(pi)).shape)
    return reduced.density



@dataclass(frozen=True)
class ReducedWigner:
    """Reduced Wigner function sampled on a rectangular grid.

    Attributes:
        axis: Kept sector, 1 or 2.
        q: Position grid.
        pi: Momentum grid.
        values: Density values, shape ``(len(q), len(pi))``.
        t: Time.
    """
    axis: int
    q: np.ndarray
    pi: np.ndarray
    values: np.ndarray
    t: float

    def total(self) -> float:
        """Returns the integral of the density over the grid (Simpson's rule)."""
        return float(simpson(simpson(self.values, x=self.pi, axis=1), x=self.q))

    def rows(self):
        """Yields ``(Q, Pi, value)`` in row-major order."""
        for i, q in enumerate(self.q):
            for j, pi in enumerate(self.pi):
                yield q, pi, self.values[i, j]


def default_grid(g: GaussianState, axis: int, num_q: int = 61, num_pi: int = 121, window: float = 12.0) -> Tuple[np.ndarray, np.ndarray]:
    """Returns a grid over the box and ``|Pi - pi0| <= window``."""
    lo, hi = g.box(axis)
    centre = g.pix if axis == 1 else g.piy
    return np.linspace(lo, hi, num_q), np.linspace(centre - window, centre + window, num_pi)


def reduce_wigner(g: GaussianState, axis: int, gamma: float, m: float, t: float, grid: Optional[Tuple[Sequence[float], Sequence[float]]] = None, quad: QuadratureSpec = None) -> ReducedWigner:
    """Evaluates the reduced Wigner function on a grid.

    Grid rows are distributed over ``ncphase.max_workers()`` threads and
    assembled in grid order.

    Args:
        g (GaussianState): State.
        axis (int): Kept sector, 1 or 2.
        gamma (float): Frequency, non-negative.
        m (float): Mass.
        t (float): Time.
        grid: Tuple of position and momentum grids (default :func:`default_grid`).
        quad (QuadratureSpec): Tolerances.

    Returns:
        Reduced Wigner function on the grid.

    Raises:
        QuadratureFailure: If an integral does not converge.
    """
    q_grid, pi_grid = grid if grid is not None else default_grid(g, axis)
    q_grid = np.asarray(q_grid, dtype=float)
    pi_grid = np.asarray(pi_grid, dtype=float)
    if q_grid.ndim != 1 or pi_grid.ndim != 1 or not len(q_grid) or not len(pi_grid):
        raise ValidationError("Invalid grid")

    density = reduced_density(g, axis, gamma, m, t, quad)
    chunks = [chunk for chunk in np.array_split(q_grid, ncphase.max_workers()) if len(chunk)]

    def evaluate(chunk):
        q, pi = np.meshgrid(chunk, pi_grid, indexing="ij")
        return density(q, pi)

    with ThreadPoolExecutor(max_workers=ncphase.max_workers()) as executor:
        values = np.vstack(list(executor.map(evaluate, chunks)))

    return ReducedWigner(axis, q_grid, pi_grid, values, t)
