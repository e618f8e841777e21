"""Linear entropies and mutual information of Gaussian states.

Purities are computed from the normalized Wigner functions; the linear
entropy is one minus the purity. For the Gaussian envelope the numeric values
reproduce ``S1 = S2 = 1 - |cos(gamma t)|`` and ``S12 = 1 - cos(gamma t)^2``.
"""
from __future__ import annotations
from typing import List, Sequence

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np
from scipy.integrate import simpson

import ncphase
from .errors import ValidationError
from .numerics import QuadratureSpec, integrate_1d
from .wigner import GaussianState, ReducedWigner, _inverted_blocks, plane_gaussian, ridge, state_mass

DEFAULT_QUAD = QuadratureSpec(abs_tol=1e-8, rel_tol=1e-6)


@dataclass(frozen=True)
class EntropyTriple:
    """Linear entropies of both sectors and of the full state at time ``t``."""
    s1: float
    s2: float
    s12: float
    t: float
    gamma: float

    @property
    def i12(self) -> float:
        """Returns the mutual information ``S1 + S2 - S12``."""
        return self.s1 + self.s2 - self.s12


def _inner(quad: QuadratureSpec) -> QuadratureSpec:
    return quad.with_tolerance(abs_tol=quad.abs_tol * 1e-2, rel_tol=quad.rel_tol * 1e-2)


def purity_reduced(rw: ReducedWigner, a: float, hbar: float = 1.0) -> float:
    """Returns the purity of a reduced Wigner function sampled on a grid.

    ``(2 a sqrt(2 pi) / hbar)`` times the integral of the squared density,
    integrated with Simpson's rule. The grid must cover the box and the
    momentum support of the density.
    """
    if not a > 0 or not hbar > 0:
        raise ValidationError("Invalid purity parameters")
    squared = rw.values ** 2
    total = simpson(simpson(squared, x=rw.pi, axis=1), x=rw.q)
    return 2.0 * a * math.sqrt(2.0 * math.pi) / hbar * float(total)


def reduced_purity(g: GaussianState, axis: int, gamma: float, m: float, t: float, quad: QuadratureSpec = None, hbar: float = 1.0) -> float:
    """Returns the purity of a reduced Wigner function by adaptive quadrature.

    The reduced density depends on ``(Q, Pi)`` only through its ridge
    coordinate ``s``, so its square integrates over the box and all momenta
    to ``2a / |c_pi|`` times the integral of the squared profile over ``s``.

    Raises:
        QuadratureFailure: If an integral does not converge.
    """
    quad = quad or DEFAULT_QUAD
    reduced = ridge(g, axis, gamma, m, t, _inner(quad))
    if reduced is None or reduced.c_pi == 0.0:
        return 0.0

    lo, hi = reduced.window
    points = sorted({-reduced.c_other * lo, -reduced.c_other * hi, 0.0})
    value, _ = integrate_1d(lambda s: reduced.profile(s) ** 2, (-math.inf, math.inf), quad, points=points)
    area = 2.0 * g.a / abs(reduced.c_pi)
    return 2.0 * g.a * math.sqrt(2.0 * math.pi) / hbar * area * value


def full_purity(g: GaussianState, gamma: float, m: float, t: float, hbar: float = 1.0) -> float:
    """Returns the purity of the full Gaussian state.

    ``(8 pi a^2 / hbar^2)`` times the integral of the squared normalized
    density over the box and all momenta. The Gaussian factorizes in the
    inverted momenta, so the four-dimensional integral is the product of the
    box area ``4 a^2`` and ``pi / 2``, the integral of ``exp(-2 |v|^2)``,
    divided by ``|det P|``.
    """
    mass = state_mass(g, gamma, m, t)
    if math.isinf(mass):
        return 0.0
    _, pm = _inverted_blocks(gamma, m, t)
    det = abs(float(np.linalg.det(pm)))
    squared = (g.norm / mass) ** 2 * (2.0 * g.a) ** 2 * plane_gaussian(2.0) / det
    return 8.0 * math.pi * g.a ** 2 / hbar ** 2 * squared


def linear_entropies(g: GaussianState, gamma: float, m: float, t: float, quad: QuadratureSpec = None, hbar: float = 1.0) -> EntropyTriple:
    """Returns the numeric linear entropies of a Gaussian state at time ``t``.

    Args:
        g (GaussianState): State.
        gamma (float): Frequency, non-negative.
        m (float): Mass.
        t (float): Time.
        quad (QuadratureSpec): Tolerances (default relative tolerance 1e-6).
        hbar (float): Reduced Planck constant.

    Returns:
        Entropies ``S1``, ``S2`` and ``S12``.

    Raises:
        QuadratureFailure: If an integral does not converge.
    """
    return EntropyTriple(
        s1=1.0 - reduced_purity(g, 1, gamma, m, t, quad, hbar),
        s2=1.0 - reduced_purity(g, 2, gamma, m, t, quad, hbar),
        s12=1.0 - full_purity(g, gamma, m, t, hbar),
        t=t,
        gamma=gamma,
    )


def closed_form_entropies(gamma: float, t: float) -> EntropyTriple:
    c = abs(math.cos(gamma * t))
    return EntropyTriple(s1=1.0 - c, s2=1.0 - c, s12=1.0 - c * c, t=t, gamma=gamma)


def mutual_information(gamma: float, t: float) -> float:
    """Returns the mutual information ``(1 - |cos(gamma t)|)^2`` of the two sectors."""
    return (1.0 - abs(math.cos(gamma * t))) ** 2


def entropy_series(g: GaussianState, gamma: float, m: float, times: Sequence[float], quad: QuadratureSpec = None, hbar: float = 1.0) -> List[EntropyTriple]:
    """Evaluates :func:`linear_entropies` on a time grid.

    Times are distributed over ``ncphase.max_workers()`` threads; results
    keep the order of ``times``.
    """
    with ThreadPoolExecutor(max_workers=ncphase.max_workers()) as executor:
        return list(executor.map(lambda t: linear_entropies(g, gamma, m, float(t), quad, hbar), times))
