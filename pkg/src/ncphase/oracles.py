"""Independent reference computations and the self-test suites.

The references share no code path with the closed forms they check: the
trajectory oracle integrates the equations of motion with a classical
Runge-Kutta scheme and the degeneracy oracles sum levels one by one.
"""
from __future__ import annotations
from typing import Callable, List, Optional, Sequence

from dataclasses import dataclass
import logging
import math

import numpy as np

from .errors import NCPhaseError, ValidationError
from .nc_core import (
    NCParams,
    PhaseState,
    derive_sw_params,
    jacobian_det,
    sw_forward,
    sw_inverse,
    sw_matrix,
    validate_algebra,
)
from .dynamics import evolve, initial_conditions, sample_trajectory
from .numerics import QuadratureSpec, SeriesControl, integrate_1d, sum_adaptive
from .thermo import ModelId, free2d_closed_form, inner_degeneracy_sum, rotor_energy, thermo_variables
from .wigner import GaussianState, default_grid, reduce_wigner
from . import qinfo


def equations_of_motion(gamma: float, m: float) -> Callable[[np.ndarray], np.ndarray]:
    """Returns the right-hand side of the first-order system in ``(Q1, Q2, Pi1, Pi2)``."""

    def rhs(y: np.ndarray) -> np.ndarray:
        q1, q2, pi1, pi2 = y
        return np.array([
            pi1 / m + gamma * q2,
            pi2 / m - gamma * q1,
            -m * gamma ** 2 * q1 + gamma * pi2,
            -m * gamma ** 2 * q2 - gamma * pi1,
        ])

    return rhs


def rk4_trajectory(ic: PhaseState, gamma: float, m: float, t: float, steps: int) -> np.ndarray:
    """Integrates the equations of motion with the classical Runge-Kutta scheme.

    Returns:
        Array of shape ``(steps + 1, 4)`` with the states at ``k t / steps``.
    """
    if steps < 1:
        raise ValidationError("Invalid number of steps")
    rhs = equations_of_motion(gamma, m)
    h = t / steps
    y = ic.as_array()
    out = [y]
    for _ in range(steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out.append(y)
    return np.array(out)


def brute_inner_sum(ell: int, s: float) -> float:
    """Returns ``sum_{m=-l}^{l} exp(-s m)`` term by term."""
    return math.fsum(math.exp(-s * mz) for mz in range(-ell, ell + 1))


def brute_rotor_partition(model, sigma: float, lam: float, max_index: int, deform: float = 1.0) -> float:
    """Returns a rotor partition function summed level by level up to ``max_index``.

    The index is ``|mz|`` in 2D and ``l`` in 3D.
    """
    model = ModelId.parse(model)
    if model.dimension == 2:
        levels = (rotor_energy(model, mz, lam=lam, deform=deform) for mz in range(-max_index, max_index + 1))
    else:
        levels = (
            rotor_energy(model, mz, ell, lam=lam, deform=deform)
            for ell in range(max_index + 1)
            for mz in range(-ell, ell + 1)
        )
    return math.fsum(math.exp(-sigma * e) for e in levels)


@dataclass
class Check:
    """Result of a self-test check.

    Attributes:
        suite: Suite name.
        name: Check name.
        error: Observed error.
        tolerance: Largest accepted error.
        message: Failure message, if the check raised an error.
    """
    suite: str
    name: str
    error: float
    tolerance: float
    message: str = ""

    @property
    def passed(self) -> bool:
        return not self.message and self.error < self.tolerance


def _rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


def _nc_core() -> List[Check]:
    nc = NCParams(theta=0.3, eta=0.7)
    sw = derive_sw_params(nc)
    rng = _rng()
    error = 0.0
    for vals in rng.uniform(-5.0, 5.0, size=(100, 4)):
        state = PhaseState.from_array(vals)
        back = sw_inverse(sw, nc, sw_forward(sw, nc, state))
        error = max(error, float(np.max(np.abs(back.as_array() - vals))))
    det = abs(float(np.linalg.det(sw_matrix(sw, nc))) - jacobian_det(nc))
    report = validate_algebra(sw, nc)
    return [
        Check("nc_core", "map round trip", error, 1e-12),
        Check("nc_core", "jacobian determinant", det, 1e-12),
        Check("nc_core", "algebra residuals", max(report.residuals.values()), 1e-12),
    ]


def _dynamics() -> List[Check]:
    gamma, m = 1.0, 1.0
    ic = initial_conditions(0.5, 0.5, 0.5, 0.5)
    period = 2.0 * math.pi / gamma
    steps = 4000
    reference = rk4_trajectory(ic, gamma, m, period, steps)
    closed = np.array([evolve(ic, gamma, m, k * period / steps).as_array() for k in range(0, steps + 1, 100)])
    rk4 = float(np.max(np.abs(closed - reference[::100])))

    trajectory = sample_trajectory(ic, gamma, m, np.linspace(0.0, period, 257))
    revival = evolve(ic, gamma, m, math.pi / gamma).as_array() - ic.as_array()

    return [
        Check("dynamics", "closed form against RK4", rk4, 1e-8),
        Check("dynamics", "omega drift", trajectory.omega_drift, 1e-10),
        Check("dynamics", "period pi/gamma", float(np.max(np.abs(revival))), 1e-12),
    ]


def _wigner() -> List[Check]:
    g = GaussianState(a=3.0, pix=0.5, piy=-0.5)
    grid = default_grid(g, 1, num_q=11, num_pi=21)
    first = reduce_wigner(g, 1, 1.0, 1.0, 0.0, grid)
    revived = reduce_wigner(g, 1, 1.0, 1.0, math.pi, grid)
    return [Check("wigner", "revival at pi/gamma", float(np.max(np.abs(first.values - revived.values))), 1e-8)]


def _qinfo() -> List[Check]:
    g = GaussianState()
    entropies = qinfo.linear_entropies(g, 1.0, 1.0, math.pi / 3.0)
    closed = qinfo.closed_form_entropies(1.0, math.pi / 3.0)
    return [
        Check("qinfo", "S1 at gamma t = pi/3", abs(entropies.s1 - closed.s1), 1e-4),
        Check("qinfo", "S12 at gamma t = pi/3", abs(entropies.s12 - closed.s12), 1e-4),
        Check("qinfo", "I12 at gamma t = pi/3", abs(entropies.i12 - qinfo.mutual_information(1.0, math.pi / 3.0)), 1e-4),
    ]


def _thermo() -> List[Check]:
    error = 0.0
    for sigma in np.geomspace(0.1, 10.0, 31):
        point = thermo_variables(ModelId.FREE2D_NC, float(sigma))
        closed = free2d_closed_form(float(sigma))
        for val, ref in zip((point.u, point.s, point.cv), closed):
            error = max(error, abs(val - ref) / abs(ref))

    degeneracy = 0.0
    for sigma in (0.1, 1.0, 5.0):
        for ell in range(51):
            ref = brute_inner_sum(ell, sigma)
            degeneracy = max(degeneracy, abs(inner_degeneracy_sum(ell, sigma) - ref) / ref)

    identity = 0.0
    for model in ModelId:
        for sigma in (0.1, 1.0, 10.0):
            point = thermo_variables(model, sigma, 1.0)
            identity = max(identity, abs(point.s - point.log_z - sigma * point.u))

    ground = thermo_variables(ModelId.ROTOR2D_NC, 50.0, 1.0)
    return [
        Check("thermo", "free 2D closed forms", error, 1e-10),
        Check("thermo", "3D degeneracy sum", degeneracy, 1e-12),
        Check("thermo", "S = ln Z + sigma U", identity, 1e-10),
        Check("thermo", "2D rotor entropy ln 2", abs(ground.s - math.log(2.0)), 1e-6),
    ]


def _numerics() -> List[Check]:
    gauss, _ = integrate_1d(lambda x: np.exp(-x * x), (-math.inf, math.inf), QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12))
    series, _ = sum_adaptive(lambda n: math.exp(-(2 * n + 1)), SeriesControl(rel_tol=1e-15))
    return [
        Check("numerics", "Gaussian integral", abs(gauss - math.sqrt(math.pi)), 1e-10),
        Check("numerics", "geometric series", abs(series - 0.5 / math.sinh(1.0)), 1e-12),
    ]


SUITES = {
    "nc_core": _nc_core,
    "dynamics": _dynamics,
    "numerics": _numerics,
    "wigner": _wigner,
    "qinfo": _qinfo,
    "thermo": _thermo,
}


def run_selftest(suites: Optional[Sequence[str]] = None) -> List[Check]:
    """Runs self-test suites.

    Args:
        suites: Suite names (default all suites).

    Returns:
        Checks of every suite. A suite raising an error yields a single failed check.

    Raises:
        ValidationError("Invalid suite"): If a suite name is unknown.
    """
    names = list(suites) if suites else list(SUITES)
    for name in names:
        if name not in SUITES:
            raise ValidationError(f"Invalid suite {name}")

    checks = []
    for name in names:
        try:
            checks.extend(SUITES[name]())
        except NCPhaseError as err:
            logging.warning("Suite %s failed: %s", name, err)
            checks.append(Check(name, "suite", math.inf, 0.0, str(err)))
    return checks
