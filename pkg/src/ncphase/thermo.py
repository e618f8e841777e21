"""Canonical-ensemble thermodynamics of noncommutative free gases and rotors.

All quantities are dimensionless: energies in units of ``hbar gamma``,
``sigma = hbar gamma / k_B T`` and ``lambda = R^2 eta / hbar^2``. The
internal energy, entropy and heat capacity are moments of the Boltzmann
weights accumulated term by term, with energies shifted by the spectrum
minimum:

    U = <e>,  S = ln Z + sigma <e>,  C_v = sigma^2 (<e^2> - <e>^2)
"""
from __future__ import annotations
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
import logging
import math

import numpy as np

import ncphase
from .errors import DomainError, NCPhaseError, QuantumNumberError, ValidationError
from .numerics import SeriesControl, sum_adaptive

SIGMA_MIN = 1e-3

# Shifted energies below this value are ground states.
GROUND_TOLERANCE = 1e-12


class ModelId(str, Enum):
    """Spectrum models."""
    FREE2D_NC = "free2d-nc"
    FREE3D_NC = "free3d-nc"
    ROTOR2D_NC = "rotor2d-nc"
    ROTOR3D_NC = "rotor3d-nc"
    ROTOR2D_STD = "rotor2d-std"
    ROTOR3D_STD = "rotor3d-std"

    @property
    def is_rotor(self) -> bool:
        return self.value.startswith("rotor")

    @property
    def is_nc(self) -> bool:
        return self.value.endswith("-nc")

    @property
    def dimension(self) -> int:
        return 3 if "3d" in self.value else 2

    @property
    def standard(self) -> Optional["ModelId"]:
        """Returns the standard model an NC rotor is compared with."""
        if self.is_rotor and self.is_nc:
            return ModelId(self.value.replace("-nc", "-std"))
        return None

    @classmethod
    def parse(cls, name: str) -> "ModelId":
        """Returns the model of a name such as ``rotor2d-nc`` or ``Rotor2D_NC``.

        Raises:
            ValidationError("Invalid model"): If the name is unknown.
        """
        key = name.strip().lower().replace("_", "-")
        for model in cls:
            if model.value == key:
                return model
        raise ValidationError(f"Invalid model {name}")


@dataclass(frozen=True)
class ThermoPoint:
    """Thermodynamic variables at one ``(sigma, lambda)`` point.

    Attributes:
        sigma: Inverse temperature ``hbar gamma / k_B T``.
        lam: Inertia ``R^2 eta / hbar^2``.
        model: Spectrum model.
        z: Partition function.
        u: Internal energy ``U / hbar gamma``.
        s: Entropy ``S / k_B``.
        cv: Heat capacity ``C_v / k_B``.
        log_z: Logarithm of the partition function.
        terms: Number of series terms used.
    """
    sigma: float
    lam: float
    model: ModelId
    z: float
    u: float
    s: float
    cv: float
    log_z: float
    terms: int = 0


@dataclass(frozen=True)
class SweepRow:
    """Row of a sweep: a point and its deviation from the standard model."""
    sigma: float
    lam: float
    model: ModelId
    point: Optional[ThermoPoint] = None
    du: Optional[float] = None
    ds: Optional[float] = None
    dcv: Optional[float] = None
    err: str = ""


def sigma_from_temperature(gamma: float, temperature: float, hbar: float = 1.0, k_b: float = 1.0) -> float:
    """Returns ``sigma = hbar gamma / (k_B T)``."""
    if not (gamma > 0 and temperature > 0 and hbar > 0 and k_b > 0):
        raise DomainError("Invalid temperature conversion, arguments must be positive")
    return hbar * gamma / (k_b * temperature)


def inertia_lambda(radius: float, eta: float, hbar: float = 1.0) -> float:
    """Returns the dimensionless inertia ``lambda = R^2 eta / hbar^2``."""
    if not (radius > 0 and eta > 0 and hbar > 0):
        raise DomainError("Invalid inertia conversion, arguments must be positive")
    return radius ** 2 * eta / hbar ** 2


def z_free2d(sigma: float) -> float:
    """Returns the free-particle partition function ``1 / (2 sinh(sigma))``.

    Raises:
        DomainError: If ``sigma <= 0``.
    """
    if not sigma > 0:
        raise DomainError(f"Invalid sigma {sigma}, must be positive")
    return math.exp(-sigma) / -math.expm1(-2.0 * sigma)


def z_free3d(sigma: float, a: float, m: float, temperature: float, hbar: float = 1.0) -> float:
    """Returns the 3D free-particle partition function.

    ``Z(sigma) sqrt(2/pi) (a / hbar) sqrt(m k_B T)`` with ``k_B = 1``; the
    factor is the translational sum over ``z in (-a, a)`` and all ``p_z``.

    Raises:
        DomainError: If an argument is not positive.
    """
    if not (a > 0 and m > 0 and temperature > 0 and hbar > 0):
        raise DomainError("Invalid 3D parameters, arguments must be positive")
    return z_free2d(sigma) * math.sqrt(2.0 / math.pi) * a / hbar * math.sqrt(m * temperature)


def free2d_closed_form(sigma: float) -> Tuple[float, float, float]:
    """Returns ``(U / hbar gamma, S / k_B, C_v / k_B)`` of the 2D free gas.

    ``coth(sigma)``, ``sigma coth(sigma) - ln(2 sinh(sigma))`` and
    ``(sigma / sinh(sigma))^2`` written without cancellation at large sigma.
    """
    if not sigma > 0:
        raise DomainError(f"Invalid sigma {sigma}, must be positive")
    u = 1.0 / math.tanh(sigma)
    s = 2.0 * sigma * math.exp(-2.0 * sigma) / -math.expm1(-2.0 * sigma) - math.log1p(-math.exp(-2.0 * sigma))
    cv = (2.0 * sigma * math.exp(-sigma) / -math.expm1(-2.0 * sigma)) ** 2
    return u, s, cv


def inner_degeneracy_sum(ell: int, s: float) -> float:
    """Returns ``sum_{m=-l}^{l} exp(-s m) = cosh(l s) + coth(s/2) sinh(l s)``."""
    if ell < 0:
        raise QuantumNumberError(f"Invalid angular momentum {ell}")
    if s == 0:
        return float(2 * ell + 1)
    return math.cosh(ell * s) + math.sinh(ell * s) / math.tanh(0.5 * s)


def log_inner_degeneracy_sum(ell: int, s: float) -> float:
    """Returns the logarithm of :func:`inner_degeneracy_sum` without overflow."""
    if ell < 0:
        raise QuantumNumberError(f"Invalid angular momentum {ell}")
    s = abs(s)
    if s == 0:
        return math.log(2 * ell + 1)
    return ell * s + math.log(-math.expm1(-(2 * ell + 1) * s)) - math.log(-math.expm1(-s))


def _deform(model: ModelId, deform: float) -> float:
    if not 0.0 <= deform <= 1.0:
        raise ValidationError(f"Invalid deformation {deform}, must be in [0, 1]")
    return deform if model.is_nc else 0.0


def rotor_energy(model: ModelId, mz: int, ell: Optional[int] = None, lam: float = 1.0, gamma: float = 1.0, hbar: float = 1.0, deform: float = 1.0) -> float:
    """Returns the energy of a rotor level.

    ``hbar gamma (mz^2 / lambda + mz + lambda / 4)`` in 2D and
    ``hbar gamma (l (l+1) / lambda + mz + lambda / 4)`` in 3D. Standard models
    drop the ``mz`` and ``lambda / 4`` terms; ``deform`` scales them.

    Raises:
        QuantumNumberError: If ``ell`` is missing, negative or ``|mz| > ell`` in 3D.
        DomainError: If ``lambda <= 0``.
    """
    model = ModelId.parse(model)
    if not model.is_rotor:
        raise ValidationError(f"Invalid model {model.value}, rotor expected")
    if not lam > 0:
        raise DomainError(f"Invalid lambda {lam}, must be positive")
    eps = _deform(model, deform)
    if model.dimension == 2:
        bracket = mz * mz / lam
    else:
        if ell is None or ell < 0:
            raise QuantumNumberError(f"Invalid angular momentum {ell}")
        if abs(mz) > ell:
            raise QuantumNumberError(f"Invalid magnetic number {mz} for l = {ell}")
        bracket = ell * (ell + 1) / lam
    return hbar * gamma * (bracket + eps * (mz + 0.25 * lam))


def _shells_free() -> Tuple[float, Callable]:
    def term(n: int, sigma: float) -> np.ndarray:
        e = 2.0 * n
        w = math.exp(-sigma * e)
        if n == 0:
            return np.array([1.0, 0.0, 0.0, 0.0])
        return np.array([0.0, w, w * e, w * e * e])

    return 1.0, term


def _shells_rotor2d(lam: float, eps: float) -> Tuple[float, Callable]:
    def energy(mz: int) -> float:
        return mz * mz / lam + eps * (mz + 0.25 * lam)

    centre = int(round(-0.5 * eps * lam))
    e_min = min(energy(mz) for mz in (centre - 1, centre, centre + 1))

    def term(k: int, sigma: float) -> np.ndarray:
        vals = np.zeros(4)
        for mz in ((centre,) if k == 0 else (centre + k, centre - k)):
            e = energy(mz) - e_min
            if e <= GROUND_TOLERANCE:
                vals[0] += 1.0
                continue
            w = math.exp(-sigma * e)
            vals[1:] += (w, w * e, w * e * e)
        return vals

    return e_min, term


def _shells_rotor3d(lam: float, eps: float) -> Tuple[float, Callable]:
    def lowest(ell: int) -> float:
        return ell * (ell + 1) / lam - eps * ell + eps * 0.25 * lam

    vertex = 0.5 * (eps * lam - 1.0)
    candidates = {max(0, math.floor(vertex)), max(0, math.ceil(vertex))}
    centre = min(sorted(candidates), key=lowest)
    e_min = lowest(centre)

    def shell(ell: int, sigma: float) -> np.ndarray:
        offset = lowest(ell) - e_min
        if offset <= GROUND_TOLERANCE:
            offset = 0.0
        j = np.arange(2 * ell + 1, dtype=float)
        e = offset + eps * j
        w = np.exp(-sigma * e)
        s = sigma * eps
        if offset > 0.0:
            ground = 0.0
            rest = math.exp(-sigma * offset + log_inner_degeneracy_sum(ell, s) - ell * s)
        elif s > 0.0:
            ground = 1.0
            rest = math.exp(-s) * math.expm1(-2 * ell * s) / math.expm1(-s) if ell else 0.0
        else:
            ground = float(2 * ell + 1)
            rest = 0.0
        return np.array([ground, rest, float(np.sum(w * e)), float(np.sum(w * e * e))])

    def term(k: int, sigma: float) -> np.ndarray:
        vals = shell(centre + k, sigma)
        if k and centre - k >= 0:
            vals = vals + shell(centre - k, sigma)
        return vals

    return e_min, term


def _spectrum(model: ModelId, lam: float, deform: float) -> Tuple[float, Callable]:
    eps = _deform(model, deform)
    if not model.is_rotor:
        return _shells_free()
    if not lam > 0:
        raise DomainError(f"Invalid lambda {lam}, must be positive")
    if model.dimension == 2:
        return _shells_rotor2d(lam, eps)
    return _shells_rotor3d(lam, eps)


def _estimated_terms(model: ModelId, sigma: float, lam: float, ctl: SeriesControl) -> int:
    depth = math.log(1.0 / ctl.rel_tol)
    if not model.is_rotor:
        return math.ceil(depth / (2.0 * sigma))
    return math.ceil(math.sqrt(lam * depth / sigma) + 0.5 * lam)


def _moments(model: ModelId, sigma: float, lam: float, ctl: SeriesControl, deform: float) -> Tuple[float, np.ndarray, int]:
    e_min, term = _spectrum(model, lam, deform)
    vals, terms = sum_adaptive(lambda k: term(k, sigma), ctl)
    logging.debug("%s at sigma = %g, lambda = %g summed with %d terms.", model.value, sigma, lam, terms)
    return e_min, vals, terms


def z_rotor(model: ModelId, sigma: float, lam: float, ctl: SeriesControl = None, deform: float = 1.0) -> float:
    """Returns the partition function of a rotor by adaptive summation.

    2D levels are summed in shells ``mz = c +- k`` about the ground level
    ``c``; 3D levels in shells of ``l`` about the ground shell, each shell
    summed over ``mz`` in closed form.

    Args:
        model (ModelId): Rotor model.
        sigma (float): Inverse temperature, positive.
        lam (float): Inertia, positive.
        ctl (SeriesControl): Stopping rule.
        deform (float): Scale of the ``mz`` and ``lambda / 4`` terms of NC models.

    Raises:
        DomainError: If ``sigma`` or ``lambda`` is not positive.
        ConvergenceError: If the series does not converge within the term cap.
    """
    model = ModelId.parse(model)
    if not model.is_rotor:
        raise ValidationError(f"Invalid model {model.value}, rotor expected")
    if not sigma > 0:
        raise DomainError(f"Invalid sigma {sigma}, must be positive")
    e_min, vals, _ = _moments(model, sigma, lam, ctl or SeriesControl(), deform)
    return (vals[0] + vals[1]) * math.exp(-sigma * e_min)


def thermo_variables(model: ModelId, sigma: float, lam: float = 1.0, ctl: SeriesControl = None, deform: float = 1.0, a: float = 1.0, mass: float = 1.0, hbar: float = 1.0, gamma: float = 1.0) -> ThermoPoint:
    """Returns the thermodynamic variables of a model.

    Derivatives of ``ln Z`` are taken term by term, as moments of the shifted
    energies under the Boltzmann weights. For ``free3d-nc`` the translational
    factor adds ``1 / (2 sigma)`` to ``U`` and ``1/2`` to ``C_v``; it uses the
    box half-width ``a``, ``mass``, ``hbar`` and ``gamma``.

    Args:
        model (ModelId): Spectrum model.
        sigma (float): Inverse temperature, at least ``SIGMA_MIN``.
        lam (float): Inertia, positive (rotors only).
        ctl (SeriesControl): Stopping rule.
        deform (float): Scale of the NC terms in [0, 1].

    Returns:
        Thermodynamic point.

    Raises:
        DomainError: If ``sigma < SIGMA_MIN`` or ``lambda <= 0``.
        ConvergenceError: If the series does not converge within the term cap.

    Examples:
        >>> thermo_variables("rotor2d-nc", 50.0, 1.0).s
        >>> 0.6931471805599453
    """
    model = ModelId.parse(model)
    ctl = ctl or SeriesControl()
    if not sigma > 0:
        raise DomainError(f"Invalid sigma {sigma}, must be positive")
    if model.is_rotor and not lam > 0:
        raise DomainError(f"Invalid lambda {lam}, must be positive")
    if sigma < SIGMA_MIN:
        raise DomainError(
            f"Invalid sigma {sigma}, below {SIGMA_MIN} the series needs about "
            f"{_estimated_terms(model, sigma, lam, ctl)} terms"
        )

    e_min, (ground, rest, m1, m2), terms = _moments(model, sigma, lam, ctl, deform)
    weight = ground + rest
    log_weight = math.log(ground) + math.log1p(rest / ground) if ground > 0 else math.log(rest)
    mean = m1 / weight
    variance = max(m2 / weight - mean * mean, 0.0)

    log_z = log_weight - sigma * e_min
    u = e_min + mean
    cv = sigma * sigma * variance
    s = log_weight + sigma * mean

    if model is ModelId.FREE3D_NC:
        if not (a > 0 and mass > 0 and hbar > 0 and gamma > 0):
            raise DomainError("Invalid 3D parameters, arguments must be positive")
        translation = math.log(math.sqrt(2.0 / math.pi) * a / hbar * math.sqrt(mass * hbar * gamma)) - 0.5 * math.log(sigma)
        log_z += translation
        u += 0.5 / sigma
        cv += 0.5
        s += translation + 0.5

    return ThermoPoint(sigma, lam, model, math.exp(log_z), u, s, cv, log_z, terms)


def _validate_grid(name: str, grid: Sequence[float]) -> List[float]:
    vals = [float(val) for val in grid]
    if not vals or not all(math.isfinite(val) and val > 0 for val in vals):
        raise ValidationError(f"Invalid {name} grid, values must be positive and finite")
    return vals


def sweep(models: Iterable, sigma_grid: Sequence[float], lambda_grid: Sequence[float], ctl: SeriesControl = None, deform: float = 1.0, **options) -> List[SweepRow]:
    """Evaluates models on a ``(sigma, lambda)`` grid.

    Rows are ordered by lambda, then sigma, then model. NC rotors are
    compared with their standard counterparts, ``dQ = Q(NC) - Q(Std)``.
    Points are evaluated on ``ncphase.max_workers()`` threads; failures are
    recorded in the ``err`` field and the sweep continues.

    Args:
        models: Model identifiers.
        sigma_grid: Inverse temperatures.
        lambda_grid: Inertias.
        ctl (SeriesControl): Stopping rule.
        deform (float): Scale of the NC terms.
        **options: Free 3D parameters passed to :func:`thermo_variables`.

    Returns:
        Sweep rows.

    Raises:
        ValidationError: If a grid is empty or not positive.
    """
    models = [ModelId.parse(model) for model in models]
    if not models:
        raise ValidationError("Invalid model list")
    sigmas = _validate_grid("sigma", sigma_grid)
    lambdas = _validate_grid("lambda", lambda_grid)
    ctl = ctl or SeriesControl()

    keys = [(lam, sigma, model) for lam in lambdas for sigma in sigmas for model in models]
    tasks = list(keys)
    for lam, sigma, model in keys:
        if model.standard and (lam, sigma, model.standard) not in tasks:
            tasks.append((lam, sigma, model.standard))

    def evaluate(key):
        lam, sigma, model = key
        try:
            return thermo_variables(model, sigma, lam, ctl, deform, **options), ""
        except NCPhaseError as err:
            logging.warning("%s failed at sigma = %g, lambda = %g: %s", model.value, sigma, lam, err)
            return None, str(err)

    with ThreadPoolExecutor(max_workers=ncphase.max_workers()) as executor:
        results: Dict = dict(zip(tasks, executor.map(evaluate, tasks)))

    rows = []
    for lam, sigma, model in keys:
        point, err = results[(lam, sigma, model)]
        row = SweepRow(sigma, lam, model, point, err=err)
        if point is not None and model.standard:
            ref, ref_err = results[(lam, sigma, model.standard)]
            if ref is None:
                row = SweepRow(sigma, lam, model, point, err=f"standard model failed: {ref_err}")
            else:
                row = SweepRow(sigma, lam, model, point, point.u - ref.u, point.s - ref.s, point.cv - ref.cv)
        rows.append(row)

    return rows
