"""Noncommutative algebra parameters and the Seiberg-Witten map.

The deformed algebra ``[q_i, q_j] = i theta eps_ij``, ``[p_i, p_j] = i eta eps_ij``
is mapped onto the standard Heisenberg-Weyl algebra of the commutative
variables ``(Q, Pi)`` by a linear transformation with coefficients ``mu`` and
``nu`` constrained by ``nu mu (1 - nu mu) = theta eta / (4 hbar^2)``.
The antisymmetric symbol follows ``eps_12 = +1 = -eps_21``.
"""
from __future__ import annotations
from typing import Dict, List, Sequence

from dataclasses import dataclass, field
import logging
import math

import numpy as np

from .errors import ConstraintViolation, ValidationError

EPSILON = np.array([[0.0, 1.0], [-1.0, 0.0]])

ALGEBRA_TOLERANCE = 1e-12


@dataclass(frozen=True)
class NCParams:
    """Physical parameters of the deformed algebra.

    Attributes:
        theta: Coordinate noncommutativity (length squared).
        eta: Momentum noncommutativity (momentum squared).
        hbar: Reduced Planck constant.
        mass: Particle mass.
    """
    theta: float = 0.0
    eta: float = 0.0
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        for name in ("theta", "eta", "hbar", "mass"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"Invalid {name}")
        if self.hbar <= 0:
            raise ValidationError("Invalid hbar, must be positive")
        if self.mass <= 0:
            raise ValidationError("Invalid mass, must be positive")
        if self.theta < 0 or self.eta < 0:
            raise ValidationError("Invalid noncommutative parameter, must be non-negative")

    @property
    def deformation(self) -> float:
        """Returns the dimensionless product ``theta eta / hbar^2``."""
        return self.theta * self.eta / self.hbar ** 2

    @property
    def invertible(self) -> bool:
        return self.deformation < 1.0

    def check_invertible(self) -> None:
        """Raises ConstraintViolation unless ``theta eta < hbar^2``."""
        if not self.invertible:
            raise ConstraintViolation(
                f"Invalid parameters, theta*eta/hbar^2 = {self.deformation} must be less than 1"
            )


@dataclass(frozen=True)
class SWParams:
    """Coefficients ``mu`` and ``nu`` of the Seiberg-Witten map."""
    mu: float
    nu: float

    def __post_init__(self):
        if not (self.mu > 0 and self.nu > 0):
            raise ValidationError("Invalid map coefficients, mu and nu must be positive")

    @property
    def xi(self) -> float:
        return self.mu * self.nu

    def constraint_residual(self, nc: NCParams) -> float:
        """Returns ``nu mu (1 - nu mu) - theta eta / (4 hbar^2)``."""
        return self.xi * (1.0 - self.xi) - nc.deformation / 4.0


@dataclass(frozen=True)
class Coefficients:
    """Coefficients of the free-particle Hamiltonian in commutative variables.

    ``H = alpha^2 Q^2 + beta^2 Pi^2 + gamma (Pi_1 Q_2 - Pi_2 Q_1)`` with
    ``2 alpha beta = gamma``.
    """
    alpha2: float
    beta2: float
    gamma: float

    @property
    def alpha(self) -> float:
        return math.sqrt(self.alpha2)

    @property
    def beta(self) -> float:
        return math.sqrt(self.beta2)

    @property
    def ratio(self) -> float:
        """Returns ``alpha / beta``."""
        return math.sqrt(self.alpha2 / self.beta2)


@dataclass(frozen=True)
class PhaseState:
    """Point of the commutative phase space, optionally at time ``t``.

    Fields may be scalars or NumPy arrays of equal shape.
    """
    q1: float
    q2: float
    pi1: float
    pi2: float
    t: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite(self.as_array())):
            raise ValidationError("Invalid phase state, values must be finite")

    def as_array(self) -> np.ndarray:
        """Returns the state as ``(Q1, Q2, Pi1, Pi2)``, broadcasting array fields."""
        vals = (np.asarray(val, dtype=float) for val in (self.q1, self.q2, self.pi1, self.pi2))
        return np.array(np.broadcast_arrays(*vals))

    @classmethod
    def from_array(cls, vals: Sequence, t: float = 0.0) -> "PhaseState":
        q1, q2, pi1, pi2 = vals
        return cls(q1, q2, pi1, pi2, t)


@dataclass(frozen=True)
class NCVariables:
    """Noncommutative phase-space variables ``(q1, q2, p1, p2)``."""
    q1: float
    q2: float
    p1: float
    p2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.q1, self.q2, self.p1, self.p2], dtype=float)


@dataclass
class AlgebraCheckReport:
    """Residuals of the matrix form of the deformed algebra.

    Attributes:
        residuals: Maximum absolute residual of each matrix equation, keyed by
            ``position_momentum``, ``position_position`` and ``momentum_momentum``.
        tolerance: Residual above which an equation is flagged.
    """
    residuals: Dict[str, float]
    tolerance: float = ALGEBRA_TOLERANCE
    blocks: Dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def failures(self) -> List[str]:
        return [name for name, val in self.residuals.items() if not val < self.tolerance]

    @property
    def ok(self) -> bool:
        return not self.failures


def derive_sw_params(nc: NCParams, mu: float = 1.0) -> SWParams:
    """Derives the map coefficients satisfying the Seiberg-Witten constraint.

    The product ``xi = nu mu`` solves ``xi (1 - xi) = theta eta / (4 hbar^2)``.
    The root ``xi = (1 + sqrt(1 - theta eta / hbar^2)) / 2`` is taken so that
    the commutative limit gives ``nu mu = 1``.

    Args:
        nc (NCParams): Algebra parameters.
        mu (float): Momentum coefficient, free (default = 1).

    Returns:
        Map coefficients.

    Raises:
        ConstraintViolation: If ``theta eta >= hbar^2``.
        ValidationError: If ``mu`` is not positive.

    Examples:
        >>> derive_sw_params(NCParams(theta=0.75, eta=1.0))
        >>> SWParams(mu=1.0, nu=0.75)
    """
    nc.check_invertible()
    if not mu > 0:
        raise ValidationError("Invalid mu, must be positive")
    xi = 0.5 * (1.0 + math.sqrt(1.0 - nc.deformation))
    return SWParams(mu=mu, nu=xi / mu)


def nc_coefficients(nc: NCParams, sw: SWParams) -> Coefficients:
    """Returns the Hamiltonian coefficients alpha^2, beta^2 and gamma.

    gamma = eta / (2 m hbar) depends neither on theta nor on the map coefficients.
    """
    m, hbar = nc.mass, nc.hbar
    return Coefficients(
        alpha2=nc.eta ** 2 / (8.0 * m * sw.mu ** 2 * hbar ** 2),
        beta2=sw.mu ** 2 / (2.0 * m),
        gamma=nc.eta / (2.0 * m * hbar),
    )


def sw_blocks(sw: SWParams, nc: NCParams) -> Dict[str, np.ndarray]:
    """Returns the 2x2 blocks A, B, C and D of the forward map.

    ``q = A Q + B Pi`` and ``p = C Q + D Pi``.
    """
    eye = np.eye(2)
    return {
        "A": sw.nu * eye,
        "B": -nc.theta / (2.0 * sw.nu * nc.hbar) * EPSILON,
        "C": nc.eta / (2.0 * sw.mu * nc.hbar) * EPSILON,
        "D": sw.mu * eye,
    }


def sw_matrix(sw: SWParams, nc: NCParams) -> np.ndarray:
    """Returns the 4x4 forward map acting on ``(Q1, Q2, Pi1, Pi2)``."""
    blocks = sw_blocks(sw, nc)
    return np.block([[blocks["A"], blocks["B"]], [blocks["C"], blocks["D"]]])


def sw_inverse_matrix(sw: SWParams, nc: NCParams) -> np.ndarray:
    """Returns the 4x4 inverse map acting on ``(q1, q2, p1, p2)``.

    Raises:
        ConstraintViolation: If ``theta eta >= hbar^2``.
    """
    nc.check_invertible()
    root = math.sqrt(1.0 - nc.deformation)
    eye = np.eye(2)
    return np.block([
        [sw.mu * eye, nc.theta / (2.0 * sw.nu * nc.hbar) * EPSILON],
        [-nc.eta / (2.0 * sw.mu * nc.hbar) * EPSILON, sw.nu * eye],
    ]) / root


def sw_forward(sw: SWParams, nc: NCParams, state: PhaseState) -> NCVariables:
    """Maps commutative variables to noncommutative ones.

    ``q_i = nu Q_i - (theta / 2 nu hbar) eps_ij Pi_j`` and
    ``p_i = mu Pi_i + (eta / 2 mu hbar) eps_ij Q_j``.
    """
    a = nc.theta / (2.0 * sw.nu * nc.hbar)
    b = nc.eta / (2.0 * sw.mu * nc.hbar)
    return NCVariables(
        q1=sw.nu * state.q1 - a * state.pi2,
        q2=sw.nu * state.q2 + a * state.pi1,
        p1=sw.mu * state.pi1 + b * state.q2,
        p2=sw.mu * state.pi2 - b * state.q1,
    )


def sw_inverse(sw: SWParams, nc: NCParams, variables: NCVariables) -> PhaseState:
    """Maps noncommutative variables back to commutative ones.

    ``Q = mu (q + (theta / 2 xi hbar) eps p) / r`` and
    ``Pi = nu (p - (eta / 2 xi hbar) eps q) / r`` with
    ``r = sqrt(1 - theta eta / hbar^2)`` and ``xi = nu mu``.

    Raises:
        ConstraintViolation: If ``theta eta >= hbar^2``.
    """
    nc.check_invertible()
    root = math.sqrt(1.0 - nc.deformation)
    a = nc.theta / (2.0 * sw.xi * nc.hbar)
    b = nc.eta / (2.0 * sw.xi * nc.hbar)
    q1, q2, p1, p2 = variables.q1, variables.q2, variables.p1, variables.p2
    return PhaseState(
        q1=sw.mu * (q1 + a * p2) / root,
        q2=sw.mu * (q2 - a * p1) / root,
        pi1=sw.nu * (p1 - b * q2) / root,
        pi2=sw.nu * (p2 + b * q1) / root,
    )


def jacobian_det(nc: NCParams) -> float:
    """Returns the Jacobian determinant ``1 - theta eta / hbar^2`` of the forward map."""
    return 1.0 - nc.deformation


def validate_algebra(sw: SWParams, nc: NCParams, tolerance: float = ALGEBRA_TOLERANCE) -> AlgebraCheckReport:
    """Checks the matrix equations of the deformed algebra for a map.

    The equations are ``A D^T - B C^T = I``, ``A B^T - B A^T = Theta / hbar``
    and ``C D^T - D C^T = N / hbar`` with ``Theta = theta eps`` and
    ``N = eta eps``.

    Args:
        sw (SWParams): Map coefficients, not necessarily satisfying the constraint.
        nc (NCParams): Algebra parameters.
        tolerance (float): Residual flagged as a failure (default = 1e-12).

    Returns:
        Report of the maximum residual per equation.
    """
    blocks = sw_blocks(sw, nc)
    a, b, c, d = blocks["A"], blocks["B"], blocks["C"], blocks["D"]
    hbar = nc.hbar

    residuals = {
        "position_momentum": a @ d.T - b @ c.T - np.eye(2),
        "position_position": a @ b.T - b @ a.T - nc.theta * EPSILON / hbar,
        "momentum_momentum": c @ d.T - d @ c.T - nc.eta * EPSILON / hbar,
    }
    report = AlgebraCheckReport(
        residuals={name: float(np.max(np.abs(val))) for name, val in residuals.items()},
        tolerance=tolerance,
        blocks=blocks,
    )
    if not report.ok:
        logging.info("Algebra check failed for %s.", ", ".join(report.failures))
    return report


def hamiltonian(coeff: Coefficients, state: PhaseState) -> float:
    """Returns the free-particle Hamiltonian in commutative variables."""
    q1, q2, pi1, pi2 = state.q1, state.q2, state.pi1, state.pi2
    return (
        coeff.alpha2 * (q1 * q1 + q2 * q2)
        + coeff.beta2 * (pi1 * pi1 + pi2 * pi2)
        + coeff.gamma * (pi1 * q2 - pi2 * q1)
    )


def sw_forward_axial(eta: Sequence[float], hbar: float, q: Sequence[float], pi: Sequence[float]) -> np.ndarray:
    """Maps 3D commutative variables to noncommutative momenta with ``mu = 1``.

    ``p_i = Pi_i + eps_ijk eta_j Q_k / (2 hbar)``, i.e. ``p = Pi + (eta x Q) / (2 hbar)``.

    Args:
        eta: Momentum noncommutativity vector.
        hbar (float): Reduced Planck constant.
        q: Position vector ``Q``.
        pi: Momentum vector ``Pi``.

    Returns:
        Noncommutative momentum vector.
    """
    if not hbar > 0:
        raise ValidationError("Invalid hbar, must be positive")
    eta, q, pi = (np.asarray(val, dtype=float) for val in (eta, q, pi))
    if eta.shape != (3,) or q.shape != (3,) or pi.shape != (3,):
        raise ValidationError("Invalid vector, three components expected")
    return pi + np.cross(eta, q) / (2.0 * hbar)
