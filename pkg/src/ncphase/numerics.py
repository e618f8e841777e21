"""Quadrature and series engines with explicit error control.

Both engines are deterministic: identical inputs produce bit-identical
outputs. Integrals over infinite ranges are mapped onto finite ones with the
substitution ``x = tan(u)``.
"""
from __future__ import annotations
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from dataclasses import dataclass, fields, replace
from functools import lru_cache
import logging
import math

import numpy as np

from .errors import ConfigError, ConvergenceError, QuadratureFailure, ValidationError

Bounds = Tuple[float, float]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances of the adaptive Gauss-Legendre engine.

    Attributes:
        abs_tol: Absolute tolerance, shared among panels by area.
        rel_tol: Relative tolerance of every accepted panel.
        max_panels: Maximum number of panels evaluated before failing.
        order: Number of Gauss-Legendre nodes per panel axis.
        pi_window: If set, infinite bounds are truncated to ``|x| <= pi_window``
            instead of being mapped with ``x = tan(u)``. Only valid for
            integrands with Gaussian tails.
    """
    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    max_panels: int = 4096
    order: int = 16
    pi_window: Optional[float] = None

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise ValidationError("Invalid quadrature tolerance")
        if self.max_panels < 1:
            raise ValidationError("Invalid maximum number of panels")
        if self.order < 2:
            raise ValidationError("Invalid quadrature order")
        if self.pi_window is not None and not self.pi_window > 0:
            raise ValidationError("Invalid momentum window")

    @classmethod
    def from_config(cls, config: Dict = None, **overrides) -> "QuadratureSpec":
        """Creates a specification from the ``quadrature`` configuration.

        Args:
            config (Dict): Configuration section (default ``ncphase.get_config("quadrature")``).
            **overrides: Values taking precedence over the configuration.
                ``None`` values are ignored.

        Raises:
            ConfigError: If a configuration key is unknown.
        """
        import ncphase

        if config is None:
            config = ncphase.get_config("quadrature")
        return cls(**_known_fields(cls, config, overrides))

    def with_tolerance(self, abs_tol: float = None, rel_tol: float = None) -> "QuadratureSpec":
        return replace(
            self,
            abs_tol=self.abs_tol if abs_tol is None else abs_tol,
            rel_tol=self.rel_tol if rel_tol is None else rel_tol,
        )


@dataclass(frozen=True)
class SeriesControl:
    """Stopping rule of :func:`sum_adaptive`.

    Attributes:
        rel_tol: A term is small if it is below ``rel_tol`` times the partial sum.
        max_terms: Hard cap on the number of terms.
        min_terms: Number of terms summed before the stopping rule applies.
    """
    rel_tol: float = 1e-12
    max_terms: int = 1_000_000
    min_terms: int = 5

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValidationError("Invalid series tolerance")
        if self.max_terms < 10:
            raise ValidationError("Invalid maximum number of terms")
        if not 0 < self.min_terms <= self.max_terms:
            raise ValidationError("Invalid minimum number of terms")

    @classmethod
    def from_config(cls, config: Dict = None, **overrides) -> "SeriesControl":
        """Creates a series control from the ``series`` configuration."""
        import ncphase

        if config is None:
            config = ncphase.get_config("series")
        return cls(**_known_fields(cls, config, overrides))


def _known_fields(cls, config: Dict, overrides: Dict) -> Dict:
    names = {field.name for field in fields(cls)}
    args = {}
    for key, val in list(config.items()) + list(overrides.items()):
        if val is None:
            continue
        if key not in names:
            raise ConfigError(f"Invalid configuration key {key}")
        args[key] = val
    return args


# REMARK: @cache decorator can be used for Python 3.9+
@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Returns Gauss-Legendre nodes and weights on (-1, 1)."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


class _Axis:
    """Integration axis, mapped with ``x = tan(u)`` if a bound is infinite."""

    def __init__(self, bounds: Bounds, pi_window: float = None):
        lo, hi = (float(val) for val in bounds)
        if math.isnan(lo) or math.isnan(hi) or lo > hi:
            raise ValidationError(f"Invalid integration bounds ({lo}, {hi})")

        self._mapped = False
        if math.isinf(lo) or math.isinf(hi):
            if pi_window is not None:
                lo = max(lo, -pi_window)
                hi = min(hi, pi_window)
            else:
                self._mapped = True
                lo, hi = math.atan(lo), math.atan(hi)
        self.lo = lo
        self.hi = hi

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def to_mapped(self, x: float) -> float:
        return math.atan(x) if self._mapped else x

    def transform(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Returns points and Jacobian factors for mapped coordinates."""
        if not self._mapped:
            return u, np.ones_like(u)
        x = np.tan(u)
        return x, 1.0 + x * x


def _scale(vals: np.ndarray) -> float:
    return float(np.max(np.abs(vals))) if np.ndim(vals) else abs(float(vals))


def integrate_1d(f: Callable, bounds: Bounds, spec: QuadratureSpec = None, points: Sequence[float] = ()) -> Tuple:
    """Integrates a function over an interval by adaptive Gauss-Legendre panels.

    Every panel is bisected and the two halves are compared with the parent
    estimate. A panel is accepted when the difference is below
    ``max(abs_tol * fraction, rel_tol * |value|)``, where ``fraction`` is its
    share of the (mapped) interval.

    Args:
        f (Callable): Vectorized integrand; receives an array of ``N`` points
            and returns an array of shape ``(N,)`` or ``(N, K)`` for ``K``
            simultaneous integrands.
        bounds: Integration interval, bounds may be infinite.
        spec (QuadratureSpec): Tolerances (default ``QuadratureSpec()``).
        points: Points inside the interval where the integrand varies
            rapidly; they become initial panel edges.

    Returns:
        Tuple of the integral and its error estimate. Both are arrays of shape
        ``(K,)`` for vector-valued integrands.

    Raises:
        QuadratureFailure: If the panel budget is exhausted or the integrand
            is not finite.

    Examples:
        >>> integrate_1d(lambda x: np.exp(-x * x), (-np.inf, np.inf))
        >>> (1.7724538509055159, 2.2e-16)
    """
    spec = spec or QuadratureSpec()
    axis = _Axis(bounds, spec.pi_window)
    if axis.length == 0:
        return 0.0, 0.0

    nodes, weights = gauss_legendre(spec.order)

    def evaluate(panels: List[Tuple[float, float]]) -> List:
        a = np.array([panel[0] for panel in panels])
        b = np.array([panel[1] for panel in panels])
        half = 0.5 * (b - a)
        u = (0.5 * (a + b))[:, None] + half[:, None] * nodes[None, :]
        x, jac = axis.transform(u.ravel())
        vals = np.asarray(f(x), dtype=float)
        vals = vals.reshape((len(panels), len(nodes)) + vals.shape[1:])
        jac = jac.reshape(len(panels), len(nodes))
        vals = vals * jac.reshape(jac.shape + (1,) * (vals.ndim - 2))
        results = np.einsum("pn...,n->p...", vals, weights)
        results = results * half.reshape((-1,) + (1,) * (results.ndim - 1))
        return list(results)

    edges = [axis.lo]
    for point in sorted(points):
        u = axis.to_mapped(point)
        if axis.lo < u < axis.hi:
            edges.append(u)
    edges.append(axis.hi)
    roots = list(zip(edges[:-1], edges[1:]))

    stack = list(zip(roots, evaluate(roots)))
    stack.reverse()
    count = len(roots)
    accepted, errors = [], []

    while stack:
        (a, b), estimate = stack.pop()
        mid = 0.5 * (a + b)
        children = [(a, mid), (mid, b)]
        left, right = evaluate(children)
        count += 2
        fine = left + right
        if not np.all(np.isfinite(fine)):
            raise QuadratureFailure("Integrand is not finite", _sum(accepted), float(np.sum(errors)))
        err = _scale(fine - estimate)
        tol = max(spec.abs_tol * (b - a) / axis.length, spec.rel_tol * _scale(fine))
        if err <= tol:
            accepted.append(fine)
            errors.append(err)
            continue
        if count >= spec.max_panels:
            value = _sum(accepted + [fine] + [item[1] for item in stack])
            bound = float(np.sum(errors)) + err
            raise QuadratureFailure(f"Quadrature did not converge within {spec.max_panels} panels", value, bound)
        stack.append(((mid, b), right))
        stack.append(((a, mid), left))

    logging.debug("1D quadrature converged with %d panels.", count)
    return _sum(accepted), float(np.sum(errors))


def integrate_2d(f: Callable, q_bounds: Bounds, pi_bounds: Bounds, spec: QuadratureSpec = None) -> Tuple:
    """Integrates a function over a rectangle by adaptive tensor Gauss-Legendre panels.

    Panels are split into four children whose sum is compared with the parent
    estimate; acceptance follows the same rule as :func:`integrate_1d` with
    area fractions. Either axis may be infinite.

    Args:
        f (Callable): Vectorized integrand ``f(q, pi)``; receives two arrays
            of ``N`` points and returns an array of shape ``(N,)`` or ``(N, K)``.
        q_bounds: Bounds of the first axis.
        pi_bounds: Bounds of the second axis.
        spec (QuadratureSpec): Tolerances (default ``QuadratureSpec()``).

    Returns:
        Tuple of the integral and its error estimate.

    Raises:
        QuadratureFailure: If the panel budget is exhausted or the integrand
            is not finite.

    Examples:
        >>> integrate_2d(lambda q, p: np.ones_like(q), (-3, 3), (-1, 1))
        >>> (12.0, 0.0)
    """
    spec = spec or QuadratureSpec()
    q_axis = _Axis(q_bounds, spec.pi_window)
    p_axis = _Axis(pi_bounds, spec.pi_window)
    area = q_axis.length * p_axis.length
    if area == 0:
        return 0.0, 0.0

    nodes, weights = gauss_legendre(spec.order)
    weights_2d = np.outer(weights, weights).ravel()
    n2 = len(weights_2d)
    uq_nodes = np.repeat(nodes, len(nodes))
    up_nodes = np.tile(nodes, len(nodes))

    def evaluate(panels: List[Tuple[float, float, float, float]]) -> List:
        rect = np.array(panels)
        hq = 0.5 * (rect[:, 1] - rect[:, 0])
        hp = 0.5 * (rect[:, 3] - rect[:, 2])
        uq = (0.5 * (rect[:, 0] + rect[:, 1]))[:, None] + hq[:, None] * uq_nodes[None, :]
        up = (0.5 * (rect[:, 2] + rect[:, 3]))[:, None] + hp[:, None] * up_nodes[None, :]
        q, jq = q_axis.transform(uq.ravel())
        p, jp = p_axis.transform(up.ravel())
        vals = np.asarray(f(q, p), dtype=float)
        vals = vals.reshape((len(panels), n2) + vals.shape[1:])
        jac = (jq * jp).reshape(len(panels), n2)
        vals = vals * jac.reshape(jac.shape + (1,) * (vals.ndim - 2))
        results = np.einsum("pn...,n->p...", vals, weights_2d)
        results = results * (hq * hp).reshape((-1,) + (1,) * (results.ndim - 1))
        return list(results)

    root = (q_axis.lo, q_axis.hi, p_axis.lo, p_axis.hi)
    stack = [(root, evaluate([root])[0])]
    count = 1
    accepted, errors = [], []

    while stack:
        (q0, q1, p0, p1), estimate = stack.pop()
        qm, pm = 0.5 * (q0 + q1), 0.5 * (p0 + p1)
        children = [(q0, qm, p0, pm), (q0, qm, pm, p1), (qm, q1, p0, pm), (qm, q1, pm, p1)]
        results = evaluate(children)
        count += 4
        fine = results[0] + results[1] + results[2] + results[3]
        if not np.all(np.isfinite(fine)):
            raise QuadratureFailure("Integrand is not finite", _sum(accepted), float(np.sum(errors)))
        err = _scale(fine - estimate)
        tol = max(spec.abs_tol * (q1 - q0) * (p1 - p0) / area, spec.rel_tol * _scale(fine))
        if err <= tol:
            accepted.append(fine)
            errors.append(err)
            continue
        if count >= spec.max_panels:
            value = _sum(accepted + [fine] + [item[1] for item in stack])
            bound = float(np.sum(errors)) + err
            raise QuadratureFailure(f"Quadrature did not converge within {spec.max_panels} panels", value, bound)
        for child, result in reversed(list(zip(children, results))):
            stack.append((child, result))

    logging.debug("2D quadrature converged with %d panels.", count)
    return _sum(accepted), float(np.sum(errors))


def _sum(values: List) -> Union[float, np.ndarray]:
    if not values:
        return 0.0
    total = np.sum(np.stack(values), axis=0)
    return float(total) if np.ndim(total) == 0 else total


def sum_adaptive(term: Callable[[int], Union[float, np.ndarray]], ctl: SeriesControl = None) -> Tuple:
    """Sums a series until three consecutive terms are negligible.

    A term is negligible if, component by component, its magnitude is below
    ``ctl.rel_tol`` times the magnitude of the partial sum. No term is
    negligible among the first ``ctl.min_terms`` terms or while the partial
    sum is zero, so an identically zero series reaches the term cap.
    Vector-valued terms allow several moments to be accumulated in one pass.

    Args:
        term (Callable): Function returning the term with the given index.
        ctl (SeriesControl): Stopping rule (default ``SeriesControl()``).

    Returns:
        Tuple of the partial sum and the number of terms used.

    Raises:
        ConvergenceError: If ``ctl.max_terms`` is reached first.

    Examples:
        >>> sum_adaptive(lambda n: math.exp(-(2 * n + 1)))
        >>> (0.42545906411966, 18)
    """
    ctl = ctl or SeriesControl()

    total = None
    small = 0
    last = None
    for index in range(ctl.max_terms):
        last = np.asarray(term(index), dtype=float)
        total = last.copy() if total is None else total + last
        # zero terms are not small while the partial sum is still zero
        if index + 1 >= ctl.min_terms and np.any(total != 0) and np.all(np.abs(last) <= ctl.rel_tol * np.abs(total)):
            small += 1
            if small == 3:
                logging.debug("Series converged with %d terms.", index + 1)
                return (float(total) if total.ndim == 0 else total), index + 1
        else:
            small = 0

    raise ConvergenceError(
        f"Series did not converge within {ctl.max_terms} terms",
        partial=float(total) if total.ndim == 0 else total,
        bound=float(np.max(np.abs(last))),
        terms=ctl.max_terms,
    )
