import pytest
from tests.conftest import *

import math

import numpy as np

from ncphase.errors import ConfigError, ConvergenceError, QuadratureFailure, ValidationError
from ncphase.numerics import QuadratureSpec, SeriesControl, gauss_legendre, integrate_1d, integrate_2d, sum_adaptive

TIGHT = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12)


def test_gauss_legendre():
    nodes, weights = gauss_legendre(16)
    assert len(nodes) == 16
    assert weights.sum() == pytest.approx(2.0, rel=1e-15)
    assert gauss_legendre(16) is gauss_legendre(16)


def test_gaussian_integral():
    '''Test a Gaussian integral over the real line.'''
    value, error = integrate_1d(lambda x: np.exp(-x * x), (-math.inf, math.inf), TIGHT)
    assert value == pytest.approx(math.sqrt(math.pi), abs=1e-10)
    assert error < 1e-10


def test_half_line():
    value, _ = integrate_1d(lambda x: np.exp(-x), (0.0, math.inf), TIGHT)
    assert value == pytest.approx(1.0, abs=1e-10)


def test_polynomial():
    value, error = integrate_1d(lambda x: x ** 2, (0.0, 1.0))
    assert value == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert error < 1e-15


def test_vector_integrand():
    '''Test simultaneous integration of several integrands.'''
    value, _ = integrate_1d(lambda x: np.stack([x, x ** 2, np.cos(x)], axis=1), (0.0, 1.0))
    assert value.shape == (3,)
    assert np.allclose(value, [0.5, 1.0 / 3.0, math.sin(1.0)], rtol=1e-12, atol=0)


def test_points():
    '''Test that breakpoints become panel edges.'''
    value, _ = integrate_1d(lambda x: np.abs(x), (-1.0, 1.0), points=[0.0, 5.0])
    assert value == pytest.approx(1.0, abs=1e-15)


def test_empty_interval():
    assert integrate_1d(lambda x: x, (1.0, 1.0)) == (0.0, 0.0)


def test_invalid_bounds():
    with pytest.raises(ValidationError):
        integrate_1d(lambda x: x, (1.0, 0.0))


def test_panel_budget():
    '''Test failure with partial value when the panel budget is exhausted.'''
    spec = QuadratureSpec(max_panels=8)
    with pytest.raises(QuadratureFailure) as info:
        integrate_1d(lambda x: 1.0 / np.sqrt(x), (0.0, 1.0), spec)
    assert info.value.value is not None
    assert info.value.bound > 0
    assert isinstance(info.value, ArithmeticError)


def test_not_finite():
    with pytest.raises(QuadratureFailure):
        integrate_1d(lambda x: np.full_like(x, np.nan), (0.0, 1.0))


def test_error_bound():
    '''Test that the error estimate bounds the true error on shifted Gaussians.'''
    rng = np.random.default_rng(3)
    spec = QuadratureSpec(abs_tol=1e-10, rel_tol=1e-10)
    for _ in range(20):
        width = rng.uniform(0.5, 2.0)
        centre = rng.uniform(-1.0, 1.0)
        value, error = integrate_1d(lambda x: np.exp(-((x - centre) / width) ** 2), (-math.inf, math.inf), spec, points=[centre])
        assert abs(value - width * math.sqrt(math.pi)) <= error + 1e-13


def test_pi_window():
    spec = QuadratureSpec(pi_window=12.0)
    value, _ = integrate_1d(lambda x: np.exp(-x * x), (-math.inf, math.inf), spec)
    assert value == pytest.approx(math.sqrt(math.pi), abs=1e-10)


def test_rectangle():
    value, _ = integrate_2d(lambda q, p: np.ones_like(q), (-3.0, 3.0), (-1.0, 1.0))
    assert value == pytest.approx(12.0, abs=1e-14)


def test_plane_gaussian():
    '''Test a Gaussian over a box times the real line.'''
    spec = QuadratureSpec(abs_tol=1e-11, rel_tol=1e-11)
    value, _ = integrate_2d(lambda q, p: np.exp(-q * q - p * p), (-10.0, 10.0), (-math.inf, math.inf), spec)
    assert value == pytest.approx(math.pi * math.erf(10.0), abs=1e-10)


def test_rectangle_vector():
    value, _ = integrate_2d(lambda q, p: np.stack([q * p, q * q], axis=1), (0.0, 1.0), (0.0, 2.0))
    assert np.allclose(value, [1.0, 2.0 / 3.0], rtol=1e-13, atol=0)


@pytest.mark.parametrize("f", [
    lambda q, p: q * np.exp(-q * q - p * p),
    lambda q, p: p ** 3 * np.exp(-q * q - 2 * p * p) * np.cos(q),
])
def test_odd_integrand(f):
    '''Test that odd integrands over symmetric ranges vanish.'''
    value, _ = integrate_2d(f, (-4.0, 4.0), (-math.inf, math.inf))
    assert abs(value) < 1e-10


def test_deterministic():
    '''Test that identical inputs produce identical outputs.'''
    f = lambda q, p: np.exp(-q * q - 2 * p * p) * np.cos(q * p)
    first = integrate_2d(f, (-2.0, 2.0), (-math.inf, math.inf))
    second = integrate_2d(f, (-2.0, 2.0), (-math.inf, math.inf))
    assert first == second


def test_sum_geometric():
    '''Test a series with a closed form.'''
    value, terms = sum_adaptive(lambda n: math.exp(-(2 * n + 1)))
    assert value == pytest.approx(0.5 / math.sinh(1.0), abs=1e-12)
    assert 10 < terms < 30


def test_sum_vector():
    value, _ = sum_adaptive(lambda n: np.array([0.5 ** n, n * 0.5 ** n]))
    assert np.allclose(value, [2.0, 2.0], rtol=1e-11, atol=0)


def test_sum_divergent():
    '''Test failure with partial sum when the term cap is reached.'''
    with pytest.raises(ConvergenceError) as info:
        sum_adaptive(lambda n: 1.0 / (n + 1), SeriesControl(max_terms=100))
    assert info.value.terms == 100
    assert info.value.partial == pytest.approx(sum(1.0 / k for k in range(1, 101)))


@pytest.mark.parametrize("term, expected", [
    (lambda n: 1.0 if n == 4 else 0.0, 1.0),
    (lambda n: 1.0 if n == 0 else 0.0, 1.0),
    (lambda n: 0.0 if n < 3 else 0.5 ** n, 0.25),
])
def test_sum_leading_zeros(term, expected):
    '''Test series whose first terms vanish.'''
    value, terms = sum_adaptive(term)
    assert value == pytest.approx(expected, abs=1e-12)
    assert terms < 60


def test_sum_zero():
    '''Test that an identically zero series never counts as converged.'''
    with pytest.raises(ConvergenceError) as info:
        sum_adaptive(lambda n: 0.0, SeriesControl(max_terms=20))
    assert info.value.partial == 0.0


@pytest.mark.parametrize("kwargs", [{"rel_tol": 0.0}, {"max_terms": 5}, {"min_terms": 0}, {"max_terms": 10, "min_terms": 11}])
def test_invalid_series_control(kwargs):
    with pytest.raises(ValidationError):
        SeriesControl(**kwargs)


@pytest.mark.parametrize("kwargs", [{"abs_tol": -1.0}, {"max_panels": 0}, {"order": 1}, {"pi_window": 0.0}])
def test_invalid_quadrature_spec(kwargs):
    with pytest.raises(ValidationError):
        QuadratureSpec(**kwargs)


def test_from_config():
    '''Test tolerances read from the configuration.'''
    spec = QuadratureSpec.from_config(rel_tol=1e-6)
    assert spec.rel_tol == 1e-6
    assert spec.max_panels == 4096
    assert SeriesControl.from_config().rel_tol == 1e-12


def test_from_config_environment(monkeypatch):
    monkeypatch.setenv("NCPHASE_QUADRATURE_ABS_TOL", "1e-5")
    monkeypatch.setenv("NCPHASE_SERIES_MAX_TERMS", "500")
    assert QuadratureSpec.from_config().abs_tol == 1e-5
    assert SeriesControl.from_config().max_terms == 500


def test_from_config_unknown_key():
    with pytest.raises(ConfigError):
        QuadratureSpec.from_config({"bogus": 1})
