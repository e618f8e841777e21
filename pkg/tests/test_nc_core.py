import pytest
from tests.conftest import *

import math

import numpy as np

from ncphase.errors import ConstraintViolation, ValidationError
from ncphase.nc_core import (
    NCParams,
    SWParams,
    PhaseState,
    derive_sw_params,
    nc_coefficients,
    sw_forward,
    sw_inverse,
    sw_matrix,
    sw_inverse_matrix,
    sw_forward_axial,
    jacobian_det,
    validate_algebra,
    hamiltonian,
)
from ncphase.dynamics import omega


def test_derive_sw_params():
    '''Test the map coefficients of a known parameter set.'''
    sw = derive_sw_params(NCParams(theta=0.75, eta=1.0))
    assert sw.mu == 1.0
    assert sw.nu == pytest.approx(0.75, abs=1e-15)


@pytest.mark.parametrize("theta, eta, hbar", nc_parameters())
@pytest.mark.parametrize("mu", [0.5, 1.0, 3.0])
def test_constraint(theta, eta, hbar, mu):
    '''Test that derived coefficients satisfy the constraint.'''
    nc = NCParams(theta=theta, eta=eta, hbar=hbar)
    sw = derive_sw_params(nc, mu)
    assert abs(sw.constraint_residual(nc)) < 1e-15
    assert sw.mu == mu


def test_commutative_limit():
    '''Test that the map is the identity without noncommutativity.'''
    nc = NCParams()
    sw = derive_sw_params(nc)
    assert sw.xi == 1.0
    assert np.array_equal(sw_matrix(sw, nc), np.eye(4))


@pytest.mark.parametrize("theta, eta", [(1.0, 1.0), (2.0, 0.6), (10.0, 10.0)])
def test_constraint_violation(theta, eta):
    '''Test that non-invertible parameters are rejected.'''
    nc = NCParams(theta=theta, eta=eta)
    with pytest.raises(ConstraintViolation):
        derive_sw_params(nc)
    with pytest.raises(ValueError):
        sw_inverse_matrix(SWParams(1.0, 0.5), nc)


@pytest.mark.parametrize("kwargs", [{"hbar": 0.0}, {"mass": -1.0}, {"theta": -0.1}, {"eta": math.nan}])
def test_invalid_parameters(kwargs):
    with pytest.raises(ValidationError):
        NCParams(**kwargs)


def test_invalid_state():
    with pytest.raises(ValidationError):
        PhaseState(0.0, math.inf, 0.0, 0.0)


@pytest.mark.parametrize("theta, eta, hbar", nc_parameters())
def test_round_trip(theta, eta, hbar):
    '''Test that the inverse map recovers commutative variables.'''
    nc = NCParams(theta=theta, eta=eta, hbar=hbar)
    sw = derive_sw_params(nc)
    error = 0.0
    for state in random_states():
        back = sw_inverse(sw, nc, sw_forward(sw, nc, state))
        error = max(error, float(np.max(np.abs(back.as_array() - state.as_array()))))
    assert error < 1e-12


@pytest.mark.parametrize("theta, eta, hbar", nc_parameters())
def test_inverse_matrix(theta, eta, hbar):
    nc = NCParams(theta=theta, eta=eta, hbar=hbar)
    sw = derive_sw_params(nc, 1.7)
    product = sw_inverse_matrix(sw, nc) @ sw_matrix(sw, nc)
    assert np.max(np.abs(product - np.eye(4))) < 1e-12


def test_forward_matches_matrix():
    nc = NCParams(theta=0.3, eta=0.7)
    sw = derive_sw_params(nc)
    state = PhaseState(0.1, -0.4, 1.2, 0.8)
    assert np.allclose(sw_forward(sw, nc, state).as_array(), sw_matrix(sw, nc) @ state.as_array(), rtol=0, atol=1e-15)


@pytest.mark.parametrize("theta, eta, hbar", nc_parameters())
def test_jacobian(theta, eta, hbar):
    '''Test the Jacobian determinant against the explicit map.'''
    nc = NCParams(theta=theta, eta=eta, hbar=hbar)
    sw = derive_sw_params(nc)
    assert jacobian_det(nc) == pytest.approx(np.linalg.det(sw_matrix(sw, nc)), abs=1e-12)


@pytest.mark.parametrize("theta, eta, hbar", nc_parameters())
def test_validate_algebra(theta, eta, hbar):
    '''Test that derived coefficients reproduce the deformed algebra.'''
    nc = NCParams(theta=theta, eta=eta, hbar=hbar)
    report = validate_algebra(derive_sw_params(nc), nc)
    assert report.ok
    assert max(report.residuals.values()) < 1e-12


@pytest.mark.parametrize("theta, eta", [(0.0, 0.0), (0.3, 0.7)])
def test_validate_algebra_perturbed(theta, eta):
    '''Test that a perturbed coefficient is flagged in the position-momentum equation.'''
    nc = NCParams(theta=theta, eta=eta)
    sw = derive_sw_params(nc)
    report = validate_algebra(SWParams(sw.mu, sw.nu * (1.0 + 1e-3)), nc)
    assert not report.ok
    assert report.failures == ["position_momentum"]
    assert report.residuals["position_position"] < 1e-12


@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
def test_hamiltonian(mu):
    '''Test the Hamiltonian against the noncommutative kinetic energy and Omega.'''
    nc = NCParams(theta=0.2, eta=1.3, mass=0.7)
    sw = derive_sw_params(nc, mu)
    coeff = nc_coefficients(nc, sw)
    for state in random_states(20, 2.0):
        p = sw_forward(sw, nc, state)
        kinetic = (p.p1 ** 2 + p.p2 ** 2) / (2.0 * nc.mass)
        assert hamiltonian(coeff, state) == pytest.approx(kinetic, rel=1e-12, abs=1e-12)
        assert hamiltonian(coeff, state) == pytest.approx(coeff.alpha * coeff.beta * omega(state, coeff), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("theta", [0.0, 0.3, 0.9])
@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
def test_gamma_invariance(theta, mu):
    '''Test that the frequency depends neither on theta nor on mu.'''
    nc = NCParams(theta=theta, eta=1.0, mass=2.0)
    coeff = nc_coefficients(nc, derive_sw_params(nc, mu))
    assert coeff.gamma == 0.25
    assert 2.0 * coeff.alpha * coeff.beta == pytest.approx(coeff.gamma, rel=1e-15)


def test_forward_axial():
    '''Test the Zeeman-like decomposition of the 3D kinetic energy.'''
    eta, hbar, m = 0.8, 1.0, 1.5
    rng = np.random.default_rng(1)
    for _ in range(10):
        q, pi = rng.uniform(-1.0, 1.0, 3), rng.uniform(-1.0, 1.0, 3)
        p = sw_forward_axial([0.0, 0.0, eta], hbar, q, pi)
        lz = q[0] * pi[1] - q[1] * pi[0]
        expected = pi @ pi / (2 * m) + eta / (2 * m * hbar) * lz + eta ** 2 / (8 * m * hbar ** 2) * (q[0] ** 2 + q[1] ** 2)
        assert p @ p / (2 * m) == pytest.approx(expected, rel=1e-12)


def test_forward_axial_invalid():
    with pytest.raises(ValidationError):
        sw_forward_axial([0.0, 1.0], 1.0, [0.0, 0.0, 0.0], [0.0, 0.0, 0.0])
