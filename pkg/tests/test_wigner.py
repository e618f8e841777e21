import pytest
from tests.conftest import *

import logging
import math

import numpy as np
from scipy.integrate import simpson

from ncphase.errors import QuantumNumberError, ValidationError
from ncphase.nc_core import PhaseState
from ncphase.dynamics import evolve, free_particle_coefficients, initial_conditions
from ncphase.numerics import QuadratureSpec, integrate_2d
from ncphase.wigner import (
    laguerre,
    stargen_energy,
    StargenState,
    stargen_density,
    stargen_state,
    momentum_marginal,
    GaussianState,
    gaussian_density,
    plane_gaussian,
    state_mass,
    ridge,
    reduced_density,
    reduce_wigner,
    default_grid,
)


def laguerre_expansion(n, x):
    return sum(math.comb(n, k) * (-x) ** k / math.factorial(k) for k in range(n + 1))


@pytest.mark.parametrize("n", range(8))
@pytest.mark.parametrize("x", [0.0, 0.5, 1.3, 4.0, 11.0])
def test_laguerre(n, x):
    '''Test the recurrence against the explicit polynomial.'''
    assert laguerre(n, x) == pytest.approx(laguerre_expansion(n, x), rel=1e-11, abs=1e-11)


def test_laguerre_array():
    x = np.array([[0.0, 1.0], [2.0, 3.0]])
    assert laguerre(1, x).tolist() == [[1.0, 0.0], [-1.0, -2.0]]
    assert laguerre(1, 2.0) == -1.0
    with pytest.raises(QuantumNumberError):
        laguerre(-1, 0.0)


@pytest.mark.parametrize("gamma", [0.5, 1.0, 3.0])
def test_stargen_energy(gamma):
    '''Test equally spaced star-genvalues.'''
    energies = [stargen_energy(n, gamma) for n in range(10)]
    assert energies[0] == gamma
    assert np.allclose(np.diff(energies), 2 * gamma, rtol=1e-15, atol=0)


def test_stargen_density_origin():
    '''Test the density at Omega = 0.'''
    state = StargenState(0, free_particle_coefficients(1.0), norm=2.0)
    assert stargen_density(state, PhaseState(0.0, 0.0, 0.0, 0.0)) == pytest.approx(2.0 / math.pi, rel=1e-15)


def test_stargen_density_sign():
    '''Test the sign change of the first excited state at Omega = hbar.'''
    state = StargenState(1, free_particle_coefficients(1.0))
    inside = stargen_density(state, PhaseState(0.5, 0.0, 0.0, 0.0))
    node = stargen_density(state, PhaseState(1.0, 0.0, 0.0, 0.0))
    outside = stargen_density(state, PhaseState(1.5, 0.0, 0.0, 0.0))
    assert inside < 0 < outside
    assert node == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("n", range(11))
def test_stargen_stationary(n):
    '''Test that star-genstates are stationary under the dynamics.'''
    gamma, m = 0.7, 1.2
    state = StargenState(n, free_particle_coefficients(gamma, m))
    for ic in random_states(10, 1.0):
        before = stargen_density(state, ic)
        for t in (0.3, 2.0, 7.5):
            assert stargen_density(state, evolve(ic, gamma, m, t)) == pytest.approx(before, rel=1e-10, abs=1e-12)


def test_stargen_far_field():
    state = StargenState(4, free_particle_coefficients(1.0))
    assert stargen_density(state, PhaseState(1e3, 0.0, 0.0, 0.0)) == 0.0


@pytest.mark.parametrize("n", [0, 1, 2])
@pytest.mark.parametrize("gamma", [0.5, 1.0])
def test_stargen_normalization(n, gamma):
    '''Test the normalization constant against its closed form.'''
    coeff = free_particle_coefficients(gamma)
    state = stargen_state(n, coeff, a=3.0)
    assert state.norm == pytest.approx(1.0 / (8.0 * 9.0 * coeff.ratio), rel=1e-6)


def test_stargen_invalid():
    with pytest.raises(QuantumNumberError):
        StargenState(-1, free_particle_coefficients(1.0))
    with pytest.raises(ValidationError):
        StargenState(0, free_particle_coefficients(0.0))


@pytest.mark.parametrize("n", [0, 1])
def test_momentum_marginal(n):
    '''Test that the momentum distribution integrates to one.'''
    state = stargen_state(n, free_particle_coefficients(1.0), a=3.0)
    grid = np.linspace(-15.0, 15.0, 601)
    density = momentum_marginal(state, 0.0, grid)
    assert simpson(density, x=grid) == pytest.approx(1.0, abs=1e-6)


def test_momentum_marginal_profile():
    '''Test the symmetric ground-state profile and its independence of x.'''
    state = stargen_state(0, free_particle_coefficients(1.0), a=3.0)
    grid = np.linspace(-5.0, 5.0, 41)
    density = momentum_marginal(state, 0.0, grid)
    assert np.allclose(density, density[::-1], rtol=1e-5, atol=1e-12)
    assert np.argmax(density) == 20
    shifted = momentum_marginal(state, 0.0, grid, x=1.5)
    assert np.allclose(density, shifted, rtol=1e-5, atol=1e-12)


def test_momentum_marginal_window():
    '''Test that the distribution follows the centre of the Q2 window.'''
    state = stargen_state(0, free_particle_coefficients(1.0), a=3.0)
    grid = np.linspace(-5.0, 5.0, 41)
    centred = momentum_marginal(state, 0.0, grid)
    moved = momentum_marginal(state, 1.0, grid - 1.0)
    assert np.allclose(centred, moved, rtol=1e-5, atol=1e-12)


def test_momentum_marginal_labels():
    '''Test that the distribution ignores the initial momentum pi_y.'''
    state = stargen_state(1, free_particle_coefficients(1.0), a=3.0)
    grid = np.linspace(-6.0, 6.0, 25)
    density = momentum_marginal(state, 4.0, grid)
    for piy in (-1.0, 2.5):
        moved = momentum_marginal(state, 4.0, grid, x=0.5, piy=piy)
        assert np.max(np.abs(moved - density)) < 1e-6
    with pytest.raises(ValidationError):
        momentum_marginal(state, 0.0, grid, piy=math.inf)


def test_gaussian_state_box():
    state = GaussianState(a=2.0, x=1.0, y=-1.0)
    assert state.box(1) == (-1.0, 3.0)
    assert state.box(2) == (-3.0, 1.0)
    assert state.norm == pytest.approx(1.0 / (16.0 * math.pi))
    with pytest.raises(ValidationError):
        GaussianState(a=0.0)


def test_gaussian_revival():
    '''Test that the Gaussian density recovers its initial pattern after pi/gamma.'''
    state = GaussianState(pix=0.5, piy=-0.3)
    q = np.linspace(-3.0, 3.0, 7)
    point = PhaseState(q[:, None], q[None, :], 0.2 * q[:, None], -0.1 * q[None, :])
    first = gaussian_density(state, point, 1.0, 1.0, 0.0)
    revived = gaussian_density(state, point, 1.0, 1.0, math.pi)
    assert first.shape == (7, 7)
    assert np.max(np.abs(first - revived)) < 1e-12


@pytest.mark.parametrize("gamma_t", gamma_times())
def test_gaussian_bound(gamma_t):
    '''Test that the Gaussian density is positive and bounded by its peak.'''
    state = GaussianState(pix=0.4, piy=-0.2)
    peak = 1.0 / (4.0 * math.pi * state.a ** 2)
    for point in random_states(50, 2.0):
        value = gaussian_density(state, point, 1.0, 1.0, gamma_t)
        assert 0.0 < value <= peak
    assert gaussian_density(state, PhaseState(1.0, -2.0, 0.4, -0.2), 1.0, 1.0, 0.0) == peak


def test_plane_gaussian():
    assert plane_gaussian(1.0) == math.pi
    assert plane_gaussian(2.0) == math.pi / 2
    with pytest.raises(ValidationError):
        plane_gaussian(0.0)


@pytest.mark.parametrize("gamma_t, mass", [(0.0, 1.0), (math.pi / 3, 4.0), (math.pi / 4, 2.0)])
def test_state_mass(gamma_t, mass):
    '''Test the mass of the Gaussian state over the box and all momenta.'''
    assert state_mass(GaussianState(), 1.0, 1.0, gamma_t) == pytest.approx(mass, rel=1e-12)


def test_delocalised(caplog):
    '''Test that the reduced density vanishes when the state is delocalised.'''
    state = GaussianState()
    assert math.isinf(state_mass(state, 1.0, 1.0, math.pi / 2))
    with caplog.at_level(logging.WARNING):
        assert ridge(state, 1, 1.0, 1.0, math.pi / 2) is None
    assert "delocalised" in caplog.text
    density = reduced_density(state, 1, 1.0, 1.0, math.pi / 2)
    assert np.all(density(np.zeros(3), np.ones(3)) == 0.0)


@pytest.mark.parametrize("axis", [1, 2])
@pytest.mark.parametrize("gamma_t", [0.0, math.pi / 8, math.pi / 3, 3 * math.pi / 4])
def test_reduced_normalization(axis, gamma_t):
    '''Test that reduced Wigner functions integrate to one.'''
    state = GaussianState(pix=0.5, piy=-0.5)
    grid = default_grid(state, axis, num_q=61, num_pi=401, window=20.0)
    reduced = reduce_wigner(state, axis, 1.0, 1.0, gamma_t, grid)
    assert reduced.values.shape == (61, 401)
    assert reduced.total() == pytest.approx(1.0, abs=1e-4)


def test_reduced_revival():
    '''Test that the reduced Wigner function recovers its initial pattern after pi/gamma.'''
    state = GaussianState(pix=0.5, piy=-0.5)
    grid = default_grid(state, 1, num_q=21, num_pi=41)
    first = reduce_wigner(state, 1, 1.0, 1.0, 0.0, grid)
    revived = reduce_wigner(state, 1, 1.0, 1.0, math.pi, grid)
    assert np.max(np.abs(first.values - revived.values)) < 1e-8


def test_reduced_ridge():
    '''Test the reduced density against direct quadrature of the Gaussian.'''
    state = GaussianState(pix=0.3, piy=0.1)
    gamma, m, t = 1.0, 1.0, 0.6
    quad = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-10)
    density = reduced_density(state, 1, gamma, m, t, quad)
    mass = state_mass(state, gamma, m, t)
    for q1, pi1 in [(0.0, 0.0), (1.0, -0.5), (-2.0, 1.5)]:
        direct, _ = integrate_2d(
            lambda q2, pi2: gaussian_density(state, PhaseState(q1, q2, pi1, pi2), gamma, m, t),
            state.box(2), (-math.inf, math.inf), quad,
        )
        assert density(q1, pi1) == pytest.approx(direct / mass, rel=1e-7, abs=1e-12)


def test_reduce_wigner_rows():
    state = GaussianState()
    reduced = reduce_wigner(state, 2, 1.0, 1.0, 0.0, ([0.0, 1.0], [-1.0, 0.0, 1.0]))
    rows = list(reduced.rows())
    assert len(rows) == 6
    assert rows[1][:2] == (0.0, 0.0)
    with pytest.raises(ValidationError):
        reduce_wigner(state, 3, 1.0, 1.0, 0.0)
