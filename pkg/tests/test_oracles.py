import pytest
from tests.conftest import *

import math

import numpy as np

from ncphase.errors import ValidationError
from ncphase.dynamics import initial_conditions
from ncphase.oracles import SUITES, Check, brute_inner_sum, brute_rotor_partition, rk4_trajectory, run_selftest


def test_rk4_shape():
    ic = initial_conditions(0.5, 0.5, 0.5, 0.5)
    trajectory = rk4_trajectory(ic, 1.0, 1.0, 1.0, 10)
    assert trajectory.shape == (11, 4)
    assert trajectory[0].tolist() == [0.5, 0.5, 0.5, 0.5]
    with pytest.raises(ValidationError):
        rk4_trajectory(ic, 1.0, 1.0, 1.0, 0)


def test_rk4_free_motion():
    '''Test the integrator on straight lines, where it is exact.'''
    trajectory = rk4_trajectory(initial_conditions(0.0, 0.0, 1.0, -2.0), 0.0, 2.0, 4.0, 8)
    assert np.allclose(trajectory[-1], [2.0, -4.0, 1.0, -2.0], rtol=0, atol=1e-14)


def test_brute_sums():
    assert brute_inner_sum(0, 3.0) == 1.0
    assert brute_inner_sum(2, 0.0) == 5.0
    assert brute_rotor_partition("rotor2d-std", 1.0, 1.0, 0) == 1.0
    assert brute_rotor_partition("rotor3d-std", 1.0, 2.0, 1) == pytest.approx(1.0 + 3.0 * math.exp(-1.0))


def test_check():
    assert Check("s", "c", 1e-13, 1e-12).passed
    assert not Check("s", "c", 1e-11, 1e-12).passed
    assert not Check("s", "c", 0.0, 1.0, "boom").passed


@pytest.mark.parametrize("suite", list(SUITES))
def test_selftest_suite(suite):
    '''Test that each self-test suite passes.'''
    checks = run_selftest([suite])
    assert checks
    for check in checks:
        assert check.suite == suite
        assert check.passed, f"{check.name}: {check.error} >= {check.tolerance} {check.message}"


def test_selftest_invalid():
    with pytest.raises(ValidationError):
        run_selftest(["nc_core", "bogus"])
