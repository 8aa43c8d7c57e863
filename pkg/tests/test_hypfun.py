import math

import numpy as np
import pytest

from adswave.hypfun import (HypergeometricError, HypParams, gauss_value_at_one,
                            hyp2f1, hyp2f1_array, hyp2f1_deriv, log_gamma,
                            transform_check)
from conftest import agm_two_over_pi_K, centered_diff


def test_value_at_zero_is_one():
    for a in (-1.5, 0.0, 0.3, 0.5, 2.0):
        assert hyp2f1(HypParams(a, 1, 0.0)) == 1.0


def test_terminating_at_a_zero():
    for zeta in (0.0, 0.3, 0.9):
        assert hyp2f1(HypParams(0.0, 1, zeta)) == 1.0


def test_elliptic_oracle():
    for k2 in np.arange(0.1, 0.95, 0.1):
        val = hyp2f1(HypParams(0.5, 1, float(k2)))
        assert abs(val - agm_two_over_pi_K(float(k2))) <= 1e-10


def test_terminating_polynomials_exact():
    # a = -1: 1 + z; a = -2: 1 + 4 z + z^2 (squared Pochhammers over k!^2)
    for z in (0.0, 0.25, 0.7):
        assert hyp2f1(HypParams(-1.0, 1, z)) == pytest.approx(1 + z, rel=1e-15)
        assert hyp2f1(HypParams(-2.0, 1, z)) == pytest.approx(
            1 + 4 * z + z * z, rel=1e-15)


def test_monotone_in_zeta_for_positive_a():
    zs = np.linspace(0.0, 0.95, 40)
    vals = hyp2f1_array(0.4, 1, zs)
    assert np.all(np.diff(vals) >= 0.0)


def test_deriv_examples():
    assert hyp2f1_deriv(HypParams(0.0, 1, 0.77)) == 0.0
    assert hyp2f1_deriv(HypParams(0.5, 1, 0.0)) == pytest.approx(0.25, rel=1e-14)
    fd = centered_diff(lambda z: hyp2f1(HypParams(0.5, 1, z)), 0.3, 1e-5)
    assert hyp2f1_deriv(HypParams(0.5, 1, 0.3)) == pytest.approx(fd, rel=1e-6)


def test_deriv_matches_fd_on_grid():
    for a in np.linspace(-0.9, 1.4, 10):
        for z in np.linspace(0.05, 0.85, 5):
            fd = centered_diff(lambda y: hyp2f1(HypParams(float(a), 1, y)),
                               float(z), 1e-6)
            an = hyp2f1_deriv(HypParams(float(a), 1, float(z)))
            assert an == pytest.approx(fd, rel=1e-6, abs=1e-9)


def test_gauss_boundary_value():
    assert gauss_value_at_one(0.5) == pytest.approx(1.0, rel=1e-14)
    assert gauss_value_at_one(1.0) == pytest.approx(4.0 / math.pi, rel=1e-13)
    with pytest.raises(ValueError):
        gauss_value_at_one(0.0)


def test_series_approaches_boundary_limit():
    nu = 0.25
    val = hyp2f1(HypParams(0.5 - nu, 1, 0.999))
    assert val == pytest.approx(gauss_value_at_one(nu), rel=0.02)


def test_transform_identity():
    for a in (-0.4, 0.1, 0.45):
        for z in (0.1, 0.5, 0.9):
            lhs, rhs = transform_check(a, z)
            assert lhs == pytest.approx(rhs, rel=1e-9)


def test_log_gamma_matches_factorials():
    for n in range(1, 15):
        assert log_gamma(float(n + 1)) == pytest.approx(
            math.log(math.factorial(n)), rel=1e-13)
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-13)


def test_domain_errors():
    with pytest.raises(ValueError):
        HypParams(0.5, 3, 0.1)
    with pytest.raises(ValueError):
        HypParams(0.5, 1, 1.0)
    with pytest.raises(ValueError):
        hyp2f1_array(0.5, 1, np.array([0.2, 1.01]))


def test_nonconvergence_reported_not_silent():
    # so close to the boundary that the term cap cannot reach tolerance
    with pytest.raises(HypergeometricError) as exc:
        hyp2f1(HypParams(0.5, 1, 1.0 - 1e-12))
    assert exc.value.terms == 100_000
    assert exc.value.achieved > 0.0
