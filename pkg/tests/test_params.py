import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adswave.params import (ModelParams, ParamError, amplitude, amplitude_inv,
                            derive, gamma_factor, hypothesis_condition,
                            lifespan_exponent, rho_crit_branches)


def test_equal_roots_when_balanced():
    dp = derive(ModelParams(c=1, H=1, b=2, m2=1))
    assert dp.alpha1 == dp.alpha2 == 1.0
    assert dp.nu == 0.0


def test_rho_crit_low_branch_example():
    mp = ModelParams(c=1, H=1, b=0, m2=0, p=2, beta=0, n=1)
    dp = derive(mp)
    assert dp.N_threshold == 1.0
    assert dp.rho_crit == pytest.approx(1.0, rel=1e-14)


def test_rho_crit_branches_agree_at_threshold():
    mp = ModelParams(c=1, H=1, b=2, m2=0, p=2, beta=0, n=3)
    dp = derive(mp)
    assert dp.N_threshold == pytest.approx(3.0)
    low, high = rho_crit_branches(mp)
    assert low == pytest.approx(3.0, rel=1e-14)
    assert high == pytest.approx(3.0, rel=1e-14)


@given(b=st.floats(0.0, 4.0), frac=st.floats(0.0, 1.0),
       H=st.floats(0.25, 3.0), p=st.floats(1.1, 4.0),
       beta=st.floats(0.0, 2.0))
@settings(max_examples=200, deadline=None)
def test_branch_continuity_at_threshold(b, frac, H, p, beta):
    """Setting n = N makes both branches agree (checked off-integer n)."""
    m2 = frac * b * b / 4.0
    disc = math.sqrt(max(b * b - 4 * m2, 0.0))
    N = 2.0 / p + disc / H
    q = (beta + 1) * p
    low = 0.5 * (b - disc) * (q - 1) + N * H * (beta + 1) * (p - 1)
    high = 0.5 * (b + N * H) * (q - 1) + N * H - (N - 1) * H * (beta + 1) - H / p
    assert low == pytest.approx(high, rel=1e-10, abs=1e-10)


def test_validation_lists_all_violations():
    with pytest.raises(ParamError) as exc:
        ModelParams(c=-1, H=1, b=1, m2=1, p=0.5)
    msg = str(exc.value)
    assert "c > 0" in msg and "b^2 >= 4*m2" in msg and "p > 1" in msg


def test_amplitude_examples():
    mp = ModelParams(c=1, H=1)
    assert amplitude(0.0, mp) == 0.0
    assert amplitude(math.log(2.0), mp) == pytest.approx(1.0, rel=1e-14)
    mp2 = ModelParams(c=2, H=0.5)
    assert amplitude_inv(2.0, mp2) == pytest.approx(2.0 * math.log(1.5), rel=1e-14)
    assert amplitude_inv(0.0, mp2) == 0.0
    with pytest.raises(ParamError):
        amplitude_inv(-0.1, mp2)


@given(sigma=st.floats(0.0, 1e6), c=st.floats(0.1, 10.0), H=st.floats(0.1, 5.0))
@settings(max_examples=300, deadline=None)
def test_amplitude_round_trip(sigma, c, H):
    mp = ModelParams(c=c, H=H)
    assert amplitude(amplitude_inv(sigma, mp), mp) == pytest.approx(
        sigma, rel=1e-12, abs=1e-12)


def test_amplitude_strictly_monotone():
    mp = ModelParams(c=0.7, H=1.3)
    vals = [amplitude(0.01 * k, mp) for k in range(200)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_gamma_factor_examples():
    assert gamma_factor(3.7, ModelParams(mu=1, varrho=0, varsigma=0)) == 1.0
    assert gamma_factor(0.0, ModelParams(mu=2, varrho=1, varsigma=-0.5)) == 2.0
    assert gamma_factor(1.0, ModelParams(mu=1, varrho=1, varsigma=1)) == \
        pytest.approx(2.0 * math.e, rel=1e-14)


def test_lifespan_exponent_branches():
    assert lifespan_exponent(ModelParams(p=2, beta=0, varsigma=0)) == -2.0
    assert lifespan_exponent(ModelParams(p=2, beta=0, varsigma=1)) == -1.0
    assert lifespan_exponent(ModelParams(p=2, beta=1, varsigma=-0.25)) == \
        pytest.approx(-12.0, rel=1e-14)
    # varsigma in (0, 1/p) keeps the varsigma = 0 rate
    assert lifespan_exponent(ModelParams(p=2, beta=0, varsigma=0.3)) == -2.0
    # varsigma >= 1/p switches to the polynomial route
    assert lifespan_exponent(ModelParams(p=2, beta=0, varsigma=0.6)) == \
        pytest.approx(-1.0 / 0.6, rel=1e-14)
    with pytest.raises(ParamError):
        lifespan_exponent(ModelParams(p=2, beta=0, varsigma=-0.5))


def test_lifespan_exponent_continuous_across_branches():
    p, beta = 2.0, 0.5
    at_zero = lifespan_exponent(ModelParams(p=p, beta=beta, varsigma=0.0))
    above = lifespan_exponent(ModelParams(p=p, beta=beta, varsigma=1e-12))
    assert above == pytest.approx(at_zero, rel=1e-9)
    at_inv_p = lifespan_exponent(ModelParams(p=p, beta=beta, varsigma=1.0 / p))
    below = lifespan_exponent(ModelParams(p=p, beta=beta,
                                          varsigma=1.0 / p - 1e-12))
    assert below == pytest.approx(at_inv_p, rel=1e-9)


@given(b=st.floats(0.0, 4.0), frac=st.floats(0.0, 1.0), H=st.floats(0.2, 3.0))
@settings(max_examples=200, deadline=None)
def test_root_ordering(b, frac, H):
    mp = ModelParams(c=1, H=H, b=b, m2=frac * b * b / 4.0)
    dp = derive(mp)
    assert dp.alpha1 >= dp.alpha2 >= 0.0
    assert dp.alpha1 + dp.alpha2 == pytest.approx(b, rel=1e-12, abs=1e-12)
    assert dp.alpha1 * dp.alpha2 == pytest.approx(mp.m2, rel=1e-12, abs=1e-12)
    assert (dp.alpha1 == dp.alpha2) == (dp.nu == 0.0)


def test_hypothesis_condition():
    mp = ModelParams(c=1, H=1, b=0, m2=0, p=2, n=1)
    assert not hypothesis_condition(mp, derive(mp))     # 1/2 > 1/2 is false
    mp3 = ModelParams(c=1, H=1, b=0, m2=0, p=2, n=3)
    assert hypothesis_condition(mp3, derive(mp3))
