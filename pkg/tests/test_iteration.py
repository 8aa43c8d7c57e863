import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adswave.iteration import (IterationConfig, K_j_factor,
                               K_j_factor_via_threshold, L_and_T0, gamma_j,
                               gamma_tilde_j, log_B, lower_bound_step_minus1,
                               onset_sigma, seq_ab, seq_ab_closed)
from adswave.params import ModelParams, derive


def make_cfg(**kw):
    model = {k: kw.pop(k) for k in list(kw) if k in
             ("c", "H", "b", "m2", "p", "beta", "mu", "varsigma", "n", "R")}
    mp = ModelParams(**{"c": 1, "H": 1, "b": 0, "m2": 0, "p": 2, "beta": 0,
                        "n": 3, "R": 1, **model})
    return IterationConfig(mp=mp, dp=derive(mp), **kw)


def recursion_ab(j, a0, b0, delta):
    r = 4 / (1 - delta)
    shift = (3 + delta) / (1 - delta)
    a, b = a0, b0
    for _ in range(j):
        a, b = r * a - shift, r * b + 2 * shift
    return a, b


def test_config_validation():
    with pytest.raises(ValueError):
        make_cfg(delta=0.5)
    with pytest.raises(ValueError):
        make_cfg(delta=1.0)
    with pytest.raises(ValueError):
        make_cfg(a0=1.5)                  # below max(2, 1/(2d-1), 1/d)
    with pytest.raises(ValueError):
        make_cfg(b0=0.0)
    cfg = make_cfg(delta=0.6)
    assert cfg.a0 == pytest.approx(max(2.0, 1.0 / 0.2, 1.0 / 0.6))


def test_seq_examples():
    cfg = make_cfg()
    assert seq_ab(0, cfg) == (cfg.a0, cfg.b0)
    a1, b1 = seq_ab_closed(1, 2.0, 1.0, 0.5)
    assert (a1, b1) == (9.0, 22.0)
    assert recursion_ab(1, 2.0, 1.0, 0.5) == (9.0, 22.0)


@given(j=st.integers(0, 12),
       a0_extra=st.fractions(0, 3), b0=st.fractions(Fraction(1, 10), 3),
       delta=st.fractions(Fraction(11, 20), Fraction(19, 20)))
@settings(max_examples=150, deadline=None)
def test_closed_form_equals_recursion_exactly(j, a0_extra, b0, delta):
    a0 = max(Fraction(2), 1 / (2 * delta - 1), 1 / delta) + a0_extra
    closed = seq_ab_closed(j, a0, b0, delta)
    assert closed == recursion_ab(j, a0, b0, delta)


def test_growth_relations():
    """a_{j+1} >= 8 a_j + 1 and b_{j+1} >= 4 (2 b_j + 1)."""
    for delta in (0.55, 0.75, 0.9):
        for b0 in (0.2, 1.0, 5.0):
            cfg = make_cfg(delta=delta, b0=b0)
            for j in range(20):
                aj, bj = seq_ab(j, cfg)
                aj1, bj1 = seq_ab(j + 1, cfg)
                assert aj1 >= 8 * aj + 1 - 1e-9 * aj1
                assert bj1 >= 4 * (2 * bj + 1) - 1e-9 * bj1


def test_log_B_examples_and_recursion():
    cfg = make_cfg(B0=1.0, D=1.0)
    assert log_B(0, cfg) == pytest.approx(0.0, abs=1e-14)
    assert log_B(1, cfg) == pytest.approx(-math.log(2.0), rel=1e-14)

    cfg3 = make_cfg(p=3, n=2, B0=2.0, D=5.0)
    q = cfg3.dp.q
    ln = math.log(2.0)
    for j in range(1, 41):
        ln = q * ln - j * math.log(q) + math.log(5.0)
        assert log_B(j, cfg3) == pytest.approx(ln, rel=1e-10)


def test_lower_bound_seed():
    cfg = make_cfg(b=1.0, m2=0.25, p=2, n=3, Btilde=2.0)
    assert lower_bound_step_minus1(0.0, 0.3, cfg) == pytest.approx(
        2.0 * 0.3 ** 2, rel=1e-14)
    assert lower_bound_step_minus1(1.0, 0.3, cfg) == pytest.approx(
        2.0 * 0.09 * math.exp(-2.0), rel=1e-14)
    cfg1 = make_cfg(b=1.0, m2=0.25, p=2, n=1)
    assert lower_bound_step_minus1(1.0, 0.5, cfg1) == pytest.approx(
        0.25 * math.exp(-0.5 * 2.0 * 2.0), rel=1e-14)


def test_onset_sigma_floor_and_monotone():
    # floor case: both geometric terms tiny
    small = make_cfg(R=1e-6, c=1e-6, H=1.0)
    assert onset_sigma(0, small) >= 1.0
    cfg = make_cfg()
    sig = [onset_sigma(j, cfg) for j in range(21)]
    assert all(s1 <= s2 + 1e-12 for s1, s2 in zip(sig, sig[1:]))


def test_onset_sigma_spreadsheet_cross_check():
    """Independent reassembly of the four terms for one configuration."""
    cfg = make_cfg(delta=0.6, b0=1.0)
    j = 0
    a0, b0 = cfg.a0, cfg.b0
    t1 = math.log(1.0 + 8 * a0 + 4 * (2 * b0 + 1))
    t2 = math.log(1.0 + 16 * ((a0 - 1) / 0.4 + (b0 + 2) / 0.4) ** 2)
    t3 = 2 * math.log(2.0)
    expected = max(t1, t2, t3, 1.0)
    assert onset_sigma(j, cfg) == pytest.approx(expected, rel=1e-12)


def test_threshold_crossing():
    cfg = make_cfg(mu=2.0, B0=0.7, D=1.3)
    for eps in (0.3, 0.05, 0.004):
        L, T0 = L_and_T0(1.0, eps, cfg)
        L_at, _ = L_and_T0(T0, eps, cfg)
        assert L_at == pytest.approx(1.0, abs=1e-10)


def test_threshold_power_law():
    cfg = make_cfg()
    p, q, ss = cfg.mp.p, cfg.dp.q, cfg.mp.varsigma
    _, T0a = L_and_T0(1.0, 0.02, cfg)
    _, T0b = L_and_T0(1.0, 0.01, cfg)
    assert T0b / T0a == pytest.approx(2.0 ** (p * (q - 1) / (1 + ss * p)),
                                      rel=1e-12)


def test_threshold_exponent_matches_lifespan_branch():
    from adswave.params import lifespan_exponent
    cfg = make_cfg(p=2, beta=0, varsigma=0.0)
    assert lifespan_exponent(cfg.mp) == -2.0
    _, T0a = L_and_T0(1.0, 0.02, cfg)
    _, T0b = L_and_T0(1.0, 0.01, cfg)
    assert math.log(T0b / T0a) / math.log(2.0) == pytest.approx(2.0, rel=1e-12)


def test_double_critical_rejected():
    cfg = make_cfg(varsigma=-0.5, p=2)
    with pytest.raises(ValueError):
        L_and_T0(1.0, 0.1, cfg)


def test_gamma_factors_increase_to_limits():
    cfg = make_cfg()
    mp, dp = cfg.mp, cfg.dp
    gj = [gamma_j(j, cfg) for j in range(21)]
    gt = [gamma_tilde_j(j, cfg) for j in range(21)]
    assert all(0 < g < 1 for g in gj + gt)
    assert all(a <= b + 1e-15 for a, b in zip(gj, gj[1:]))
    assert all(a <= b + 1e-15 for a, b in zip(gt, gt[1:]))
    lim_plus = 1.0 - 2.0 ** -(0.5 * mp.n + dp.nu - 1.0 / mp.p)
    lim_minus = 1.0 - 2.0 ** -(0.5 * mp.n - dp.nu - 1.0 / mp.p)
    assert gj[20] == pytest.approx(lim_plus, rel=0.01)
    assert gt[20] == pytest.approx(lim_minus, rel=0.01)


def test_K_j_two_routes_agree():
    cfg = make_cfg(mu=3.0, B0=0.5, D=2.0)
    for j in (0, 1, 5, 12, 25):
        for (t, eps) in ((2.0, 0.1), (9.0, 0.004)):
            direct = K_j_factor(j, t, eps, cfg)
            via = K_j_factor_via_threshold(j, t, eps, cfg)
            assert direct == pytest.approx(via, rel=1e-12)


def test_K_j_finite_and_divergent():
    cfg = make_cfg()
    logs = [K_j_factor(j, 1.0, 0.01, cfg) for j in range(31)]
    assert all(math.isfinite(v) for v in logs)
    # with L(t, eps) >= 1 the growth is at least geometric with ratio q
    q = cfg.dp.q
    _, T0 = L_and_T0(1.0, 0.05, cfg)
    t = 1.01 * max(T0, onset_sigma(15, cfg))
    L, _ = L_and_T0(t, 0.05, cfg)
    assert L >= 1.0
    vals = [K_j_factor(j, t, 0.05, cfg) for j in range(16)]
    gaps = [b - a for a, b in zip(vals, vals[1:])]
    assert all(g2 >= g1 for g1, g2 in zip(gaps, gaps[1:]))
    assert vals[15] >= 0.9 * q ** 16 * L
