import math

import numpy as np
import pytest

from adswave.kernels import (ConeError, KernelPoint, dE_ds_grid, kernel_E,
                             kernel_E_grid, kernel_K0, kernel_K0_grid,
                             kernel_K1, kernel_K1_grid, zeta_arg)
from adswave.params import ModelParams, amplitude, derive
from conftest import params_for_nu, random_cone_points


def test_zeta_vanishes_at_equal_times_and_edge(generic_params):
    mp, dp = generic_params
    assert zeta_arg(KernelPoint(1.0, 0.2, 1.0, 0.2, mp, dp)) == 0.0
    edge = amplitude(1.0, mp) - amplitude(0.3, mp)
    pt = KernelPoint(1.0, 0.2, 0.3, 0.2 + edge, mp, dp)
    assert zeta_arg(pt) == pytest.approx(0.0, abs=1e-12)


def test_zeta_value_at_apex_offset():
    mp = ModelParams(c=1, H=1, b=0, m2=0)
    dp = derive(mp)
    pt = KernelPoint(1.0, 0.5, 0.0, 0.5, mp, dp)
    expected = ((math.e - 1.0) / (math.e + 1.0)) ** 2
    assert zeta_arg(pt) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(0.213552, abs=1e-6)


def test_zeta_bound_on_random_points(generic_params):
    mp, dp = generic_params
    rng = np.random.default_rng(7)
    ts, ss, us = random_cone_points(rng, mp, 500)
    for t, s, u in zip(ts, ss, us):
        pt = KernelPoint(float(t), 0.0, float(s), float(u), mp, dp)
        bound = ((math.exp(mp.H * t) - math.exp(mp.H * s))
                 / (math.exp(mp.H * t) + math.exp(mp.H * s))) ** 2
        assert 0.0 <= pt.zeta <= bound + 1e-15


def test_cone_violations_rejected(generic_params):
    mp, dp = generic_params
    with pytest.raises(ConeError):
        KernelPoint(1.0, 0.0, 0.0, 10.0, mp, dp)
    with pytest.raises(ConeError):
        KernelPoint(1.0, 0.0, 2.0, 0.0, mp, dp)
    with pytest.raises(ConeError):
        kernel_K0(1.0, 0.0, 5.0, mp, dp)


def test_edge_clamp_tolerance(generic_params):
    mp, dp = generic_params
    reach = amplitude(1.0, mp)
    pt = KernelPoint(1.0, 0.0, 0.0, reach * (1.0 + 1e-14), mp, dp)
    assert pt.u == pytest.approx(reach)


def test_E_apex_value():
    mp = ModelParams(c=1, H=1, b=0, m2=0)
    dp = derive(mp)
    assert kernel_E(KernelPoint(0.0, 0.0, 0.0, 0.0, mp, dp)) == \
        pytest.approx(0.5, rel=1e-14)


def test_E_collapses_at_nu_half():
    mp = ModelParams(c=1.3, H=1.0, b=1.0, m2=0.0)
    dp = derive(mp)
    assert dp.nu == pytest.approx(0.5)
    closed = lambda t, s: (1.0 / (2.0 * mp.c)
                           * math.exp(-0.5 * (mp.b + mp.H) * t)
                           * math.exp(0.5 * (mp.b - mp.H) * s))
    for t, s, u in ((1.2, 0.4, 0.0), (1.2, 0.4, 1.5), (2.0, 0.0, 3.0)):
        assert kernel_E_grid(t, s, np.array([u]), mp, dp)[0] == \
            pytest.approx(closed(t, s), rel=1e-12)


def test_K1_is_E_at_source_time_zero(generic_params):
    mp, dp = generic_params
    u = np.linspace(0.0, amplitude(1.4, mp), 50)
    assert np.array_equal(kernel_K1_grid(1.4, u, mp, dp),
                          kernel_E_grid(1.4, 0.0, u, mp, dp))
    pt = KernelPoint(1.4, 0.3, 0.0, 0.3, mp, dp)
    assert kernel_K1(pt) == kernel_E(pt)


def test_K0_closed_form_at_nu_half():
    mp = ModelParams(c=1.3, H=1.0, b=1.0, m2=0.0)
    dp = derive(mp)
    for t in (0.5, 1.0, 2.0):
        expected = (mp.b + mp.H) / (4.0 * mp.c) * math.exp(-0.5 * (mp.b + mp.H) * t)
        assert kernel_K0(t, 0.3, 0.8, mp, dp) == pytest.approx(expected, rel=1e-12)


def test_dE_ds_matches_finite_difference():
    rng = np.random.default_rng(11)
    for nu in (0.0, 0.3, 0.7, 1.5):
        mp = params_for_nu(nu)
        dp = derive(mp)
        ts, ss, us = random_cone_points(rng, mp, 250, t_max=2.5)
        # keep the difference stencil inside 0 <= s <= t
        ss = np.clip(ss, 0.01 * ts, 0.99 * ts)
        for t, s, u in zip(ts, ss, us):
            u = min(u, (mp.c / mp.H) * (math.exp(mp.H * t)
                                        - math.exp(mp.H * (s + 1e-6 * t))))
            if u < 0:
                continue
            h = 1e-6 * t
            fd = (kernel_E_grid(t, s + h, np.array([u]), mp, dp)[0]
                  - kernel_E_grid(t, s - h, np.array([u]), mp, dp)[0]) / (2 * h)
            an = dE_ds_grid(t, s, np.array([u]), mp, dp)[0]
            assert an == pytest.approx(fd, rel=2e-6, abs=1e-12)


def test_kernels_nonnegative_sampled():
    rng = np.random.default_rng(3)
    for nu in (0.0, 0.25, 0.5, 0.7, 1.5):
        mp = params_for_nu(nu)
        dp = derive(mp)
        ts, ss, us = random_cone_points(rng, mp, 2000)
        e_vals = np.concatenate([
            kernel_E_grid(float(t), float(s), np.array([u]), mp, dp)
            for t, s, u in zip(ts[:300], ss[:300], us[:300])])
        assert np.all(e_vals >= -1e-12)
        t0 = rng.uniform(0.05, 3.0, 300)
        u0 = rng.uniform(0.0, 1.0, 300) * (mp.c / mp.H) * np.expm1(mp.H * t0)
        for t, u in zip(t0, u0):
            assert kernel_K0_grid(float(t), np.array([u]), mp, dp)[0] >= -1e-12
            assert kernel_K1_grid(float(t), np.array([u]), mp, dp)[0] >= -1e-12


def test_E_even_in_offset(generic_params):
    mp, dp = generic_params
    u = np.linspace(0.0, 2.0, 20)
    left = kernel_E_grid(1.2, 0.4, u, mp, dp)
    right = kernel_E_grid(1.2, 0.4, -u, mp, dp)
    assert np.array_equal(left, right)
    a = kernel_E(KernelPoint(1.2, 0.7, 0.4, 0.2, mp, dp))
    b = kernel_E(KernelPoint(1.2, 0.2, 0.4, 0.7, mp, dp))
    assert a == b


def test_transformation_identity_through_kernel():
    """(1-z)^(2 nu) F(1/2+nu, 1/2+nu; 1; z) = F(1/2-nu, 1/2-nu; 1; z)."""
    from adswave.hypfun import HypParams, hyp2f1
    for nu in (0.25, 0.7, 1.2):
        for z in (0.1, 0.45, 0.8):
            lhs = (1 - z) ** (2 * nu) * hyp2f1(HypParams(0.5 + nu, 1, z))
            rhs = hyp2f1(HypParams(0.5 - nu, 1, z))
            assert lhs == pytest.approx(rhs, rel=1e-9)
