"""Shared fixtures and independent oracles for the test suite.

Oracles here never call the code paths they check: the elliptic value
comes from the arithmetic-geometric mean, derivatives from centered
differences, ODE references from scipy's integrator.
"""

import math

import numpy as np
import pytest

from adswave.params import ModelParams, derive


def agm_two_over_pi_K(k2: float) -> float:
    """(2/pi) K(k) with k^2 = k2, via the arithmetic-geometric mean."""
    a, b = 1.0, math.sqrt(1.0 - k2)
    for _ in range(80):
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        if abs(a - b) <= 1e-17 * a:
            break
    return 1.0 / a


def centered_diff(f, x: float, h: float) -> float:
    return (f(x + h) - f(x - h)) / (2.0 * h)


@pytest.fixture
def balanced_params():
    """b^2 = 4 m2 exactly, so nu = 0."""
    mp = ModelParams(c=1.0, H=1.0, b=1.0, m2=0.25, p=2.0, beta=0.0, n=1, R=1.0)
    return mp, derive(mp)


@pytest.fixture
def generic_params():
    """nu = 0.7 with damping dominating the mass."""
    mp = ModelParams(c=1.0, H=1.0, b=2.0, m2=0.51, p=2.0, beta=0.0, n=1, R=1.0)
    return mp, derive(mp)


def random_cone_points(rng, mp, n_pts: int, t_max: float = 3.0):
    """Random (t, s, u) with 0 <= s <= t and |u| inside the cone reach."""
    t = rng.uniform(0.05, t_max, n_pts)
    s = rng.uniform(0.0, 1.0, n_pts) * t
    reach = mp.c / mp.H * (np.exp(mp.H * t) - np.exp(mp.H * s))
    u = rng.uniform(0.0, 1.0, n_pts) * reach
    return t, s, u


def params_for_nu(nu: float, H: float = 1.0, c: float = 1.0) -> ModelParams:
    """Damping/mass pair realizing a requested kernel parameter nu."""
    b = 2.0 * nu * H + 0.5
    m2 = (b * b - (2.0 * nu * H) ** 2) / 4.0
    return ModelParams(c=c, H=H, b=b, m2=m2, p=2.0, beta=0.0, n=1, R=1.0)
