import math

import numpy as np
import pytest

from adswave.quadrature import QuadratureError, adaptive, fixed_panels, \
    panel_nodes


def test_panel_exact_for_polynomials():
    # 16-point Gauss integrates degree <= 31 exactly
    xs, ws = panel_nodes(-1.0, 3.0)
    val = float(np.dot(ws, xs ** 21))
    exact = (3.0 ** 22 - 1.0) / 22.0
    assert val == pytest.approx(exact, rel=1e-14)


def test_fixed_panels_smooth():
    val = fixed_panels(np.sin, 0.0, math.pi, 8)
    assert val == pytest.approx(2.0, rel=1e-14)
    assert fixed_panels(np.cos, 1.0, 1.0, 4) == 0.0


def test_adaptive_smooth_and_zero():
    val, err = adaptive(np.exp, 0.0, 2.0, rtol=1e-12)
    assert val == pytest.approx(math.expm1(2.0), rel=1e-12)
    val0, err0 = adaptive(lambda x: np.zeros_like(x), 0.0, 1.0)
    assert val0 == 0.0 and err0 == 0.0


def test_adaptive_peaked_integrand():
    w = 1e-3
    val, err = adaptive(lambda x: np.exp(-(x / w) ** 2), -1.0, 1.0,
                        rtol=1e-10, max_depth=30)
    assert val == pytest.approx(w * math.sqrt(math.pi), rel=1e-9)


def test_adaptive_reports_nonconvergence():
    # a discontinuity keeps the dyadic refinement from certifying rtol
    def step(x):
        return (np.asarray(x) > 1 / 3).astype(float)
    with pytest.raises(QuadratureError) as exc:
        adaptive(step, 0.0, 1.0, rtol=1e-14, max_depth=4)
    assert exc.value.achieved > exc.value.requested
