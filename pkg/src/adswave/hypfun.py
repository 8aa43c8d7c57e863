"""Real Gauss hypergeometric evaluation F(a, a; c; zeta) on [0, 1).

Only the parameter families needed by the wave kernels are supported:
both upper parameters equal to some real a and lower parameter c in
{1, 2}.  The evaluator is a direct power series

    F(a, a; c; zeta) = sum_k  (a)_k^2 / ((c)_k k!) * zeta^k

with term recurrence and Kahan-compensated accumulation.  On the closed
light cone zeta stays strictly below 1, so the series always converges;
accuracy <= 1e-10 relative is guaranteed for zeta <= 0.99.  When a is a
nonpositive integer the series terminates and is evaluated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SERIES_RTOL = 1e-12
SERIES_MAX_TERMS = 100_000


class HypergeometricError(ArithmeticError):
    """Series did not meet tolerance within the term cap."""

    def __init__(self, achieved: float, terms: int):
        self.achieved = achieved
        self.terms = terms
        super().__init__(
            f"hypergeometric series not converged after {terms} terms "
            f"(worst relative term {achieved:.3e})")


@dataclass(frozen=True)
class HypParams:
    """Arguments of one evaluation: F(a, a; c; zeta) with c in {1, 2}."""

    a: float
    c: int
    zeta: float

    def __post_init__(self):
        if self.c not in (1, 2):
            raise ValueError(f"c must be 1 or 2, got {self.c}")
        if not 0.0 <= self.zeta < 1.0:
            raise ValueError(f"zeta must lie in [0, 1), got {self.zeta}")


def hyp2f1_array(a: float, c: int, zeta: np.ndarray) -> np.ndarray:
    """Vectorized F(a, a; c; zeta) over an array of arguments in [0, 1)."""
    zeta = np.asarray(zeta, dtype=float)
    if zeta.size and (zeta.min() < 0.0 or zeta.max() >= 1.0):
        raise ValueError("zeta out of [0, 1)")
    total = np.ones_like(zeta)
    comp = np.zeros_like(zeta)          # Kahan compensation
    term = np.ones_like(zeta)
    # terminating case: (a)_k vanishes once k > -a
    k_stop = SERIES_MAX_TERMS
    if a <= 0 and a == int(a):
        k_stop = int(-a) + 1
    for k in range(k_stop):
        term = term * ((a + k) * (a + k) / ((c + k) * (k + 1.0))) * zeta
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if np.all(np.abs(term) <= SERIES_RTOL * np.abs(total)):
            return total
    if k_stop < SERIES_MAX_TERMS:
        return total                    # polynomial: exact after k_stop terms
    worst = float(np.max(np.abs(term) / np.maximum(np.abs(total), 1e-300)))
    raise HypergeometricError(achieved=worst, terms=SERIES_MAX_TERMS)


def hyp2f1(hp: HypParams) -> float:
    """F(a, a; c; zeta) for a single argument."""
    return float(hyp2f1_array(hp.a, hp.c, np.asarray([hp.zeta]))[0])


def hyp2f1_deriv(hp: HypParams) -> float:
    """d/dzeta F(a, a; 1; zeta) = a^2 * F(a+1, a+1; 2; zeta)."""
    if hp.c != 1:
        raise ValueError("derivative is provided for c = 1 only")
    if hp.a == 0.0:
        return 0.0
    return hp.a * hp.a * float(
        hyp2f1_array(hp.a + 1.0, 2, np.asarray([hp.zeta]))[0])


def transform_check(a: float, zeta: float) -> tuple[float, float]:
    """Both sides of the Euler identity for c = 1,

        (1 - zeta)^(1 - 2a) F(1-a, 1-a; 1; zeta) = F(a, a; 1; zeta),

    used as a cross-check of the series, not as an accelerator (the
    transformation keeps zeta fixed).  Returns (lhs, rhs).
    """
    lhs = (1.0 - zeta) ** (1.0 - 2.0 * a) * hyp2f1(HypParams(1.0 - a, 1, zeta))
    rhs = hyp2f1(HypParams(a, 1, zeta))
    return lhs, rhs


def log_gamma(x: float) -> float:
    """ln Gamma(x) for positive real x (stdlib backend, <=1e-12 relative)."""
    if x <= 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def gauss_value_at_one(nu: float) -> float:
    """Limit F(1/2-nu, 1/2-nu; 1; 1) = Gamma(2*nu) / Gamma(1/2+nu)^2.

    Convergence at the boundary needs nu > 0.  Serves as an independent
    oracle for the series near zeta = 1.
    """
    if nu <= 0:
        raise ValueError(f"gauss_value_at_one requires nu > 0, got {nu}")
    return math.exp(log_gamma(2.0 * nu) - 2.0 * log_gamma(0.5 + nu))
