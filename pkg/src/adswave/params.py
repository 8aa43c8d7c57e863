"""Model constants and the closed-form quantities derived from them.

Everything downstream (kernels, solvers, iteration algebra) reads its
constants from a validated ``ModelParams`` plus the ``DerivedParams``
produced by :func:`derive`.  All quantities are in natural dimensionless
units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ParamError(ValueError):
    """Raised when a parameter set violates its constraints.

    ``violations`` lists every violated constraint, not just the first.
    """

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("invalid parameters: " + "; ".join(violations))


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the wave model.

    c, H    : speed scale and expansion rate of the propagation speed c*e^(H*t)
    b, m2   : damping coefficient and mass squared, with b^2 >= 4*m2
    p, beta : nonlinearity power and nonlocal exponent
    mu      : amplitude of the time factor of the nonlinearity
    varsigma: polynomial exponent of the time factor (tool default 0.0)
    varrho  : explicit exponential rate of the time factor; solvers in
              critical mode ignore it and recompute the critical rate
    n, R    : space dimension and support radius of the data
    """

    c: float = 1.0
    H: float = 1.0
    b: float = 0.0
    m2: float = 0.0
    p: float = 2.0
    beta: float = 0.0
    mu: float = 1.0
    varsigma: float = 0.0
    varrho: float = 0.0
    n: int = 1
    R: float = 1.0

    def __post_init__(self):
        bad = []
        if not self.c > 0:
            bad.append(f"c > 0 violated (c={self.c})")
        if not self.H > 0:
            bad.append(f"H > 0 violated (H={self.H})")
        if not self.b >= 0:
            bad.append(f"b >= 0 violated (b={self.b})")
        if not self.m2 >= 0:
            bad.append(f"m2 >= 0 violated (m2={self.m2})")
        if not self.b * self.b >= 4.0 * self.m2:
            bad.append(f"b^2 >= 4*m2 violated (b={self.b}, m2={self.m2})")
        if not self.p > 1:
            bad.append(f"p > 1 violated (p={self.p})")
        if not self.beta >= 0:
            bad.append(f"beta >= 0 violated (beta={self.beta})")
        if not self.mu > 0:
            bad.append(f"mu > 0 violated (mu={self.mu})")
        if not (isinstance(self.n, int) and self.n >= 1):
            bad.append(f"n integer >= 1 violated (n={self.n})")
        if not self.R > 0:
            bad.append(f"R > 0 violated (R={self.R})")
        if bad:
            raise ParamError(bad)


@dataclass(frozen=True)
class DerivedParams:
    """Closed-form quantities computed once from a ModelParams.

    alpha1, alpha2 : roots of alpha^2 - b*alpha + m2 = 0 (alpha1 >= alpha2)
    nu             : sqrt(b^2 - 4*m2) / (2*H), parameter of the kernel
    q              : (beta + 1) * p
    N_threshold    : 2/p + sqrt(b^2 - 4*m2)/H, dimension threshold
    rho_crit       : critical exponential rate of the time factor
    sigma_crit     : -1/p, critical polynomial exponent
    """

    alpha1: float
    alpha2: float
    nu: float
    q: float
    N_threshold: float
    rho_crit: float
    sigma_crit: float


def derive(params: ModelParams) -> DerivedParams:
    """Compute all derived quantities for a validated parameter set.

    The critical rate has two branches meeting at n = N_threshold; at the
    threshold itself the n <= N branch is used (they agree there).
    """
    disc = math.sqrt(params.b * params.b - 4.0 * params.m2)
    alpha1 = 0.5 * (params.b + disc)
    alpha2 = 0.5 * (params.b - disc)
    nu = disc / (2.0 * params.H)
    q = (params.beta + 1.0) * params.p
    N = 2.0 / params.p + disc / params.H
    n, H, b, p, beta = params.n, params.H, params.b, params.p, params.beta
    if n <= N:
        rho_crit = 0.5 * (b - disc) * (q - 1.0) + n * H * (beta + 1.0) * (p - 1.0)
    else:
        rho_crit = (0.5 * (b + n * H) * (q - 1.0) + n * H
                    - (n - 1.0) * H * (beta + 1.0) - H / p)
    return DerivedParams(alpha1=alpha1, alpha2=alpha2, nu=nu, q=q,
                         N_threshold=N, rho_crit=rho_crit,
                         sigma_crit=-1.0 / params.p)


def rho_crit_branches(params: ModelParams) -> tuple[float, float]:
    """Both branches of the critical rate, regardless of n vs N."""
    disc = math.sqrt(params.b * params.b - 4.0 * params.m2)
    q = (params.beta + 1.0) * params.p
    n, H, b, p, beta = params.n, params.H, params.b, params.p, params.beta
    low = 0.5 * (b - disc) * (q - 1.0) + n * H * (beta + 1.0) * (p - 1.0)
    high = (0.5 * (b + n * H) * (q - 1.0) + n * H
            - (n - 1.0) * H * (beta + 1.0) - H / p)
    return low, high


def amplitude(t: float, params: ModelParams) -> float:
    """Light-cone amplitude A(t) = (c/H) * (e^(H*t) - 1); spatial reach at time t."""
    if t < 0:
        raise ParamError([f"t >= 0 violated (t={t})"])
    return params.c / params.H * math.expm1(params.H * t)


def amplitude_inv(sigma: float, params: ModelParams) -> float:
    """Inverse of :func:`amplitude`: (1/H) * ln(H*sigma/c + 1)."""
    if sigma < 0:
        raise ParamError([f"sigma >= 0 violated (sigma={sigma})"])
    return math.log1p(params.H * sigma / params.c) / params.H


def gamma_factor(t: float, params: ModelParams, varrho: float | None = None) -> float:
    """Time factor mu * e^(varrho*t) * (1+t)^varsigma of the nonlinearity.

    ``varrho`` overrides the stored rate (used by solvers in critical mode).
    """
    rho = params.varrho if varrho is None else varrho
    return params.mu * math.exp(rho * t) * (1.0 + t) ** params.varsigma


def lifespan_exponent(params: ModelParams) -> float:
    """Exponent kappa in the lifespan upper bound T(eps) <= C * eps^kappa.

    Three branches in varsigma; the double-critical case varsigma <= -1/p is
    rejected (no bound is available there).
    """
    p, ss = params.p, params.varsigma
    q = (params.beta + 1.0) * p
    if ss <= -1.0 / p:
        raise ParamError([f"varsigma > -1/p violated (varsigma={ss}, p={p})"])
    if ss <= 0.0:
        return -p * (q - 1.0) / (1.0 + ss * p)
    if ss < 1.0 / p:
        return -p * (q - 1.0)
    return -(q - 1.0) / ss


def hypothesis_condition(params: ModelParams, derived: DerivedParams) -> bool:
    """Regime condition n/2 - nu > 1/p under which blow-up is guaranteed."""
    return 0.5 * params.n - derived.nu > 1.0 / params.p
