"""Closed-form algebra of the iteration scheme that drives the lifespan
bound: geometric index sequences, the log-space recursion constant, the
onset times, and the threshold function L with its crossing time T0(eps).

Everything here is exact bookkeeping; the inequalities the quantities
originate from are not re-derived numerically.  Powers like q^(j+2)
overflow doubles long before j = 30, so every product is assembled in
log space with fsum accumulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .params import DerivedParams, ModelParams, amplitude_inv


@dataclass(frozen=True)
class IterationConfig:
    """Free constants of the iteration scheme.

    delta in (1/2, 1); a0 must dominate max(2, 1/(2*delta - 1), 1/delta).
    B0, D and Btilde are structural positive constants never pinned by
    the estimates they come from; they default to 1 and the algebra is
    exercised for arbitrary positive values.
    """

    mp: ModelParams
    dp: DerivedParams
    delta: float = 0.75
    a0: float | None = None
    b0: float = 1.0
    B0: float = 1.0
    D: float = 1.0
    Btilde: float = 1.0
    a0_min: float = field(init=False)

    def __post_init__(self):
        if not 0.5 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (1/2, 1), got {self.delta}")
        a0_min = max(2.0, 1.0 / (2.0 * self.delta - 1.0), 1.0 / self.delta)
        object.__setattr__(self, "a0_min", a0_min)
        if self.a0 is None:
            object.__setattr__(self, "a0", a0_min)
        elif self.a0 < a0_min:
            raise ValueError(f"a0 must be >= {a0_min}, got {self.a0}")
        if not self.b0 > 0:
            raise ValueError(f"b0 must be positive, got {self.b0}")
        for name in ("B0", "D", "Btilde"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def seq_ab_closed(j: int, a0, b0, delta):
    """Closed forms a_j = (a0-1) r^j + 1, b_j = (b0+2) r^j - 2, r = 4/(1-delta).

    Written generically so exact rational types pass through unchanged.
    """
    r = 4 / (1 - delta)
    return (a0 - 1) * r ** j + 1, (b0 + 2) * r ** j - 2


def seq_ab(j: int, cfg: IterationConfig) -> tuple[float, float]:
    if j < 0:
        raise ValueError("index must be >= 0")
    a, b = seq_ab_closed(j, cfg.a0, cfg.b0, cfg.delta)
    return float(a), float(b)


def log_B(j: int, cfg: IterationConfig) -> float:
    """ln B_j from B_{j+1} = D q^-(j+1) B_j^q, resolved in closed form:

        ln B_j = q^j ln E + (j+1) ln q/(q-1) + ln q/(q-1)^2 - ln D/(q-1)

    with ln E = ln B0 - q ln q/(q-1)^2 + ln D/(q-1).
    """
    if j < 0:
        raise ValueError("index must be >= 0")
    q = cfg.dp.q
    ln_q, ln_d = math.log(q), math.log(cfg.D)
    ln_e = math.fsum([math.log(cfg.B0), -q * ln_q / (q - 1.0) ** 2,
                      ln_d / (q - 1.0)])
    return math.fsum([q ** j * ln_e, (j + 1) * ln_q / (q - 1.0),
                      ln_q / (q - 1.0) ** 2, -ln_d / (q - 1.0)])


def lower_bound_step_minus1(t: float, epsilon: float, cfg: IterationConfig) -> float:
    """Seed lower bound Btilde * eps^p * e^(rate * t) with
    rate = -(b+H)p/2 + (n-1)H(1 - p/2)."""
    if t < 0 or epsilon <= 0:
        raise ValueError("need t >= 0 and epsilon > 0")
    mp = cfg.mp
    rate = (-0.5 * (mp.b + mp.H) * mp.p
            + (mp.n - 1.0) * mp.H * (1.0 - 0.5 * mp.p))
    return cfg.Btilde * epsilon ** mp.p * math.exp(rate * t)


def onset_sigma(j: int, cfg: IterationConfig) -> float:
    """Onset time sigma_j after which the j-th lower bound is active."""
    mp = cfg.mp
    a_j, b_j = seq_ab(j, cfg)
    coh = mp.c / mp.H
    geom1 = amplitude_inv(8.0 * a_j * mp.R + 4.0 * (2.0 * b_j + 1.0) * coh, mp)
    inner = ((a_j - 1.0) / (1.0 - cfg.delta) * mp.R
             + (b_j + 2.0) / (1.0 - cfg.delta) * coh)
    geom2 = amplitude_inv(16.0 * inner * inner, mp)
    log_term = 2.0 / mp.H * math.log(mp.H / mp.c + 1.0)
    return max(geom1, geom2, log_term, 1.0)


def _log_Q(cfg: IterationConfig) -> float:
    mp, q = cfg.mp, cfg.dp.q
    ss, beta = mp.varsigma, mp.beta
    return (ss * q / (q - 1.0) * math.log(2.0)
            + (beta + 1.0) / (q - 1.0) * math.log(mp.H / 4.0))


def _log_E(cfg: IterationConfig) -> float:
    q = cfg.dp.q
    return math.fsum([math.log(cfg.B0), -q * math.log(q) / (q - 1.0) ** 2,
                      math.log(cfg.D) / (q - 1.0)])


def _log_N(cfg: IterationConfig) -> float:
    """log of the prefactor assembled from the two explicit averaging
    constants: N = 2^(-ss/(q-1)) * Nhat * (H/4)^(-(beta+1)/(q-1)) with
    Nhat = Ntilde / ((n/2+nu-1/p)(n/2-nu-1/p) H^2) and
    Ntilde = 2^(-(n-1)(beta+1)|1-p/2|) mu (c/H)^((n-1)(beta+1)(1-p/2))."""
    mp, dp = cfg.mp, cfg.dp
    n, p, beta, nu, H = mp.n, mp.p, mp.beta, dp.nu, mp.H
    plus = 0.5 * n + nu - 1.0 / p
    minus = 0.5 * n - nu - 1.0 / p
    if plus <= 0 or minus <= 0:
        raise ValueError("regime condition n/2 - nu > 1/p is required here")
    log_ntilde = (-(n - 1.0) * (beta + 1.0) * abs(1.0 - 0.5 * p) * math.log(2.0)
                  + math.log(mp.mu)
                  + (n - 1.0) * (beta + 1.0) * (1.0 - 0.5 * p) * math.log(mp.c / H))
    log_nhat = log_ntilde - math.log(plus * minus * H * H)
    q, ss = dp.q, mp.varsigma
    return (-ss / (q - 1.0) * math.log(2.0) + log_nhat
            - (beta + 1.0) / (q - 1.0) * math.log(H / 4.0))


def gamma_j(j: int, cfg: IterationConfig) -> float:
    """Increasing averaging factor with limit 1 - 2^-(n/2+nu-1/p)."""
    mp, dp = cfg.mp, cfg.dp
    a_j, b_j = seq_ab(j, cfg)
    coh = mp.c / mp.H
    expo = 0.5 * mp.n + dp.nu - 1.0 / mp.p
    inner = 0.5 + 0.5 * coh / (4.0 * a_j * mp.R + (4.0 * b_j + 3.0) * coh)
    return 1.0 - inner ** expo


def gamma_tilde_j(j: int, cfg: IterationConfig) -> float:
    """Companion factor with limit 1 - 2^-(n/2-nu-1/p)."""
    mp, dp = cfg.mp, cfg.dp
    a_j, b_j = seq_ab(j, cfg)
    coh = mp.c / mp.H
    expo = 0.5 * mp.n - dp.nu - 1.0 / mp.p
    inner = 0.5 + 0.5 * coh / (8.0 * a_j * mp.R + (8.0 * b_j + 5.0) * coh)
    return 1.0 - inner ** expo


def L_and_T0(t: float, epsilon: float, cfg: IterationConfig) -> tuple[float, float]:
    """The threshold function and its unit crossing:

        L(t, eps) = ln(eps^q Q E^(1/p) t^((beta+1+ss*q)/(q-1))),
        T0(eps)   = E1 * eps^(-p(q-1)/(1+ss*p)),

    with L(T0(eps), eps) = 1 by construction.  Requires ss > -1/p; at the
    double-critical exponent the t-power vanishes and no crossing exists.
    """
    mp, dp = cfg.mp, cfg.dp
    q, ss, beta, p = dp.q, mp.varsigma, mp.beta, mp.p
    if ss <= -1.0 / p:
        raise ValueError(f"varsigma must exceed -1/p, got {ss}")
    if t <= 0 or epsilon <= 0:
        raise ValueError("need t > 0 and epsilon > 0")
    log_q_e = _log_Q(cfg) + _log_E(cfg) / p
    t_power = (beta + 1.0 + ss * q) / (q - 1.0)
    L = math.fsum([q * math.log(epsilon), log_q_e, t_power * math.log(t)])
    log_E1 = (1.0 - log_q_e) / t_power
    T0 = math.exp(log_E1) * epsilon ** (-p * (q - 1.0) / (1.0 + ss * p))
    return L, T0


def K_j_factor(j: int, t: float, epsilon: float, cfg: IterationConfig) -> float:
    """log of the j-th amplitude K_j(t, eps) multiplying the common
    exponential profile in the lower-bound sequence:

        K_j = N Q^(q^(j+1)) gamma_j gammatilde_j B_j^(beta+1) eps^(q^(j+2))
              * t^(-(ss+beta+1)/(q-1)) * t^((q^(j+1)/(q-1))(beta+1+ss*q)).

    Returned in log space; overflows only past j ~ 600.
    """
    if t <= 0 or epsilon <= 0:
        raise ValueError("need t > 0 and epsilon > 0")
    mp, dp = cfg.mp, cfg.dp
    q, ss, beta = dp.q, mp.varsigma, mp.beta
    qj1 = q ** (j + 1)
    return math.fsum([
        _log_N(cfg),
        qj1 * _log_Q(cfg),
        math.log(gamma_j(j, cfg)),
        math.log(gamma_tilde_j(j, cfg)),
        (beta + 1.0) * log_B(j, cfg),
        qj1 * q * math.log(epsilon),
        -(ss + beta + 1.0) / (q - 1.0) * math.log(t),
        qj1 * (beta + 1.0 + ss * q) / (q - 1.0) * math.log(t),
    ])


def K_j_factor_via_threshold(j: int, t: float, epsilon: float,
                             cfg: IterationConfig) -> float:
    """Same quantity assembled through L(t, eps); the two routes agreeing
    is a structural self-check used by the tests:

        log K_j = q^(j+1) L + (j+1)(beta+1) ln q/(q-1) + ln(gamma_j gt_j)
                  - (ss+beta+1)/(q-1) ln t + ln N
                  + (beta+1) ln q/(q-1)^2 - (beta+1) ln D/(q-1).
    """
    mp, dp = cfg.mp, cfg.dp
    q, ss, beta = dp.q, mp.varsigma, mp.beta
    L, _ = L_and_T0(t, epsilon, cfg)
    ln_q, ln_d = math.log(q), math.log(cfg.D)
    return math.fsum([
        q ** (j + 1) * L,
        (j + 1) * (beta + 1.0) * ln_q / (q - 1.0),
        math.log(gamma_j(j, cfg)),
        math.log(gamma_tilde_j(j, cfg)),
        -(ss + beta + 1.0) / (q - 1.0) * math.log(t),
        _log_N(cfg),
        (beta + 1.0) * ln_q / (q - 1.0) ** 2,
        -(beta + 1.0) * ln_d / (q - 1.0),
    ])
