"""Lifespan-vs-epsilon scaling studies and regime scans.

The scan runs a decreasing epsilon ladder through one of the semilinear
solvers, collects LifespanRecords, fits the log-log slope of the finite
blow-up times, and compares it one-sidedly against the theoretical
lifespan exponent: the bound is an upper bound, so observed times may
be (much) shorter, and only a slope *steeper than allowed* or a point
above the fitted envelope falsifies it.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .linear1d import CauchyData1D
from .params import (ModelParams, derive, hypothesis_condition,
                     lifespan_exponent, rho_crit_branches)
from .radon import RadialProfile
from .semilinear import (LifespanRecord, NonlinearTerm, duhamel_solve_1d,
                         fd_radial_solve)


def worker_count() -> int:
    env = os.environ.get("ADSWAVE_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


@dataclass
class ScanConfig:
    mp: ModelParams
    epsilons: np.ndarray = None
    solver: str = "fd"                  # "fd" or "duhamel"
    t_horizon: float | None = None
    dx: float = 0.04
    slab: float = 0.05
    tol: float = 1e-6
    cap: float | None = None
    margin: float = 0.15
    seed: int = 0

    def __post_init__(self):
        if self.epsilons is None:
            self.epsilons = np.geomspace(1e-1, 1e-3, 12)
        self.epsilons = np.asarray(self.epsilons, dtype=float)
        if len(self.epsilons) < 6:
            raise ValueError("epsilon ladder needs at least 6 points")
        if np.any(np.diff(self.epsilons) >= 0):
            raise ValueError("epsilon ladder must be strictly decreasing")
        if self.solver not in ("fd", "duhamel"):
            raise ValueError(f"unknown solver {self.solver!r}")


@dataclass
class ScanResult:
    records: list[LifespanRecord]
    slope: float
    intercept: float
    theoretical_exponent: float
    envelope_C: float
    verdict: str                        # "pass" | "fail" | "inconclusive"
    n_excluded: int
    regime: dict = field(default_factory=dict)


def _run_point(cfg: ScanConfig, nl: NonlinearTerm, horizon: float,
               eps: float) -> LifespanRecord:
    mp = cfg.mp
    if cfg.solver == "duhamel":
        data = CauchyData1D.default_bumps(R=mp.R, dx=mp.R / 100.0)
        _, rec = duhamel_solve_1d(data, nl, eps, horizon, slab=cfg.slab,
                                  tol=cfg.tol, cap=cfg.cap)
    else:
        from .linear1d import bump_c1, bump_c2
        v0 = RadialProfile.from_function(lambda r: bump_c2(r, mp.R), mp.n, mp.R)
        v1 = RadialProfile.from_function(lambda r: bump_c1(r, mp.R), mp.n, mp.R)
        _, rec = fd_radial_solve(v0, v1, nl, eps, horizon, dx=cfg.dx,
                                 cap=cfg.cap)
    return rec


def lifespan_scan(cfg: ScanConfig) -> ScanResult:
    """Run the ladder, fit ln(t_blowup) against ln(epsilon), and compare
    against the theoretical exponent.  Fewer than 4 finite records make
    the verdict inconclusive rather than a failure."""
    mp = cfg.mp
    dp = derive(mp)
    nl = NonlinearTerm(mp=mp, dp=dp, mode="critical")
    theo = lifespan_exponent(mp)
    regime = {
        "hypothesis_n_half_minus_nu": hypothesis_condition(mp, dp),
        "varsigma": mp.varsigma,
        "sigma_crit": dp.sigma_crit,
        "rho_crit": dp.rho_crit,
        "theoretical_exponent": theo,
    }
    if mp.varsigma > 0.0:
        # two routes compete above varsigma = 0; both are reported and the
        # smaller-in-modulus one is the bound actually checked (no claim
        # of sharpness is made for either)
        regime["candidate_exponents"] = {
            "varsigma_zero_route": -mp.p * (dp.q - 1.0),
            "polynomial_route": -(dp.q - 1.0) / mp.varsigma,
        }
    from .semilinear import default_horizon
    horizons = {eps: (cfg.t_horizon if cfg.t_horizon is not None
                      else default_horizon(mp, dp, eps))
                for eps in cfg.epsilons}
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        futures = {eps: pool.submit(_run_point, cfg, nl, horizons[eps], eps)
                   for eps in cfg.epsilons}
        records = [futures[eps].result() for eps in cfg.epsilons]

    finite = [(r.epsilon, r.t_blowup) for r in records
              if math.isfinite(r.t_blowup)]
    n_excluded = len(records) - len(finite)
    if len(finite) < 4:
        return ScanResult(records=records, slope=math.nan, intercept=math.nan,
                          theoretical_exponent=theo, envelope_C=math.nan,
                          verdict="inconclusive", n_excluded=n_excluded,
                          regime=regime)
    eps_arr = np.array([e for e, _ in finite])
    t_arr = np.array([t for _, t in finite])
    slope, intercept = np.polyfit(np.log(eps_arr), np.log(t_arr), 1)
    envelope_c = float(np.max(t_arr * eps_arr ** (-theo)))
    slope_ok = slope >= theo - cfg.margin
    envelope_ok = bool(np.all(t_arr <= envelope_c * eps_arr ** theo * (1 + 1e-12)))
    verdict = "pass" if (slope_ok and envelope_ok) else "fail"
    return ScanResult(records=records, slope=float(slope),
                      intercept=float(intercept), theoretical_exponent=theo,
                      envelope_C=envelope_c, verdict=verdict,
                      n_excluded=n_excluded, regime=regime)


def regime_scan(base: ModelParams, n_values: list[int],
                p_values: list[float] | None = None) -> list[dict]:
    """Tabulate thresholds and regime flags over a small parameter grid."""
    rows = []
    for p in (p_values or [base.p]):
        for n in n_values:
            mp = ModelParams(c=base.c, H=base.H, b=base.b, m2=base.m2, p=p,
                             beta=base.beta, mu=base.mu,
                             varsigma=base.varsigma, varrho=base.varrho,
                             n=n, R=base.R)
            dp = derive(mp)
            low, high = rho_crit_branches(mp)
            rows.append({
                "n": n, "p": p,
                "N_threshold": dp.N_threshold,
                "branch": "low" if n <= dp.N_threshold else "high",
                "rho_crit": dp.rho_crit,
                "rho_crit_low_branch": low,
                "rho_crit_high_branch": high,
                "hypothesis_n_half_minus_nu": hypothesis_condition(mp, dp),
                "sigma_crit": dp.sigma_crit,
            })
    return rows
