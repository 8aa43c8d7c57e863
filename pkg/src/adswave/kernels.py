"""Exact kernel functions of the 1-d representation formula.

The solution of the linear problem on the expanding background is built
from three kernels evaluated on the backward light cone:

  E  (t,x; s,z)  source kernel,
  K1 (t,x; z)    = E at s = 0, weighting the velocity datum,
  K0 (t,x; z)    = -dE/ds at s = 0 + b * E at s = 0, weighting the
                   position datum.

All kernels share the prefactor (1/H) (2c/H)^(-2 nu) e^(-(b/2+nu H) t)
and the inner factor

  Ecal(s) = e^((b/2 - nu H) s) * base^(nu - 1/2) * F(1/2-nu, 1/2-nu; 1; zeta),

with base = ((c/H)(e^(Ht) + e^(Hs)))^2 - (x-z)^2 and
zeta = (((c/H)(e^(Ht) - e^(Hs)))^2 - (x-z)^2) / base.  The base is
bounded below by 4 (c/H)^2 e^(H(t+s)) on the closed cone, so nothing is
singular there.  K0 uses the analytic s-derivative of Ecal, never a
finite difference; the derivative formula is exercised against a finite
difference in the tests only.

Scalar entry points take a KernelPoint; the *_grid functions evaluate a
whole array of offsets u = x - z at once (one vectorized hypergeometric
series call per invocation), which is what the quadrature loops use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hypfun import hyp2f1_array
from .params import DerivedParams, ModelParams, amplitude

CONE_TOL = 1e-12


class ConeError(ValueError):
    """Evaluation point lies outside the closed backward light cone."""


@dataclass(frozen=True)
class KernelPoint:
    """One light-cone evaluation site (t, x; s, z) with cached powers."""

    t: float
    x: float
    s: float
    z: float
    mp: ModelParams
    dp: DerivedParams
    phi_t: float = field(init=False)
    phi_s: float = field(init=False)
    base: float = field(init=False)
    zeta: float = field(init=False)
    u: float = field(init=False)        # |x - z|, clamped to the cone edge

    def __post_init__(self):
        if not 0.0 <= self.s <= self.t:
            raise ConeError(f"need 0 <= s <= t, got s={self.s}, t={self.t}")
        mp = self.mp
        phi_t = mp.c / mp.H * math.exp(mp.H * self.t)
        phi_s = mp.c / mp.H * math.exp(mp.H * self.s)
        u = abs(self.x - self.z)
        reach = phi_t - phi_s           # A(t) - A(s)
        if u > reach:
            if u - reach <= CONE_TOL * max(amplitude(self.t, mp), 1.0):
                u = reach               # quadrature nodes may land epsilon outside
            else:
                raise ConeError(
                    f"|x-z|={u} exceeds cone reach {reach} at t={self.t}, s={self.s}")
        base = (phi_t + phi_s) ** 2 - u * u
        zeta = ((phi_t - phi_s) ** 2 - u * u) / base
        object.__setattr__(self, "phi_t", phi_t)
        object.__setattr__(self, "phi_s", phi_s)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "zeta", max(zeta, 0.0))
        object.__setattr__(self, "u", u)


def zeta_arg(pt: KernelPoint) -> float:
    """Hypergeometric argument at the point; lies in [0, 1) on the cone."""
    return pt.zeta


def _prefactor(t, mp: ModelParams, dp: DerivedParams):
    return (1.0 / mp.H * (2.0 * mp.c / mp.H) ** (-2.0 * dp.nu)
            * np.exp(-(0.5 * mp.b + dp.nu * mp.H) * t))


def kernel_E_grid(t, s, u, mp: ModelParams, dp: DerivedParams) -> np.ndarray:
    """E(t, x; s, z) on offsets u = x - z inside the cone.

    t, s and u may be scalars or broadcastable arrays."""
    u = np.abs(np.asarray(u, dtype=float))
    phi_t = mp.c / mp.H * np.exp(mp.H * np.asarray(t, dtype=float))
    phi_s = mp.c / mp.H * np.exp(mp.H * np.asarray(s, dtype=float))
    reach = phi_t - phi_s
    u = np.minimum(u, reach)            # edge clamp, callers stay within CONE_TOL
    base = (phi_t + phi_s) ** 2 - u * u
    zeta = np.maximum(((phi_t - phi_s) ** 2 - u * u) / base, 0.0)
    nu = dp.nu
    ecal = (np.exp((0.5 * mp.b - nu * mp.H) * np.asarray(s, dtype=float))
            * base ** (nu - 0.5) * hyp2f1_array(0.5 - nu, 1, zeta))
    return _prefactor(t, mp, dp) * ecal


def kernel_E(pt: KernelPoint) -> float:
    return float(kernel_E_grid(pt.t, pt.s, np.asarray([pt.u]), pt.mp, pt.dp)[0])


def kernel_K1_grid(t, u, mp: ModelParams, dp: DerivedParams) -> np.ndarray:
    """K1(t, x; z) = E(t, x; 0, z)."""
    return kernel_E_grid(t, 0.0, u, mp, dp)


def kernel_K1(pt: KernelPoint) -> float:
    if pt.s != 0.0:
        raise ConeError("K1 is defined at s = 0")
    return float(kernel_K1_grid(pt.t, np.asarray([pt.u]), pt.mp, pt.dp)[0])


def dE_ds_grid(t, s, u, mp: ModelParams, dp: DerivedParams) -> np.ndarray:
    """Analytic dE/ds on an offset grid (broadcasts like kernel_E_grid).

    dEcal/ds has three terms: the exponential rate, the derivative of the
    base power, and the chain-rule term through zeta with
    F'(a,a;1;.) = a^2 F(a+1,a+1;2;.).
    """
    u = np.abs(np.asarray(u, dtype=float))
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    c, H, b = mp.c, mp.H, mp.b
    nu = dp.nu
    phi_t = c / H * np.exp(H * t)
    phi_s = c / H * np.exp(H * s)
    reach = phi_t - phi_s
    u = np.minimum(u, reach)
    base = (phi_t + phi_s) ** 2 - u * u
    zeta = np.maximum(((phi_t - phi_s) ** 2 - u * u) / base, 0.0)
    exp_s = np.exp((0.5 * b - nu * H) * s)
    powbase = base ** (nu - 0.5)
    f_val = hyp2f1_array(0.5 - nu, 1, zeta)
    ecal = exp_s * powbase * f_val
    rate_term = (0.5 * b - nu * H) * ecal
    base_term = ((2.0 * nu - 1.0) * H * (c / H) ** 2
                 * (np.exp(H * t) + np.exp(H * s)) * np.exp(H * s)
                 / base * ecal)
    dzeta_ds = (4.0 * c * c / H * np.exp(H * (t + s))
                * (u * u + (c / H) ** 2
                   * (np.exp(2.0 * H * s) - np.exp(2.0 * H * t)))
                / (base * base))
    if nu == 0.5:
        chain_term = np.zeros_like(base)
    else:
        f2 = hyp2f1_array(1.5 - nu, 2, zeta)
        chain_term = (0.5 - nu) ** 2 * exp_s * powbase * f2 * dzeta_ds
    return _prefactor(t, mp, dp) * (rate_term + base_term + chain_term)


def dE_ds(pt: KernelPoint) -> float:
    return float(dE_ds_grid(pt.t, pt.s, np.asarray([pt.u]), pt.mp, pt.dp)[0])


def kernel_K0_grid(t, u, mp: ModelParams, dp: DerivedParams) -> np.ndarray:
    """K0(t, x; z) = -dE/ds(s=0) + b * E(s=0); nonnegative on the cone."""
    return (-dE_ds_grid(t, 0.0, u, mp, dp)
            + mp.b * kernel_E_grid(t, 0.0, u, mp, dp))


def kernel_K0(t: float, x: float, z: float,
              mp: ModelParams, dp: DerivedParams) -> float:
    u = abs(x - z)
    reach = amplitude(t, mp)
    if u > reach + CONE_TOL * max(reach, 1.0):
        raise ConeError(f"|x-z|={u} exceeds A(t)={reach}")
    return float(kernel_K0_grid(t, np.asarray([u]), mp, dp)[0])
