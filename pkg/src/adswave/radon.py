"""Radon transform of radially symmetric functions and the related
boundedness operator.

For a radial profile v(r) in dimension n >= 2 the plane transform
reduces to the weighted line integral

    R[v](rho) = omega_{n-1} * int_{|rho|}^{inf} v(r) (r^2 - rho^2)^((n-3)/2) r dr,

which converts the n-d wave problem into the 1-d one the kernels solve.
The substitution u = sqrt(r^2 - rho^2) turns the integrand into
v(sqrt(u^2 + rho^2)) u^(n-2), removing the endpoint singularity of the
n = 2 case exactly; it is used for every n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .hypfun import log_gamma
from .params import DerivedParams, ModelParams
from .quadrature import fixed_panels


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n: 2 pi^(n/2) / Gamma(n/2)."""
    return 2.0 * math.pi ** (0.5 * n) * math.exp(-log_gamma(0.5 * n))


@dataclass
class RadialProfile:
    """Sampled radial function supported in [0, support_radius].

    ``fn`` optionally carries the analytic profile; when present it is
    used inside quadratures, otherwise a cubic spline of the samples is.
    """

    rs: np.ndarray
    values: np.ndarray
    n: int
    support_radius: float
    fn: Callable[[np.ndarray], np.ndarray] | None = None
    _spline: CubicSpline = field(init=False, repr=False, default=None)

    def __post_init__(self):
        self.rs = np.asarray(self.rs, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got n={self.n}")
        outside = self.rs > self.support_radius
        if np.any(np.abs(self.values[outside]) > 0.0):
            raise ValueError("profile values must vanish beyond support_radius")

    @classmethod
    def from_function(cls, fn, n: int, support_radius: float,
                      r_max: float | None = None, num: int = 801):
        r_max = support_radius if r_max is None else r_max
        rs = np.linspace(0.0, r_max, num)
        vals = np.asarray(fn(rs), dtype=float)
        vals[rs > support_radius] = 0.0
        return cls(rs=rs, values=vals, n=n, support_radius=support_radius, fn=fn)

    def __call__(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.fn is not None:
            out = np.asarray(self.fn(r), dtype=float)
        else:
            if self._spline is None:
                self._spline = CubicSpline(self.rs, self.values)
            out = self._spline(np.clip(r, self.rs[0], self.rs[-1]))
        return np.where(r > self.support_radius, 0.0, out)


def radon_radial(profile: RadialProfile, rho: float) -> float:
    """Plane transform of a radial profile at offset rho (even in rho)."""
    if profile.n < 2:
        raise ValueError("the plane transform needs n >= 2")
    rho = abs(rho)
    r_top = profile.support_radius
    if rho >= r_top:
        return 0.0
    u_top = math.sqrt(r_top * r_top - rho * rho)

    def integrand(u):
        return profile(np.sqrt(u * u + rho * rho)) * u ** (profile.n - 2)

    n_panels = max(4, int(math.ceil(u_top / max(r_top, 1e-30) * 8)))
    value = fixed_panels(integrand, 0.0, u_top, n_panels)
    return sphere_area(profile.n - 1) * value


def radon_grid(profile: RadialProfile, rhos: np.ndarray) -> np.ndarray:
    return np.array([radon_radial(profile, r) for r in np.asarray(rhos)])


def radon_mass(profile: RadialProfile) -> tuple[float, float]:
    """Both sides of the mass identity

        int_R R[v](rho) d rho  =  omega_n int_0^inf v(r) r^(n-1) dr,

    computed by two independent quadratures.  Returns (lhs, rhs)."""
    S = profile.support_radius
    lhs = 2.0 * fixed_panels(lambda r: radon_grid(profile, r), 0.0, S, 24)

    def shell(r):
        return profile(r) * r ** (profile.n - 1)

    rhs = sphere_area(profile.n) * fixed_panels(shell, 0.0, S, 24)
    return lhs, rhs


def operator_T(h: Callable[[np.ndarray], np.ndarray], t: float, tau: float,
               mp: ModelParams, n: int | None = None) -> float:
    """Boundedness operator

        T(h)(tau) = |A(t)+R-tau|^(-(n-1)/2) int_tau^(A(t)+R) h(r) |r-tau|^((n-3)/2) dr.

    For n = 2 the endpoint singularity is removed by r = tau + u^2;
    higher n use plain Gauss-Legendre panels.
    """
    from .params import amplitude
    n = mp.n if n is None else n
    top = amplitude(t, mp) + mp.R
    if tau > top:
        raise ValueError(f"tau={tau} beyond A(t)+R={top}")
    width = top - tau
    if width <= 0.0:
        return 0.0
    if n == 2:
        # int h(tau+u^2) u^-1 * 2u du = 2 int h(tau+u^2) du
        inner = 2.0 * fixed_panels(
            lambda u: h(tau + u * u), 0.0, math.sqrt(width), 12)
    else:
        inner = fixed_panels(
            lambda r: h(r) * (r - tau) ** (0.5 * (n - 3)), tau, top, 12)
    return width ** (-0.5 * (n - 1)) * inner


def radon_laplacian_identity_check(profile: RadialProfile,
                                   d_rho: float | None = None) -> float:
    """Max-norm residual of R[Lap v] = d^2/drho^2 R[v] on a rho grid.

    The radial Laplacian v'' + (n-1) v'/r is formed by centered
    differences on the sample grid; the rho second derivative by
    centered differences with step d_rho (default 2x the sample step).
    """
    rs, vals, n = profile.rs, profile.values, profile.n
    dr = rs[1] - rs[0]
    d_rho = 2.0 * dr if d_rho is None else d_rho
    vp = np.empty_like(vals)
    vpp = np.empty_like(vals)
    vp[1:-1] = (vals[2:] - vals[:-2]) / (2.0 * dr)
    vpp[1:-1] = (vals[2:] - 2.0 * vals[1:-1] + vals[:-2]) / dr ** 2
    vp[0] = 0.0                          # even profile
    vpp[0] = 2.0 * (vals[1] - vals[0]) / dr ** 2
    vp[-1], vpp[-1] = 0.0, 0.0           # beyond the support
    lap = np.empty_like(vals)
    lap[1:] = vpp[1:] + (n - 1.0) * vp[1:] / rs[1:]
    lap[0] = n * vpp[0]
    lap_prof = RadialProfile(rs=rs, values=lap, n=n,
                             support_radius=profile.support_radius)

    rho_max = 0.9 * profile.support_radius
    rhos = np.linspace(0.0, rho_max, 25)
    lhs = radon_grid(lap_prof, rhos)
    rhs = np.array([
        (radon_radial(profile, r + d_rho) - 2.0 * radon_radial(profile, r)
         + radon_radial(profile, r - d_rho)) / d_rho ** 2
        for r in rhos])
    return float(np.max(np.abs(lhs - rhs)))


def r1_offset(mp: ModelParams, dp: DerivedParams) -> float:
    """Cone-edge offset used in the kernel lower bounds: 0 for nu <= 1/2,
    c/H - R otherwise.  Logged for completeness; feeds no solver."""
    if dp.nu <= 0.5:
        return 0.0
    return mp.c / mp.H - mp.R
