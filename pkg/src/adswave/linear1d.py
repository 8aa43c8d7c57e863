"""Exact and finite-difference solvers for the 1-d linear problem

    v_tt - c^2 e^(2Ht) v_xx + b v_t + m2 v = g(t, x),
    v(0) = v0,  v_t(0) = v1,

with compactly supported data.  ``evaluate_exact`` sums the four-term
representation formula (traveling data term plus K0, K1 and source
kernel integrals) by adaptive Gauss-Legendre quadrature;
``fd_reference_solve`` is the independent second-order leapfrog oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from . import quadrature
from .kernels import kernel_E_grid, kernel_K0_grid, kernel_K1_grid
from .params import DerivedParams, ModelParams, amplitude

INSTABILITY_CAP = 1e12


class FdInstabilityError(ArithmeticError):
    def __init__(self, t: float, peak: float):
        self.t, self.peak = t, peak
        super().__init__(f"finite-difference solution exceeded {peak:.3e} at t={t:.6g}")


@dataclass
class GridFunction1D:
    """Samples on a uniform grid, vanishing outside [-support_radius, support_radius]."""

    xs: np.ndarray
    values: np.ndarray
    support_radius: float
    fn: Callable[[np.ndarray], np.ndarray] | None = None
    _spline: CubicSpline = field(init=False, repr=False, default=None)

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        outside = np.abs(self.xs) > self.support_radius
        if np.any(self.values[outside] != 0.0):
            raise ValueError("values must vanish outside the support radius")

    @classmethod
    def from_function(cls, fn, support_radius: float, dx: float,
                      x_max: float | None = None):
        x_max = support_radius if x_max is None else x_max
        n = int(math.ceil(x_max / dx))
        xs = np.arange(-n, n + 1) * dx
        vals = np.asarray(fn(xs), dtype=float)
        vals[np.abs(xs) > support_radius] = 0.0
        return cls(xs=xs, values=vals, support_radius=support_radius, fn=fn)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.fn is not None:
            out = np.asarray(self.fn(x), dtype=float)
        else:
            if self._spline is None:
                self._spline = CubicSpline(self.xs, self.values)
            out = self._spline(np.clip(x, self.xs[0], self.xs[-1]))
        return np.where(np.abs(x) > self.support_radius, 0.0, out)


def bump_c2(x: np.ndarray, R: float) -> np.ndarray:
    """(1 - (x/R)^2)^3 on |x| <= R: twice continuously differentiable."""
    x = np.asarray(x, dtype=float)
    y = 1.0 - (x / R) ** 2
    return np.where(y > 0.0, y * y * y, 0.0)


def bump_c1(x: np.ndarray, R: float) -> np.ndarray:
    """(1 - (x/R)^2)^2 on |x| <= R: once continuously differentiable."""
    x = np.asarray(x, dtype=float)
    y = 1.0 - (x / R) ** 2
    return np.where(y > 0.0, y * y, 0.0)


@dataclass
class CauchyData1D:
    """Position datum (C^2), velocity datum (C^1) and optional source g(t, x)."""

    v0: GridFunction1D
    v1: GridFunction1D
    source: Callable[[float, np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if self.v0.support_radius != self.v1.support_radius:
            raise ValueError("v0 and v1 must share the support radius")
        if len(self.v0.xs) != len(self.v1.xs) or self.v0.xs[0] != self.v1.xs[0]:
            raise ValueError("v0 and v1 must share the grid")

    @classmethod
    def default_bumps(cls, R: float, dx: float = 0.01, source=None,
                      x_max: float | None = None):
        return cls(
            v0=GridFunction1D.from_function(lambda x: bump_c2(x, R), R, dx, x_max),
            v1=GridFunction1D.from_function(lambda x: bump_c1(x, R), R, dx, x_max),
            source=source)

    @property
    def support_radius(self) -> float:
        return self.v0.support_radius


def evaluate_exact(t: float, x: float, data: CauchyData1D,
                   mp: ModelParams, dp: DerivedParams,
                   rtol: float = 1e-6) -> tuple[float, float]:
    """Representation-formula value of v(t, x) and its error estimate.

    v = int_0^t int E g dz ds
        + (1/2) e^(-(b+H)t/2) [v0(x + A(t)) + v0(x - A(t))]
        + int K0 v0 dz + int K1 v1 dz,

    each kernel integral running over the cone section at the relevant
    source time.  Raises QuadratureError when the adaptive refinement
    cannot certify the requested tolerance.
    """
    At = amplitude(t, mp)
    R0 = data.support_radius
    peak = max(float(np.max(np.abs(data.v0.values))),
               float(np.max(np.abs(data.v1.values))), 1e-300)
    atol = 0.1 * rtol * peak
    travel = 0.5 * math.exp(-0.5 * (mp.b + mp.H) * t) * float(
        data.v0(np.asarray([x + At]))[0] + data.v0(np.asarray([x - At]))[0])
    if t == 0.0:
        return travel, 0.0

    total_err = 0.0
    lo, hi = max(x - At, -R0), min(x + At, R0)
    val_k0 = val_k1 = 0.0
    if hi > lo:
        val_k0, e0 = quadrature.adaptive(
            lambda z: kernel_K0_grid(t, x - z, mp, dp) * data.v0(z),
            lo, hi, rtol=0.25 * rtol, atol=atol)
        val_k1, e1 = quadrature.adaptive(
            lambda z: kernel_K1_grid(t, x - z, mp, dp) * data.v1(z),
            lo, hi, rtol=0.25 * rtol, atol=atol)
        total_err += e0 + e1

    val_src = 0.0
    if data.source is not None:
        inner_err = 0.0

        def shell(s_nodes):
            nonlocal inner_err
            out = np.empty_like(s_nodes)
            for i, s in enumerate(s_nodes):
                w = At - amplitude(s, mp)
                if w <= 0.0:
                    out[i] = 0.0
                    continue
                val, err = quadrature.adaptive(
                    lambda z, s=s: kernel_E_grid(t, s, x - z, mp, dp)
                    * data.source(s, z),
                    x - w, x + w, rtol=0.25 * rtol, atol=atol)
                inner_err = max(inner_err, err)
                out[i] = val
            return out

        val_src, e_src = quadrature.adaptive(shell, 0.0, t,
                                             rtol=0.25 * rtol, atol=atol)
        total_err += e_src + inner_err * t
    return travel + val_k0 + val_k1 + val_src, total_err


@dataclass
class SpaceTimeGrid1D:
    """Recorded frames of a line solve: values[i] is the field at ts[i]."""

    ts: np.ndarray
    xs: np.ndarray
    values: np.ndarray
    mp: ModelParams
    data: CauchyData1D | None = None
    epsilon: float = 1.0

    def frame_at(self, t: float) -> np.ndarray:
        i = int(np.argmin(np.abs(self.ts - t)))
        return self.values[i]

    def dt_field_at(self, t: float) -> np.ndarray:
        """Centered time derivative of the recorded frames at time t."""
        i = int(np.argmin(np.abs(self.ts - t)))
        if 0 < i < len(self.ts) - 1:
            return (self.values[i + 1] - self.values[i - 1]) / (self.ts[i + 1] - self.ts[i - 1])
        if i == 0:
            return (self.values[1] - self.values[0]) / (self.ts[1] - self.ts[0])
        return (self.values[-1] - self.values[-2]) / (self.ts[-1] - self.ts[-2])


def fd_reference_solve(data: CauchyData1D, mp: ModelParams, t_end: float,
                       dx: float, cfl: float = 0.5,
                       n_frames: int = 401,
                       source=None) -> SpaceTimeGrid1D:
    """Leapfrog solve on a grid containing the full domain of influence.

    The damping term is discretized with a centered time average (keeps
    second order, mildly implicit), the mass term explicitly.  The time
    step obeys dt <= cfl * dx / (c e^(H t_end)), the worst-case speed.

    Finite propagation speed makes the continuum solution vanish outside
    B_(R + A(t)); the stencil would smear a tiny dispersive tail a few
    cells past that edge, so the solver enforces the exact condition by
    zeroing everything beyond one cell outside the cone each step.
    """
    if dx <= 0 or t_end <= 0:
        raise ValueError("need dx > 0 and t_end > 0")
    g = data.source if source is None else source
    R0 = data.support_radius
    x_max = R0 + amplitude(t_end, mp) + 6.0 * dx
    n_half = int(math.ceil(x_max / dx))
    xs = np.arange(-n_half, n_half + 1) * dx
    dt = cfl * dx / (mp.c * math.exp(mp.H * t_end))
    n_steps = max(2, int(math.ceil(t_end / dt)))
    dt = t_end / n_steps
    record_every = max(1, n_steps // max(n_frames - 1, 1))

    v_prev = data.v0(xs)
    v1_vals = data.v1(xs)
    c2 = mp.c * mp.c

    def lap(v):
        out = np.zeros_like(v)
        out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (dx * dx)
        return out

    g0 = g(0.0, xs) if g is not None else 0.0
    v_curr = (v_prev + dt * v1_vals
              + 0.5 * dt * dt * (c2 * lap(v_prev) - mp.b * v1_vals
                                 - mp.m2 * v_prev + g0))
    frames = [v_prev.copy()]
    times = [0.0]
    if record_every == 1:
        frames.append(v_curr.copy())
        times.append(dt)
    denom = 1.0 + 0.5 * mp.b * dt
    abs_xs = np.abs(xs)
    for n in range(1, n_steps):
        t_n = n * dt
        speed2 = c2 * math.exp(2.0 * mp.H * t_n)
        g_n = g(t_n, xs) if g is not None else 0.0
        v_next = ((2.0 - mp.m2 * dt * dt) * v_curr
                  - (1.0 - 0.5 * mp.b * dt) * v_prev
                  + dt * dt * (speed2 * lap(v_curr) + g_n)) / denom
        v_next[abs_xs > R0 + amplitude((n + 1) * dt, mp) + dx] = 0.0
        peak = float(np.max(np.abs(v_next)))
        if not math.isfinite(peak) or peak > INSTABILITY_CAP:
            raise FdInstabilityError(t=t_n + dt, peak=peak)
        v_prev, v_curr = v_curr, v_next
        if (n + 1) % record_every == 0 or n == n_steps - 1:
            frames.append(v_curr.copy())
            times.append((n + 1) * dt)
    return SpaceTimeGrid1D(ts=np.array(times), xs=xs,
                           values=np.array(frames), mp=mp, data=data)


def spatial_average(grid: SpaceTimeGrid1D, t: float) -> float:
    """Trapezoid integral of the frame nearest to t over the line."""
    return float(np.trapezoid(grid.frame_at(t), grid.xs))


def spatial_average_series(grid: SpaceTimeGrid1D) -> tuple[np.ndarray, np.ndarray]:
    return grid.ts, np.trapezoid(grid.values, grid.xs, axis=1)


def support_violation(grid: SpaceTimeGrid1D, pad_cells: int = 2) -> float:
    """Largest |v| outside B_(R + A(t)) padded by pad_cells, relative to the peak."""
    dx = grid.xs[1] - grid.xs[0]
    peak = float(np.max(np.abs(grid.values)))
    if peak == 0.0:
        return 0.0
    worst = 0.0
    R0 = grid.data.support_radius if grid.data is not None else grid.mp.R
    for i, t in enumerate(grid.ts):
        edge = R0 + amplitude(t, grid.mp) + pad_cells * dx
        outside = np.abs(grid.xs) > edge
        if np.any(outside):
            worst = max(worst, float(np.max(np.abs(grid.values[i][outside]))))
    return worst / peak


class SmoothBump2D:
    """Separable test function bump((t-t0)/wt) * bump((x-x0)/wx) with
    bump(u) = exp(-1/(1-u^2)) inside |u| < 1; infinitely smooth,
    compactly supported, with analytic first and second derivatives."""

    def __init__(self, t0: float, wt: float, x0: float, wx: float):
        self.t0, self.wt, self.x0, self.wx = t0, wt, x0, wx

    @staticmethod
    def _g(u):
        u = np.asarray(u, dtype=float)
        inside = np.abs(u) < 1.0
        safe = np.where(inside, u, 0.0)
        val = np.exp(-1.0 / np.maximum(1.0 - safe * safe, 1e-300))
        return np.where(inside, val, 0.0)

    @staticmethod
    def _g1(u):
        u = np.asarray(u, dtype=float)
        inside = np.abs(u) < 1.0
        safe = np.where(inside, u, 0.0)
        one = 1.0 - safe * safe
        h = -2.0 * safe / np.maximum(one * one, 1e-300)
        return np.where(inside, SmoothBump2D._g(u) * h, 0.0)

    @staticmethod
    def _g2(u):
        u = np.asarray(u, dtype=float)
        inside = np.abs(u) < 1.0
        safe = np.where(inside, u, 0.0)
        one = 1.0 - safe * safe
        h = -2.0 * safe / np.maximum(one * one, 1e-300)
        hp = -(2.0 + 6.0 * safe * safe) / np.maximum(one ** 3, 1e-300)
        return np.where(inside, SmoothBump2D._g(u) * (h * h + hp), 0.0)

    def value(self, t, x):
        return self._g((t - self.t0) / self.wt) * self._g((x - self.x0) / self.wx)

    def dt(self, t, x):
        return self._g1((t - self.t0) / self.wt) / self.wt \
            * self._g((x - self.x0) / self.wx)

    def dtt(self, t, x):
        return self._g2((t - self.t0) / self.wt) / self.wt ** 2 \
            * self._g((x - self.x0) / self.wx)

    def dxx(self, t, x):
        return self._g((t - self.t0) / self.wt) \
            * self._g2((x - self.x0) / self.wx) / self.wx ** 2


def weak_residual(grid: SpaceTimeGrid1D, phi: SmoothBump2D, t: float,
                  mp: ModelParams, epsilon: float = 1.0,
                  nonlinear=None) -> float:
    """Defect of the weak-solution identity tested against phi at time t.

    Boundary terms at times t and 0, the space-time integral against the
    adjoint operator, and the source pairing are all evaluated by
    trapezoid rules on the recorded grid; for a solution of the equation
    the result shrinks at second order in the grid steps.

    ``nonlinear`` switches the right-hand side from the linear source to
    the nonlocal power nonlinearity evaluated on the recorded solution.
    """
    xs = grid.xs
    mask = grid.ts <= t + 1e-12
    ts = grid.ts[mask]
    vals = grid.values[mask]

    v_t = grid.dt_field_at(t)
    frame_t = grid.frame_at(t)
    lhs_t = np.trapezoid(v_t * phi.value(t, xs) - frame_t * phi.dt(t, xs)
                     + mp.b * frame_t * phi.value(t, xs), xs)

    adjoint = np.empty(len(ts))
    for i, s in enumerate(ts):
        op = (phi.dtt(s, xs)
              - mp.c ** 2 * math.exp(2.0 * mp.H * s) * phi.dxx(s, xs)
              - mp.b * phi.dt(s, xs) + mp.m2 * phi.value(s, xs))
        adjoint[i] = np.trapezoid(vals[i] * op, xs)
    lhs_st = np.trapezoid(adjoint, ts)

    data = grid.data
    rhs_data = 0.0
    if data is not None:
        rhs_data = epsilon * np.trapezoid(data.v1(xs) * phi.value(0.0, xs), xs) \
            + epsilon * np.trapezoid(data.v0(xs) * (mp.b * phi.value(0.0, xs)
                                                - phi.dt(0.0, xs)), xs)
    rhs_src = 0.0
    if nonlinear is not None:
        pairing = np.empty(len(ts))
        for i, s in enumerate(ts):
            absp = np.abs(vals[i]) ** mp.p
            lp = np.trapezoid(absp, xs)
            pairing[i] = nonlinear.gamma(s) * lp ** mp.beta \
                * np.trapezoid(absp * phi.value(s, xs), xs)
        rhs_src = np.trapezoid(pairing, ts)
    elif data is not None and data.source is not None:
        pairing = np.empty(len(ts))
        for i, s in enumerate(ts):
            pairing[i] = np.trapezoid(data.source(s, xs) * phi.value(s, xs), xs)
        rhs_src = np.trapezoid(pairing, ts)
    return float(lhs_t + lhs_st - rhs_data - rhs_src)
