"""Semilinear solvers, functional tracking and blow-up detection.

The equation carries the nonlocal power nonlinearity

    f(t, v) = gamma(t) * (int |v|^p dy)^beta * |v|^p,
    gamma(t) = mu * e^(rho t) * (1 + t)^varsigma,

with rho either explicit or recomputed as the critical rate.  Two
independent solvers produce LifespanRecords: a leapfrog scheme in radial
symmetry for any n >= 1, and a slab-wise Picard iteration of the exact
source representation for n = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .kernels import kernel_E_grid, kernel_K0_grid, kernel_K1_grid
from .linear1d import CauchyData1D
from .params import (DerivedParams, ModelParams, amplitude, amplitude_inv,
                     gamma_factor, hypothesis_condition)
from .radon import RadialProfile, sphere_area


@dataclass(frozen=True)
class NonlinearTerm:
    """Nonlinearity configuration; in critical mode the exponential rate
    is recomputed from the derived constants, never stored stale."""

    mp: ModelParams
    dp: DerivedParams
    mode: str = "critical"              # "critical" or "explicit"

    def __post_init__(self):
        if self.mode not in ("critical", "explicit"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def varrho(self) -> float:
        return self.dp.rho_crit if self.mode == "critical" else self.mp.varrho

    def gamma(self, t: float) -> float:
        return gamma_factor(t, self.mp, varrho=self.varrho)

    def source(self, t: float, v: np.ndarray, lp_integral: float) -> np.ndarray:
        """f(t, v) given the current value of int |v|^p."""
        return (self.gamma(t) * lp_integral ** self.mp.beta
                * np.abs(v) ** self.mp.p)


@dataclass
class LifespanRecord:
    epsilon: float
    t_blowup: float                     # math.inf when the horizon was reached
    detection: str                      # cap | picard-divergence | step-collapse | horizon
    cap_used: float
    solver: str                         # fd-radial | duhamel-1d
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.t_blowup <= 0.0:
            raise ValueError("blow-up time must be positive")
        if self.detection == "cap" and \
                self.diagnostics.get("max_abs_v", math.inf) < self.cap_used:
            raise ValueError("cap detection requires the field to reach the cap")


@dataclass
class SolutionHistory:
    """Uniformly recorded run: field frames plus the tracked functionals."""

    ts: np.ndarray
    xs: np.ndarray                      # radii for the radial solver
    frames: np.ndarray
    V: np.ndarray
    lp_p: np.ndarray                    # int |v|^p at the record times
    n: int
    mp: ModelParams
    nl: NonlinearTerm | None
    epsilon: float

    def frame_at(self, t: float) -> np.ndarray:
        return self.frames[int(np.argmin(np.abs(self.ts - t)))]


def regime_flags(mp: ModelParams, dp: DerivedParams, nl: NonlinearTerm) -> dict:
    """Metadata logged on every run; violating the regime is allowed."""
    return {
        "hypothesis_n_half_minus_nu": hypothesis_condition(mp, dp),
        "critical_mode": nl.mode == "critical",
        "varrho_used": nl.varrho,
        "rho_crit": dp.rho_crit,
        "varsigma": mp.varsigma,
        "varsigma_above_critical": mp.varsigma > dp.sigma_crit,
    }


def default_horizon(mp: ModelParams, dp: DerivedParams, epsilon: float) -> float:
    """Bounded-runtime default: 4 * A^-1 applied to the predicted
    threshold-crossing scale of eps (a heuristic, not a bound)."""
    from .iteration import IterationConfig, L_and_T0
    try:
        cfg = IterationConfig(mp=mp, dp=dp)
        _, t0 = L_and_T0(1.0, epsilon, cfg)
    except ValueError:
        t0 = 1.0 / max(epsilon, 1e-12)
    return max(2.0, 4.0 * amplitude_inv(t0, mp))


def radial_lp_integral(v: np.ndarray, rs: np.ndarray, p: float, n: int) -> float:
    """int_{R^n} |v|^p = omega_n * int |v|^p r^(n-1) dr for radial v."""
    return sphere_area(n) * float(np.trapezoid(np.abs(v) ** p * rs ** (n - 1), rs))


def radial_average(v: np.ndarray, rs: np.ndarray, n: int) -> float:
    return sphere_area(n) * float(np.trapezoid(v * rs ** (n - 1), rs))


def fd_radial_solve(v0: RadialProfile | None, v1: RadialProfile | None,
                    nl: NonlinearTerm, epsilon: float, t_horizon: float,
                    dx: float, cap: float | None = None, cfl: float = 0.5,
                    n_frames: int = 601,
                    max_steps: int = 5_000_000) -> tuple[SolutionHistory, LifespanRecord]:
    """Radial leapfrog solve of the semilinear problem for n >= 1.

    The radial Laplacian v'' + (n-1) v'/r uses the regularity condition
    v'(0) = 0 (even extension at the origin).  Blow-up is detected when
    max |v| reaches the cap (default 1e6 times the initial peak) or the
    field stops being finite; reaching the horizon records an infinite
    sentinel instead.
    """
    mp, dp = nl.mp, nl.dp
    n = mp.n
    R0 = mp.R if v0 is None else v0.support_radius

    def sample(prof, rs):
        if prof is None:
            return np.zeros_like(rs)
        return prof(rs)

    r_max = R0 + amplitude(t_horizon, mp) + 6.0 * dx
    rs = np.arange(0.0, r_max + dx, dx)
    dt = cfl * dx / (mp.c * math.exp(mp.H * t_horizon))
    n_steps = max(2, int(math.ceil(t_horizon / dt)))
    if n_steps > max_steps:
        raise ValueError(
            f"horizon needs {n_steps} steps > max_steps={max_steps}; "
            "shorten t_horizon or coarsen dx")
    dt = t_horizon / n_steps
    record_every = max(1, n_steps // max(n_frames - 1, 1))

    if v0 is None and v1 is None:
        raise ValueError("at least one datum is required")
    v_prev = epsilon * sample(v0, rs)
    v1_vals = epsilon * sample(v1, rs)
    peak0 = max(float(np.max(np.abs(v_prev))), float(np.max(np.abs(v1_vals))), 1e-300)
    cap_used = 1e6 * peak0 if cap is None else cap
    c2 = mp.c * mp.c
    inv_dx2 = 1.0 / (dx * dx)

    def lap(v):
        out = np.empty_like(v)
        out[1:-1] = ((v[2:] - 2.0 * v[1:-1] + v[:-2]) * inv_dx2
                     + (n - 1.0) * (v[2:] - v[:-2]) / (2.0 * dx * rs[1:-1]))
        out[0] = 2.0 * n * (v[1] - v[0]) * inv_dx2
        out[-1] = 0.0
        return out

    def record(t, v, lp):
        times.append(t)
        frames.append(v.copy())
        vs.append(radial_average(v, rs, n))
        lps.append(lp)

    times, frames, vs, lps = [], [], [], []
    lp0 = radial_lp_integral(v_prev, rs, mp.p, n)
    record(0.0, v_prev, lp0)
    f0 = nl.source(0.0, v_prev, lp0)
    v_curr = (v_prev + dt * v1_vals
              + 0.5 * dt * dt * (c2 * lap(v_prev) - mp.b * v1_vals
                                 - mp.m2 * v_prev + f0))
    if record_every == 1:
        record(dt, v_curr, radial_lp_integral(v_curr, rs, mp.p, n))
    denom = 1.0 + 0.5 * mp.b * dt
    detection, t_blow = "horizon", math.inf
    t_cap = math.inf
    t_v_blow = math.inf
    max_abs = peak0
    steps_done = n_steps
    for k in range(1, n_steps):
        t_k = k * dt
        lp_k = radial_lp_integral(v_curr, rs, mp.p, n)
        f_k = nl.source(t_k, v_curr, lp_k)
        speed2 = c2 * math.exp(2.0 * mp.H * t_k)
        v_next = ((2.0 - mp.m2 * dt * dt) * v_curr
                  - (1.0 - 0.5 * mp.b * dt) * v_prev
                  + dt * dt * (speed2 * lap(v_curr) + f_k)) / denom
        t_next = (k + 1) * dt
        v_next[rs > R0 + amplitude(t_next, mp) + dx] = 0.0
        peak = float(np.max(np.abs(v_next)))
        max_abs = max(max_abs, min(peak, cap_used) if math.isfinite(peak) else max_abs)
        if not math.isfinite(peak):
            detection, t_blow = "step-collapse", t_next
            steps_done = k + 1
            break
        if math.isinf(t_v_blow) and abs(radial_average(v_next, rs, n)) >= cap_used:
            t_v_blow = t_next
        if peak >= cap_used:
            max_abs = max(max_abs, peak)
            detection, t_blow = "cap", t_next
            t_cap = t_next
            steps_done = k + 1
            lp_n = radial_lp_integral(v_next, rs, mp.p, n)
            record(t_next, v_next, lp_n)
            break
        v_prev, v_curr = v_curr, v_next
        if (k + 1) % record_every == 0 or k == n_steps - 1:
            record(t_next, v_next, radial_lp_integral(v_next, rs, mp.p, n))
    hist = SolutionHistory(ts=np.array(times), xs=rs, frames=np.array(frames),
                           V=np.array(vs), lp_p=np.array(lps), n=n, mp=mp,
                           nl=nl, epsilon=epsilon)
    rec = LifespanRecord(
        epsilon=epsilon, t_blowup=t_blow, detection=detection,
        cap_used=cap_used, solver="fd-radial",
        diagnostics={"steps": steps_done, "dt": dt, "dx": dx,
                     "max_abs_v": max_abs, "max_V": float(np.max(np.abs(hist.V))),
                     "t_cap": t_cap, "t_V_blowup": t_v_blow,
                     **regime_flags(mp, dp, nl)})
    return hist, rec


def _lin_part_on_grid(t: float, xs: np.ndarray, data: CauchyData1D,
                      epsilon: float, mp: ModelParams, dp: DerivedParams,
                      panels_per_unit: float = 2.0) -> np.ndarray:
    """Data part of the representation formula on a whole x grid.

    The kernel integrals are correlations int K(u) v(x - u) du over the
    fixed interval [-A(t), A(t)], so kernel values are shared by all x."""
    At = amplitude(t, mp)
    out = 0.5 * math.exp(-0.5 * (mp.b + mp.H) * t) \
        * (data.v0(xs + At) + data.v0(xs - At))
    if At > 0.0:
        n_pan = max(4, int(math.ceil(2.0 * At / min(data.support_radius, At)
                                     * panels_per_unit)))
        n_pan = min(n_pan, 64)
        edges = np.linspace(-At, At, n_pan + 1)
        gl_x, gl_w = quadrature.gl_nodes()
        half = 0.5 * (edges[1] - edges[0])
        mids = 0.5 * (edges[:-1] + edges[1:])
        u = (mids[:, None] + half * gl_x[None, :]).ravel()
        w = np.tile(half * gl_w, n_pan)
        k0 = kernel_K0_grid(t, u, mp, dp)
        k1 = kernel_K1_grid(t, u, mp, dp)
        # query points (n_x, n_u)
        pts = xs[:, None] - u[None, :]
        v0q = data.v0(pts.ravel()).reshape(pts.shape)
        v1q = data.v1(pts.ravel()).reshape(pts.shape)
        out += v0q @ (w * k0) + v1q @ (w * k1)
    return epsilon * out


def _source_integral(t: float, xs: np.ndarray, f_of_s, s_lo: float, s_hi: float,
                     mp: ModelParams, dp: DerivedParams,
                     s_panels_per_unit: float = 2.0,
                     u_points: int = 48) -> np.ndarray:
    """int_{s_lo}^{s_hi} int E(t, s, x - z) f(s, z) dz ds on the x grid.

    f_of_s(s) must return the source frame on the xs grid; it is sampled
    at Gauss nodes in s and linearly interpolated in x at the shifted
    quadrature points.
    """
    if s_hi <= s_lo:
        return np.zeros_like(xs)
    n_s_pan = max(1, int(math.ceil((s_hi - s_lo) * s_panels_per_unit)))
    gl_x, gl_w = quadrature.gl_nodes()
    acc = np.zeros_like(xs)
    for ip in range(n_s_pan):
        a = s_lo + (s_hi - s_lo) * ip / n_s_pan
        b = s_lo + (s_hi - s_lo) * (ip + 1) / n_s_pan
        half = 0.5 * (b - a)
        for node, wgt in zip(a + half * (gl_x + 1.0), half * gl_w):
            w_cone = amplitude(t, mp) - amplitude(node, mp)
            if w_cone <= 0.0:
                continue
            n_u_pan = max(2, min(24, int(math.ceil(
                2.0 * w_cone / max(mp.R, 1e-6) / 4.0))))
            ue = np.linspace(-w_cone, w_cone, n_u_pan + 1)
            uh = 0.5 * (ue[1] - ue[0])
            um = 0.5 * (ue[:-1] + ue[1:])
            n_gl = max(8, u_points // n_u_pan)
            gx, gw = quadrature.gl_nodes(min(16, n_gl))
            u = (um[:, None] + uh * gx[None, :]).ravel()
            uw = np.tile(uh * gw, n_u_pan)
            ker = kernel_E_grid(t, node, u, mp, dp)
            f_frame = f_of_s(node)
            pts = xs[:, None] - u[None, :]
            fq = np.interp(pts.ravel(), xs, f_frame, left=0.0, right=0.0) \
                .reshape(pts.shape)
            acc += wgt * (fq @ (uw * ker))
    return acc


def duhamel_solve_1d(data: CauchyData1D, nl: NonlinearTerm, epsilon: float,
                     t_horizon: float, slab: float = 0.1, tol: float = 1e-6,
                     dx: float | None = None, cap: float | None = None,
                     max_iters: int = 50,
                     max_halvings: int = 6) -> tuple[SolutionHistory, LifespanRecord]:
    """Slab-wise Picard iteration of v = (linear part) + int E f(., v).

    Each slab endpoint is solved by iterating the source integral with
    the history frozen up to the slab start; divergence triggers up to
    six slab halvings, after which blow-up is declared at the slab start
    (the equation, not the scheme, is the cause in this regime).
    """
    if nl.mp.n != 1:
        raise ValueError("the integral solver is one-dimensional")
    mp, dp = nl.mp, nl.dp
    R0 = data.support_radius
    dx = R0 / 32.0 if dx is None else dx
    x_max = R0 + amplitude(t_horizon, mp) + 4.0 * dx
    n_half = int(math.ceil(x_max / dx))
    xs = np.arange(-n_half, n_half + 1) * dx

    v_frame = epsilon * data.v0(xs)
    peak0 = max(float(np.max(np.abs(v_frame))),
                epsilon * float(np.max(np.abs(data.v1.values))), 1e-300)
    cap_used = 1e6 * peak0 if cap is None else cap

    def lp_of(v):
        return float(np.trapezoid(np.abs(v) ** mp.p, xs))

    def f_frame_of(t, v):
        return nl.source(t, v, lp_of(v))

    times = [0.0]
    frames = [v_frame.copy()]
    f_frames = [f_frame_of(0.0, v_frame)]

    def f_interp(s):
        i = int(np.searchsorted(times, s))
        if i <= 0:
            return f_frames[0]
        if i >= len(times):
            return f_frames[-1]
        t0, t1 = times[i - 1], times[i]
        w = (s - t0) / (t1 - t0)
        return (1.0 - w) * f_frames[i - 1] + w * f_frames[i]

    detection, t_blow = "horizon", math.inf
    t_cap, t_div = math.inf, math.inf
    max_abs = peak0
    iters_total = 0
    t_now = 0.0
    while t_now < t_horizon - 1e-12:
        dt_slab = min(slab, t_horizon - t_now)
        halvings = 0
        advanced = False
        while True:
            t_new = t_now + dt_slab
            lin = _lin_part_on_grid(t_new, xs, data, epsilon, mp, dp)
            frozen = _source_integral(t_new, xs, f_interp, 0.0, t_now, mp, dp)
            v_it = frames[-1].copy()
            prev_change = math.inf
            diverged = False
            for it in range(max_iters):
                iters_total += 1
                f_new = f_frame_of(t_new, v_it)

                def f_slab(s):
                    w = (s - t_now) / (t_new - t_now)
                    return (1.0 - w) * f_frames[-1] + w * f_new

                v_next = lin + frozen + _source_integral(
                    t_new, xs, f_slab, t_now, t_new, mp, dp)
                change = float(np.max(np.abs(v_next - v_it)))
                v_it = v_next
                if not np.all(np.isfinite(v_it)) or \
                        float(np.max(np.abs(v_it))) > 1e3 * cap_used:
                    diverged = True
                    break
                if change <= tol * max(float(np.max(np.abs(v_it))), peak0):
                    break
                if change > prev_change and it >= 3:
                    diverged = True
                    break
                prev_change = change
            else:
                diverged = True
            if not diverged:
                advanced = True
                break
            halvings += 1
            if halvings > max_halvings:
                break
            dt_slab *= 0.5
        if not advanced:
            detection, t_blow = "picard-divergence", max(t_now, 1e-12)
            t_div = t_blow
            break
        t_now = t_now + dt_slab
        times.append(t_now)
        frames.append(v_it.copy())
        f_frames.append(f_frame_of(t_now, v_it))
        peak = float(np.max(np.abs(v_it)))
        max_abs = max(max_abs, peak)
        if peak >= cap_used and math.isinf(t_cap):
            t_cap = t_now
            if math.isinf(t_blow):
                detection, t_blow = "cap", t_now
                break
    ts = np.array(times)
    vals = np.array(frames)
    hist = SolutionHistory(
        ts=ts, xs=xs, frames=vals,
        V=np.trapezoid(vals, xs, axis=1),
        lp_p=np.array([lp_of(f) for f in vals]),
        n=1, mp=mp, nl=nl, epsilon=epsilon)
    rec = LifespanRecord(
        epsilon=epsilon, t_blowup=t_blow, detection=detection,
        cap_used=cap_used, solver="duhamel-1d",
        diagnostics={"picard_iterations": iters_total, "slab": slab,
                     "max_abs_v": max_abs, "max_V": float(np.max(np.abs(hist.V))),
                     "t_cap": t_cap, "t_divergence": t_div,
                     **regime_flags(mp, dp, nl)})
    return hist, rec


def track_functionals(history: SolutionHistory) -> dict:
    """Time series of V, int |v|^p, and the defect of the averaged identity

        V'' + b V' + m2 V = gamma(t) (int |v|^p)^(beta+1),

    differenced on the recorded grid.  The relative residual uses the
    larger of the two sides as the scale."""
    ts, V, lp = history.ts, history.V, history.lp_p
    mp, nl = history.mp, history.nl
    if len(ts) < 5:
        raise ValueError("history too short to difference")
    dt = np.diff(ts)
    # uniform records required for clean second differences
    core = np.abs(dt - dt[0]) < 1e-9 * max(dt[0], 1e-300)
    m = int(np.argmin(core)) if not np.all(core) else len(ts) - 1
    h = dt[0]
    idx = np.arange(1, m)
    Vpp = (V[idx + 1] - 2.0 * V[idx] + V[idx - 1]) / (h * h)
    Vp = (V[idx + 1] - V[idx - 1]) / (2.0 * h)
    lhs = Vpp + mp.b * Vp + mp.m2 * V[idx]
    rhs = np.array([nl.gamma(ts[i]) * lp[i] ** (mp.beta + 1.0) for i in idx])
    scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1e-300)
    return {"ts": ts[idx], "V": V[idx], "lp_p": lp[idx],
            "lhs": lhs, "rhs": rhs,
            "relative_residual": np.abs(lhs - rhs) / scale}


def support_violation_radial(history: SolutionHistory, pad_cells: int = 2) -> float:
    """Largest |v| beyond B_(R + A(t)) + pad, relative to the run peak."""
    rs = history.xs
    dx = rs[1] - rs[0]
    peak = float(np.max(np.abs(history.frames)))
    if peak == 0.0:
        return 0.0
    worst = 0.0
    for i, t in enumerate(history.ts):
        edge = history.mp.R + amplitude(t, history.mp) + pad_cells * dx
        outside = rs > edge
        if np.any(outside):
            worst = max(worst, float(np.max(np.abs(history.frames[i][outside]))))
    return worst / peak
