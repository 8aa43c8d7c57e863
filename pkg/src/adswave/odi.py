"""Kato-type comparison machinery for second-order differential
inequalities with critically tuned exponential forcing.

The model problem is

    G'' + b G' + m2 G  >=  B (1+t)^l0 e^(k0 t) |G|^q,      t >= 0,
    G(t) >= K (1+t)^l1 e^(k1 t)                            t >= T0,
    G(0), G'(0) >= 0,   alpha1 G(0) + G'(0) > 0,

with alpha1 >= alpha2 the roots of alpha^2 - b alpha + m2 = 0 and the
critical tuning k0 + (q-1) k1 = 0.  The exponential variant is l0 = l1
= 0; the polynomial variant requires l0 < 0 and l0 + (q-1) l1 >= 0.
Whenever K exceeds the explicit threshold K0 the lifespan of G is
finite and bounded by 2*T1; this module computes the thresholds and
verifies the bound by integrating the extremal (equality) instance with
an embedded Runge-Kutta 4(5) scheme that detects blow-up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BLOWUP_VALUE = 1e12
MIN_STEP_FRACTION = 1e-14
BALANCED_TOL = 1e-12


@dataclass(frozen=True)
class OdiProblem:
    """One differential-inequality instance.

    l0 = l1 = 0 selects the exponential variant.  ``K`` and ``T0``
    describe the assumed lower bound; ``B`` the forcing constant.
    """

    b: float
    m2: float
    q: float
    k0: float
    k1: float
    B: float
    K: float
    T0: float
    G0: float
    G0p: float
    l0: float = 0.0
    l1: float = 0.0

    def __post_init__(self):
        bad = []
        if not (self.b >= 0 and self.m2 >= 0 and self.b ** 2 >= 4 * self.m2):
            bad.append(f"b>=0, m2>=0, b^2>=4*m2 violated (b={self.b}, m2={self.m2})")
        if not self.q > 1:
            bad.append(f"q > 1 violated (q={self.q})")
        if abs(self.k0 + (self.q - 1.0) * self.k1) > 1e-12 * max(1.0, abs(self.k0)):
            bad.append(f"k0 + (q-1)k1 = 0 violated (k0={self.k0}, k1={self.k1})")
        a1 = self.alpha1
        if self.k1 + a1 < -1e-12:
            bad.append(f"k1 + alpha1 >= 0 violated (k1={self.k1}, alpha1={a1})")
        if not (self.G0 >= 0 and self.G0p >= 0 and a1 * self.G0 + self.G0p > 0):
            bad.append("initial signs violated: need G0, G0p >= 0 and "
                       f"alpha1*G0 + G0p > 0 (G0={self.G0}, G0p={self.G0p})")
        if not (self.B > 0 and self.K > 0 and self.T0 >= 0):
            bad.append(f"B, K > 0 and T0 >= 0 violated (B={self.B}, K={self.K}, T0={self.T0})")
        if self.polynomial:
            if not self.l0 < 0:
                bad.append(f"polynomial variant needs l0 < 0 (l0={self.l0})")
            if self.l0 + (self.q - 1.0) * self.l1 < 0:
                bad.append(f"l0 + (q-1)l1 >= 0 violated (l0={self.l0}, l1={self.l1})")
        if self.balanced_branch and self.T0 <= 0:
            bad.append("k1 + alpha1 = 0 requires T0 > 0 (kappa must lie in (0, T0))")
        if bad:
            raise ValueError("invalid ODI problem: " + "; ".join(bad))

    @property
    def alpha1(self) -> float:
        return 0.5 * (self.b + math.sqrt(self.b ** 2 - 4.0 * self.m2))

    @property
    def alpha2(self) -> float:
        return 0.5 * (self.b - math.sqrt(self.b ** 2 - 4.0 * self.m2))

    @property
    def polynomial(self) -> bool:
        return not (self.l0 == 0.0 and self.l1 == 0.0)

    @property
    def balanced_branch(self) -> bool:
        """True on the k1 + alpha1 = 0 branch (only sensible when b^2 = 4 m2)."""
        return abs(self.k1 + self.alpha1) <= BALANCED_TOL

    @property
    def outside_normalized_regime(self) -> bool:
        """k1 < -alpha2 lies outside the normalization the bound sharpens in."""
        return self.k1 < -self.alpha2 - 1e-12

    def forcing(self, t: float, g: float) -> float:
        return (self.B * (1.0 + t) ** self.l0
                * math.exp(self.k0 * t) * abs(g) ** self.q)

    def lower_bound(self, t: float) -> float:
        return self.K * (1.0 + t) ** self.l1 * math.exp(self.k1 * t)

    def lower_bound_deriv(self, t: float) -> float:
        return self.lower_bound(t) * (self.k1 + self.l1 / (1.0 + t))


@dataclass(frozen=True)
class OdiVerdict:
    T_tilde0: float
    T1: float
    K0_threshold: float
    theta_used: float
    kappa_used: float | None
    blowup_time: float                 # math.inf when no blow-up was seen
    bound_satisfied: bool
    seed_path: str = ""                # how the lower bound was realized
    B_used: float = 0.0


def t_tilde0(problem: OdiProblem) -> float:
    """Time by which the comparison function has doubled its start value."""
    a1, a2 = problem.alpha1, problem.alpha2
    g0, g0p = problem.G0, problem.G0p
    if problem.b ** 2 > 4.0 * problem.m2:
        return math.log1p((a1 - a2) * g0 / (a1 * g0 + g0p)) / (a1 - a2)
    return g0 / (0.5 * problem.b * g0 + g0p)


def default_theta(problem: OdiProblem) -> float:
    theta = 0.25 * (problem.q - 1.0)
    if problem.polynomial and problem.l1 > 0:
        theta = min(theta, (problem.l0 + (problem.q - 1.0) * problem.l1)
                    / (2.0 * problem.l1))
    return theta


def threshold_constants(problem: OdiProblem, theta: float | None = None,
                        kappa: float | None = None) -> tuple[float, float]:
    """The time bound T1 and the threshold constant K0 of the lemma.

    theta must lie in (0, (q-1)/2) (and respect 2*theta*l1 <= l0+(q-1)l1
    in the polynomial variant); kappa in (0, T0) is only consumed on the
    balanced branch k1 + alpha1 = 0.
    """
    q = problem.q
    theta = default_theta(problem) if theta is None else theta
    if not 0.0 < theta < 0.5 * (q - 1.0):
        raise ValueError(f"theta must lie in (0, (q-1)/2), got {theta}")
    if problem.polynomial and problem.l1 > 0:
        if 2.0 * theta * problem.l1 > problem.l0 + (q - 1.0) * problem.l1 + 1e-15:
            raise ValueError(
                f"theta violates 2*theta*l1 <= l0 + (q-1)*l1 (theta={theta})")
    tt0 = t_tilde0(problem)
    rate = problem.k1 + problem.alpha1
    if problem.balanced_branch:
        kappa = 0.5 * problem.T0 if kappa is None else kappa
        if not 0.0 < kappa < problem.T0:
            raise ValueError(f"kappa must lie in (0, T0), got {kappa}")
        T1 = max(problem.T0, tt0)
        K0 = ((q + 1.0) / problem.B) ** (1.0 / (q - 1.0)) \
            * (kappa * theta) ** (-2.0 / (q - 1.0))
    else:
        T1 = max(problem.T0, tt0, 1.0 / rate)
        K0 = ((q + 1.0) / problem.B) ** (1.0 / (q - 1.0)) \
            * (rate / (1.0 - math.exp(-theta))) ** (2.0 / (q - 1.0))
    return T1, K0


def g_lin(t: float, problem: OdiProblem) -> float:
    """Closed-form lower bound from the linear part alone.

    Distinct roots:  (a1 e^(-a2 t) - a2 e^(-a1 t))/(a1-a2) G0
                     + (e^(-a2 t) - e^(-a1 t))/(a1-a2) G0',
    equal roots:     (1 + b t/2) e^(-b t/2) G0 + t e^(-b t/2) G0'.
    """
    a1, a2 = problem.alpha1, problem.alpha2
    g0, g0p = problem.G0, problem.G0p
    if a1 - a2 > 1e-14 * max(a1, 1.0):
        return ((a1 * math.exp(-a2 * t) - a2 * math.exp(-a1 * t)) / (a1 - a2) * g0
                + (math.exp(-a2 * t) - math.exp(-a1 * t)) / (a1 - a2) * g0p)
    half_b = 0.5 * problem.b
    return ((1.0 + half_b * t) * math.exp(-half_b * t) * g0
            + t * math.exp(-half_b * t) * g0p)


# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                   -92097 / 339200, 187 / 2100, 1 / 40])


@dataclass
class OdiTrajectory:
    ts: np.ndarray
    Gs: np.ndarray
    Gps: np.ndarray
    blowup_time: float                 # math.inf if the horizon was reached
    blowup_reason: str                 # "", "value", "step-collapse"


def integrate_odi(problem: OdiProblem, t_max: float,
                  equality_mode: bool = True,
                  t_start: float = 0.0,
                  y_start: tuple[float, float] | None = None,
                  rtol: float = 1e-9, atol: float = 1e-12) -> OdiTrajectory:
    """Integrate the extremal (equality) instance of the inequality.

    With equality_mode=False the forcing is dropped, which reproduces the
    linear comparison trajectory.  Blow-up is declared when |G| exceeds
    1e12 or the adaptive step collapses below 1e-14 * t_max.
    """
    if t_max <= t_start:
        raise ValueError("t_max must exceed t_start")
    t = t_start
    y = np.array([problem.G0, problem.G0p] if y_start is None else y_start,
                 dtype=float)

    def rhs(tt, yy):
        g, gp = yy
        f = problem.forcing(tt, g) if equality_mode else 0.0
        return np.array([gp, f - problem.b * gp - problem.m2 * g])

    ts, gs, gps = [t], [y[0]], [y[1]]
    h = min(1e-3 * (t_max - t_start), 1e-3)
    min_step = MIN_STEP_FRACTION * t_max
    blow_t, reason = math.inf, ""
    k = np.zeros((7, 2))
    while t < t_max:
        h = min(h, t_max - t)
        k[0] = rhs(t, y)
        for i in range(1, 7):
            acc = np.zeros(2)
            for j, a in enumerate(_DP_A[i]):
                acc += a * k[j]
            k[i] = rhs(t + _DP_C[i] * h, y + h * acc)
        y5 = y + h * (_DP_B5 @ k)
        y4 = y + h * (_DP_B4 @ k)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = math.sqrt(float(np.mean(((y5 - y4) / scale) ** 2)))
        if not np.isfinite(err):
            err = 2.0
        if err <= 1.0:
            t += h
            y = y5
            ts.append(t)
            gs.append(y[0])
            gps.append(y[1])
            if abs(y[0]) >= BLOWUP_VALUE:
                blow_t, reason = t, "value"
                break
        h *= min(5.0, max(0.2, 0.9 * (max(err, 1e-10)) ** -0.2))
        if h < min_step:
            blow_t, reason = t, "step-collapse"
            break
    return OdiTrajectory(ts=np.array(ts), Gs=np.array(gs), Gps=np.array(gps),
                         blowup_time=blow_t, blowup_reason=reason)


def verify_lemma(problem: OdiProblem, theta: float | None = None,
                 kappa: float | None = None,
                 rescale_limit: int = 20) -> OdiVerdict:
    """Realize the lower-bound hypothesis and check the 2*T1 bound.

    First the equality instance is integrated from t = 0 with the given
    initial values.  If it reaches the required bound at T0 the run
    simply continues; otherwise the forcing constant B is doubled (up to
    2^rescale_limit, which lowers the threshold K0, never raising it)
    until the bound is met; if that too fails, the integration restarts
    at T0 with data placed exactly on the lower bound.
    """
    theta = default_theta(problem) if theta is None else theta
    if problem.balanced_branch and kappa is None:
        kappa = 0.5 * problem.T0
    T1, K0 = threshold_constants(problem, theta, kappa)
    tt0 = t_tilde0(problem)
    horizon = 2.0 * T1 * 1.05 + 1e-6
    target = problem.lower_bound(problem.T0)

    seed_path, b_used = "direct", problem.B
    traj = integrate_odi(problem, max(problem.T0, 1e-9), equality_mode=True)
    if traj.blowup_time <= problem.T0:
        # already gone before the bound onset; lifespan trivially <= 2 T1
        blow = traj.blowup_time
        seed_path = "pre-onset-blowup"
        return OdiVerdict(T_tilde0=tt0, T1=T1, K0_threshold=K0,
                          theta_used=theta, kappa_used=kappa,
                          blowup_time=blow, bound_satisfied=blow <= 2.0 * T1,
                          seed_path=seed_path, B_used=b_used)
    if traj.Gs[-1] < target:
        reached = False
        scaled = problem
        for _ in range(rescale_limit):
            scaled = _with_B(scaled, 2.0 * scaled.B)
            traj = integrate_odi(scaled, max(problem.T0, 1e-9), equality_mode=True)
            if traj.blowup_time <= problem.T0 or traj.Gs[-1] >= target:
                reached = True
                break
        if reached:
            seed_path, b_used = "rescaled-B", scaled.B
            problem = scaled
            T1, K0 = threshold_constants(problem, theta, kappa)
        else:
            seed_path, b_used = "restart", problem.B
    if seed_path == "restart":
        y0 = (problem.lower_bound(problem.T0), problem.lower_bound_deriv(problem.T0))
        tail = integrate_odi(problem, horizon, t_start=problem.T0, y_start=y0)
    else:
        if traj.blowup_time < math.inf:
            tail = traj
        else:
            tail = integrate_odi(problem, horizon, t_start=traj.ts[-1],
                                 y_start=(traj.Gs[-1], traj.Gps[-1]))
    blow = tail.blowup_time
    return OdiVerdict(T_tilde0=tt0, T1=T1, K0_threshold=K0, theta_used=theta,
                      kappa_used=kappa, blowup_time=blow,
                      bound_satisfied=blow <= 2.0 * T1,
                      seed_path=seed_path, B_used=b_used)


def _with_B(problem: OdiProblem, new_b: float) -> OdiProblem:
    return OdiProblem(b=problem.b, m2=problem.m2, q=problem.q, k0=problem.k0,
                      k1=problem.k1, B=new_b, K=problem.K, T0=problem.T0,
                      G0=problem.G0, G0p=problem.G0p, l0=problem.l0,
                      l1=problem.l1)
