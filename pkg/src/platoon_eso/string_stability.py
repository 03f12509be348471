"""Spacing-error propagation transfer functions and string-stability tests.

``G_ei(s) = E_i(s) / E_{i-1}(s)`` is built from the relative-velocity map
``H(s) = V_{d,i}(s) / E_i(s)`` as ``(s - H) / (s - (hs + 1) H)``. Coefficient
vectors are stored in ascending powers of ``s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.linalg import expm, matrix_balance
from scipy.optimize import minimize_scalar

from .certify import Check, routh_stable
from .errors import DenominatorVanishes, NotStable, SingularAtOmega

HINF_TOL = 1e-9
OMEGA_WINDOW = (1e-3, 1e5)


@dataclass(frozen=True)
class RationalTransferFunction:
    num: np.ndarray  # ascending powers
    den: np.ndarray
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "num", np.trim_zeros(np.asarray(self.num, dtype=float), "b"))
        object.__setattr__(self, "den", np.trim_zeros(np.asarray(self.den, dtype=float), "b"))
        if self.den.size == 0:
            raise ValueError("denominator is identically zero")

    @property
    def is_proper(self) -> bool:
        return len(self.den) >= len(self.num)

    @property
    def is_strictly_proper(self) -> bool:
        return len(self.den) > len(self.num)

    def dc_gain(self) -> float:
        return float(self.num[0] / self.den[0]) if self.num.size else 0.0

    def __call__(self, s):
        """Direct complex evaluation ``num(s) / den(s)``."""
        return P.polyval(s, self.num) / P.polyval(s, self.den)

    def magnitude(self, omega):
        return gei_magnitude(self, omega)

    def normalized(self):
        """Same response with a monic denominator."""
        lead = self.den[-1]
        return RationalTransferFunction(self.num / lead, self.den / lead, self.name)


def _tf(num, den, name):
    return RationalTransferFunction(np.array(num, dtype=float), np.array(den, dtype=float), name)


# --------------------------------------------------- coefficient tables ----

def gei_coefficients(gains, eso_gains, h, tau) -> RationalTransferFunction:
    """Nominal spacing-error propagation ``G_ei`` (num degree 4, den degree 6)."""
    kp, kv, ka = gains.kp, gains.kv, gains.ka
    b1, b2, b3 = eso_gains.as_tuple()
    num = [kp * b3, kp * b2 + kv * b3, kp * b1 + kv * b2 + ka * b3, kv * b1 + ka * b2 + kp, kv]
    den = [
        kp * b3,
        kp * b2 + (kp * h + kv) * b3,
        kp * b1 + (kp * h + kv) * b2 + (1 + kv * h) * b3,
        (kp * h + kv) * b1 + (1 + kv * h) * b2 + tau * b3 + kp,
        (1 + kv * h) * b1 + tau * b2 + kp * h + kv,
        tau * b1 + kv * h + 1,
        tau,
    ]
    return _tf(num, den, "G_e")


def gei_coefficients_uncertain(gains, eso_gains, h, tau, b_i) -> RationalTransferFunction:
    """``G_ei`` for a follower whose true lag pole is ``b_i`` (monic denominator)."""
    if not b_i > 0:
        raise ValueError("b_i must be positive")
    kp, kv, ka = gains.kp, gains.kv, gains.ka
    b1, b2, b3 = eso_gains.as_tuple()
    b = b_i
    num = [b * kp * b3, b * kp * b2 + b * kv * b3, b * kp * b1 + b * kv * b2 + b * ka * b3,
           b * kv * b1 + b * ka * b2 + b * kp, b * kv]
    den = [
        b * kp * b3,
        b * kp * b2 + (b * kp * h + b * kv) * b3,
        b * kp * b1 + (b * kp * h + b * kv) * b2 + (b + b * kv * h) * b3,
        (b * kp * h + b * kv) * b1 + (b + b * kv * h) * b2 + b3 + b * kp,
        (ka / tau - b * ka + b + b * kv * h) * b1 + b2 + b * kp * h + b * kv,
        b1 + ka / tau - b * ka + b + b * kv * h,
        1.0,
    ]
    return _tf(num, den, "G_e(b)")


def h_coefficients(gains, eso_gains, h, tau, b_i=None) -> RationalTransferFunction:
    """Relative-velocity to spacing-error map ``H = V_d / E``.

    Nominal form has leading coefficient ``tau``; with ``b_i`` the monic
    uncertain-plant form is returned.
    """
    kp, kv, ka = gains.kp, gains.kv, gains.ka
    b1, b2, b3 = eso_gains.as_tuple()
    if b_i is None:
        num = [kp * h * b3, kp * h * b2 + (1 - ka + kv * h) * b3,
               kp * h * b1 + (1 - ka + kv * h) * b2 + tau * b3,
               kp * h + (1 + kv * h) * b1 + tau * b2, 1 + kv * h + tau * b1, tau]
        den = [(1 - ka) * b3, (1 - ka) * b2 + (tau - ka * h) * b3,
               b1 + (tau - ka * h) * b2, tau * b1 + 1, tau]
        return _tf(num, den, "H")
    b = b_i
    c = b - b * ka + b * kv * h
    num = [b * kp * h * b3, b * kp * h * b2 + c * b3, b * kp * h * b1 + c * b2 + b3,
           b * kp * h + (ka / tau + c) * b1 + b2, ka / tau + c + b1, 1.0]
    den = [(b - b * ka) * b3, (b - b * ka) * b2 + (1 - b * ka * h) * b3,
           (ka / tau - b * ka + b) * b1 + (1 - b * ka * h) * b2, ka / tau - b * ka + b + b1, 1.0]
    return _tf(num, den, "H(b)")


def gei_heterogeneous(gains, eso_gains, h, tau, b_prev, b_i) -> RationalTransferFunction:
    """``E_i / E_{i-1}`` when follower i-1 and i have different true poles.

    Uses ``(s - H_{i-1}) / (s - (hs + 1) H_i)``: the predecessor's relative
    velocity is governed by its own ``H``. With ``b_prev == b_i`` this is
    :func:`gei_coefficients_uncertain`.
    """
    Hp = h_coefficients(gains, eso_gains, h, tau, b_prev)
    Hc = h_coefficients(gains, eso_gains, h, tau, b_i)
    s = np.array([0.0, 1.0])
    top = P.polysub(P.polymul(s, Hp.den), Hp.num)
    bot = P.polysub(P.polymul(s, Hc.den), P.polymul([1.0, h], Hc.num))
    return _tf(P.polymul(top, Hc.den), P.polymul(bot, Hp.den), "G_e(b_prev,b)")


# ---------------------------------------------------------- magnitude ----

def _even_odd(c, omega):
    """``c(jw) = x(w) + j y(w)`` with real even/odd parts."""
    w = np.asarray(omega, dtype=float)
    x = np.zeros_like(w)
    y = np.zeros_like(w)
    for k, ck in enumerate(c):
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            x = x + sign * ck * w**k
        else:
            y = y + sign * ck * w**k
    return x, y


def gei_magnitude(tf: RationalTransferFunction, omega):
    """``|G(jw)|`` from the even/odd split of numerator and denominator."""
    xn, yn = _even_odd(tf.num, omega)
    xd, yd = _even_odd(tf.den, omega)
    dd = np.hypot(xd, yd)
    if np.any(dd == 0):
        raise DenominatorVanishes("denominator vanishes on the imaginary axis")
    out = np.hypot(xn, yn) / dd
    return float(out) if np.ndim(out) == 0 else out


def hinf_sweep(tf, omega_min=OMEGA_WINDOW[0], omega_max=OMEGA_WINDOW[1], points=2000):
    """Peak ``|G(jw)|`` over a log grid, refined around the best grid point.

    Returns ``(max, argmax)``.
    """
    if not 0 < omega_min < omega_max:
        raise ValueError("need 0 < omega_min < omega_max")
    if points < 100:
        raise ValueError("need at least 100 sweep points")
    grid = np.geomspace(omega_min, omega_max, points)
    mag = gei_magnitude(tf, grid)
    k = int(np.argmax(mag))
    best, arg = float(mag[k]), float(grid[k])
    lo, hi = np.log(grid[max(k - 1, 0)]), np.log(grid[min(k + 1, points - 1)])
    if hi > lo:
        res = minimize_scalar(lambda lw: -gei_magnitude(tf, math.exp(lw)), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-10})
        if -res.fun > best:
            best, arg = float(-res.fun), math.exp(res.x)
    return best, arg


def frequency_response_table(tf, omegas):
    """Rows ``(w, |G|, arg G)`` for CSV output."""
    omegas = np.asarray(omegas, dtype=float)
    g = tf(1j * omegas)
    return np.column_stack([omegas, np.abs(g), np.angle(g)])


# -------------------------------------------------- impulse response ----

@dataclass(frozen=True)
class ImpulseResult:
    min_value: float
    t_min: float
    peak: float
    integral: float
    direct: float

    def nonnegative(self, rel_tol=1e-6) -> bool:
        return self.min_value >= -rel_tol * self.peak


def _companion(tf):
    """Controllable canonical ``(A, B, C, D)`` of a proper ``tf``."""
    t = tf.normalized()
    den = t.den
    n = len(den) - 1
    num = np.zeros(n + 1)
    num[:len(t.num)] = t.num
    D = num[n]
    rem = num[:n] - D * den[:n]
    A = np.zeros((n, n))
    A[:-1, 1:] = np.eye(n - 1)
    A[-1] = -den[:n]
    B = np.zeros(n)
    B[-1] = 1.0
    return A, B, rem, D


def impulse_nonneg(tf, horizon=60.0, dt=1e-4, block=2000) -> ImpulseResult:
    """Minimum of the impulse response over ``[0, horizon]``.

    The strictly proper part is propagated exactly on the grid from
    ``x(0) = B``; a direct feed-through contributes only a Dirac at 0 and is
    reported separately.
    """
    if not tf.is_proper:
        raise ValueError("transfer function must be proper")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not routh_stable(tf.den[::-1]):
        raise NotStable("denominator is not Hurwitz")
    A, B, C, D = _companion(tf)
    steps = int(round(horizon / dt))
    step = expm(A * dt)
    # rows C Phi^j, j < block, let whole blocks be evaluated as one product
    rows = np.empty((block, len(B)))
    r = C.copy()
    for j in range(block):
        rows[j] = r
        r = r @ step
    jump = np.linalg.matrix_power(step, block)
    y = np.empty(steps + 1)
    x = B.copy()
    for start in range(0, steps + 1, block):
        m = min(block, steps + 1 - start)
        y[start:start + m] = rows[:m] @ x
        x = jump @ x
    k = int(np.argmin(y))
    t = dt * np.arange(steps + 1)
    return ImpulseResult(float(y[k]), float(t[k]), float(np.max(np.abs(y))),
                         float(np.trapezoid(y, t)), float(D))


# --------------------------------------------------- state-space oracle ----

def freq_response_oracle(M, input_vec, output_vec, omega):
    """``c (jwI - M)^-1 b`` for a square system matrix ``M``."""
    x = _balanced_solve(np.asarray(M, dtype=float), np.asarray(input_vec, dtype=complex), omega)
    return complex(np.asarray(output_vec) @ x)


def _balanced_solve(M, rhs, omega):
    """Solve ``(jwI - M) x = rhs`` after a diagonal balancing of ``M``.

    Balancing keeps the small spacing errors deep in the string accurate at
    high frequency, where the raw system is badly scaled.
    """
    Mb, (scale, _) = matrix_balance(M, permute=False, separate=True)
    Z = 1j * omega * np.eye(M.shape[0]) - Mb
    if np.linalg.cond(Z) > 1e14:
        raise SingularAtOmega(f"jwI - M is singular at w={omega}")
    return scale * np.linalg.solve(Z, rhs / scale)


def leader_forcing(gains, eso_gains, h, tau, epsilons, omega):
    """Error-coordinate forcing per unit leader command at ``s = jw``.

    Returns ``(M, delta)`` with ``W(jw) = (jwI - M)^-1 delta``; ``delta``
    collects the leader-acceleration, command and command-rate channels.
    """
    from .certify import build_closed_loop
    from .realization import closed_loop, error_coordinates

    N = len(epsilons) - 1
    M = build_closed_loop(gains, eso_gains, h, tau, N, epsilons).closed_loop
    lti = closed_loop(gains, eso_gains, h, tau, epsilons)
    T, S = error_coordinates(lti, gains, tau, epsilons)
    idx = lti.index
    L = T @ lti.A - M @ T
    s = 1j * omega
    b0 = 1.0 / tau + epsilons[0]
    a0 = b0 / (s + b0)
    delta = L[:, idx.a(0)] * a0 + (T @ lti.b_u0 - M @ S) + s * S
    return M, delta


def _w_response(gains, eso_gains, h, tau, epsilons, omega):
    M, delta = leader_forcing(gains, eso_gains, h, tau, epsilons, omega)
    return _balanced_solve(M, delta, omega)


def oracle_gei(gains, eso_gains, h, tau, epsilons, i, omega):
    """``E_i(jw) / E_{i-1}(jw)`` from the full closed loop (i >= 2)."""
    N = len(epsilons) - 1
    if not 2 <= i <= N:
        raise ValueError("need 2 <= i <= N")
    W = _w_response(gains, eso_gains, h, tau, epsilons, omega)
    return complex(W[3 * (i - 1)] / W[3 * (i - 2)])


def oracle_gvi(gains, eso_gains, h, tau, epsilons, i, omega):
    """``V_i(jw) / V_{i-1}(jw)`` from the physical closed loop (i >= 1, w > 0).

    Velocities are read straight from the physical states; rebuilding them
    from relative velocities cancels badly at high frequency.
    """
    from .realization import closed_loop

    N = len(epsilons) - 1
    if not 1 <= i <= N:
        raise ValueError("need 1 <= i <= N")
    if omega == 0:
        raise SingularAtOmega("leader velocity has a pole at w=0")
    lti = closed_loop(gains, eso_gains, h, tau, epsilons)
    x = _balanced_solve(lti.A, lti.b_u0.astype(complex), omega)
    return complex(x[lti.index.v(i)] / x[lti.index.v(i - 1)])


def oracle_gei_physical(gains, eso_gains, h, tau, epsilons, i, omega):
    """Same ratio as :func:`oracle_gei`, from the physical-coordinate loop."""
    from .realization import closed_loop

    N = len(epsilons) - 1
    if not 2 <= i <= N:
        raise ValueError("need 2 <= i <= N")
    if omega == 0:
        raise SingularAtOmega("the physical loop has integrators at w=0")
    lti = closed_loop(gains, eso_gains, h, tau, epsilons)
    x = _balanced_solve(lti.A, lti.b_u0.astype(complex), omega)
    num = lti.spacing_output(i)[0] @ x
    den = lti.spacing_output(i - 1)[0] @ x
    return complex(num / den)


def oracle_gvi_rational(gains, eso_gains, h, tau, N=3, i=2, n_omega=400,
                        omega_min=OMEGA_WINDOW[0], omega_max=OMEGA_WINDOW[1]):
    """Sampled ``G_vi`` on a log grid, for sweeps and the impulse check."""
    grid = np.geomspace(omega_min, omega_max, n_omega)
    eps = (0.0,) * (N + 1)
    return grid, np.array([oracle_gvi(gains, eso_gains, h, tau, eps, i, w) for w in grid])


# ------------------------------------------ sufficient-condition tables ----

def _theta_nominal(alpha, gamma, rho):
    disc = gamma * gamma - 4 * alpha * rho
    if disc < 0:
        return 0.0
    return (math.sqrt(disc) - gamma) / (2 * alpha)


def theorem2_coefficients(mu_p, mu_v, mu_a, omega_o, h, tau):
    w = omega_o
    rho = (3 * tau**2 * w**2 + 1, 3 * tau**2 * w**4 + 3 * w**2, tau**2 * w**6 + 3 * w**4, w**6)
    alpha = (
        h**2 * mu_v**2,
        3 * h**2 * mu_v**2 * w**2 + h**2 * mu_p**2,
        (3 * h**2 * mu_v**2 - 9 * mu_a**2) * w**4 - 16 * mu_a * mu_v * w**3
        + (3 * h**2 * mu_p**2 - 6 * mu_p * mu_a) * w**2,
        (h**2 * mu_v**2 - mu_a**2) * w**6 + (3 * h**2 * mu_p**2 + 12 * mu_a * mu_p) * w**4,
        (h**2 * mu_p**2 + 2 * mu_a * mu_p) * w**6,
    )
    g = h * mu_v - tau * mu_v - h * tau * mu_p
    gamma = (
        2 * (h - tau) * mu_v - 2 * h * tau * mu_p,
        (6 * (h - tau) * mu_v - 6 * h * tau * mu_p) * w**2 - 2 * mu_p,
        6 * g * w**4 - 6 * mu_p * w**2,
        2 * g * w**6 - 6 * mu_p * w**4,
        2 * mu_p * w**6,
    )
    theta = tuple(_theta_nominal(alpha[i], gamma[i], rho[i]) if alpha[i] != 0 else math.inf
                  for i in range(4))
    return dict(rho=rho, alpha=alpha, gamma=gamma, theta=theta)


def theorem4_coefficients(mu_p, mu_v, mu_a, omega_o, h, tau, epsbar):
    """Worst-case coefficient bounds over ``b in [1/tau - epsbar, 1/tau + epsbar]``."""
    w = omega_o
    bo = 1.0 / tau + epsbar
    bu = 1.0 / tau - epsbar
    rho = (3 * w**2 + bo**2, 3 * w**4 + 3 * bo**2 * w**2, w**6 + 3 * bo**2 * w**4, bo**2 * w**6)

    def lam(hi, lo):
        return (
            3 * mu_v * h * (hi**2 * h * mu_v - 2 * lo * mu_a / tau) + 3 * mu_a * (2 * hi**2 * mu_v * h - 3 * lo**2 * mu_a),
            16 * hi**2 * h * mu_a * mu_p - 16 * (lo * mu_a * mu_v + lo * h * mu_a * mu_p) / tau,
            3 * hi**2 * h**2 * mu_p**2 + 6 * hi**2 * mu_a * mu_p - 12 * lo * mu_p * mu_a / tau,
        )

    def alph(hi, lo, l):
        return (
            (mu_a / tau - lo * mu_a + hi * h * mu_v) ** 2,
            ((12 * hi * h * mu_a * mu_v - 18 * lo * mu_a**2) / tau - 12 * lo**2 * h * mu_a * mu_v
             + 3 * hi**2 * h**2 * mu_v**2 + 9 * mu_a**2 / tau**2 + 9 * hi**2 * mu_a**2) * w**2
            + hi**2 * h**2 * mu_p**2 + 2 * hi**2 * mu_a * mu_p - 2 * lo * mu_a * mu_p / tau,
            l[0] * w**4 + l[1] * w**3 + l[2] * w**2,
            (hi**2 * h**2 * mu_v**2 - lo**2 * mu_a**2) * w**6
            + (3 * hi**2 * h**2 * mu_p**2 + 6 * hi**2 * mu_p * mu_a + 6 * hi * mu_p * mu_a / tau) * w**4,
            (hi**2 * h**2 * mu_p**2 + 2 * hi**2 * mu_a * mu_p) * w**6,
        )

    def gam(hi, lo):
        return (
            2 * hi * mu_a / tau + 2 * hi**2 * h * mu_v - 2 * lo**2 * mu_a - 2 * lo * h * mu_p - 2 * lo * mu_v,
            16 * (mu_a / tau - lo * mu_a) * w**3
            + (12 * hi * mu_a / tau + 6 * hi**2 * h * mu_v - 12 * lo**2 * mu_a - 6 * lo * mu_v - 6 * lo * h * mu_p) * w**2
            - 2 * lo**2 * mu_p,
            (6 * hi**2 * mu_a - 6 * lo * mu_v - 6 * lo * h * mu_p - 6 * lo * mu_a / tau + 6 * hi**2 * h * mu_v) * w**4
            - 6 * lo**2 * mu_p * w**2,
            (2 * hi**2 * h * mu_v - 2 * lo * h * mu_p - 2 * lo * mu_v) * w**6 - 6 * lo**2 * mu_p * w**4,
            2 * hi**2 * mu_p * w**6,
        )

    lam_hi, lam_lo = lam(bo, bu), lam(bu, bo)
    alpha_hi, alpha_lo = alph(bo, bu, lam_hi), alph(bu, bo, lam_lo)
    gamma_hi, gamma_lo = gam(bo, bu), gam(bu, bo)
    theta = []
    for i in range(4):
        gmax = max(abs(gamma_hi[i]), abs(gamma_lo[i]))
        if alpha_lo[i] > 0:
            theta.append((math.sqrt(gmax**2 + 4 * alpha_hi[i] * rho[i]) + gmax) / (2 * alpha_lo[i]))
        else:
            theta.append(math.inf)
    return dict(b_hi=bo, b_lo=bu, rho=rho, lambda_hi=lam_hi, lambda_lo=lam_lo,
                alpha_hi=alpha_hi, alpha_lo=alpha_lo, gamma_hi=gamma_hi, gamma_lo=gamma_lo,
                theta=tuple(theta))


@dataclass
class StringStabilityReport:
    title: str
    checks: list = field(default_factory=list)
    coefficients: dict = field(default_factory=dict)
    hinf: Optional[tuple] = None
    impulse: Optional[ImpulseResult] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_text(self):
        lines = [f"# {self.title}"] + [c.line() for c in self.checks]
        for k, v in self.coefficients.items():
            vals = v if isinstance(v, (tuple, list)) else (v,)
            lines.append(f"VALUE {k} = " + " ".join(f"{x:.10g}" for x in vals))
        if self.hinf is not None:
            lines.append(f"VALUE hinf_max = {self.hinf[0]:.12g} at w={self.hinf[1]:.6g}")
        if self.impulse is not None:
            lines.append(f"VALUE impulse_min = {self.impulse.min_value:.6g} at t={self.impulse.t_min:.6g}")
        lines.append("VERDICT: " + ("PASS" if self.passed else "FAIL")
                     + " (sufficient condition; FAIL does not imply string instability)")
        return "\n".join(lines) + "\n"


def thm2_check(mu_p, mu_v, mu_a, omega_o, k, h, tau) -> StringStabilityReport:
    """Sufficient conditions for ``||G_ei||_inf <= 1`` with factored gains."""
    rep = StringStabilityReport("string stability (nominal plant)")
    rep.checks += [Check("mu_p_positive", mu_p > 0, mu_p, 0.0), Check("mu_a_positive", mu_a > 0, mu_a, 0.0)]
    mv_bound = max(math.sqrt(3) * mu_a / h, 2 * mu_a / h**2)
    rep.checks.append(Check("mu_v", mu_v > mv_bound, mu_v, mv_bound))
    denom = 3 * h**2 * mu_v**2 - 9 * mu_a**2
    w_bound = 16 * mu_v * mu_a / denom if denom > 0 else math.inf
    rep.checks.append(Check("omega_o", omega_o > w_bound, omega_o, w_bound))
    c = theorem2_coefficients(mu_p, mu_v, mu_a, omega_o, h, tau)
    ratio = c["gamma"][4] / c["alpha"][4] if c["alpha"][4] > 0 else math.inf
    k_bound = max(*c["theta"], ratio)
    rep.checks.append(Check("k", k >= k_bound, k, k_bound, ">="))
    # the quadratic-in-k lower bounds only hold where the leading coefficient is positive
    amin = min(c["alpha"])
    rep.checks.append(Check("alpha_positive", amin > 0, amin, 0.0))
    rep.coefficients.update({f"rho{i + 1}": v for i, v in enumerate(c["rho"])})
    rep.coefficients.update({f"alpha{i + 1}": v for i, v in enumerate(c["alpha"])})
    rep.coefficients.update({f"gamma{i + 1}": v for i, v in enumerate(c["gamma"])})
    rep.coefficients.update({f"theta{i + 1}": v for i, v in enumerate(c["theta"])})
    return rep


def thm4_check(mu_p, mu_v, mu_a, omega_o, k, h, tau, epsbar) -> StringStabilityReport:
    """Uncertain-plant version of :func:`thm2_check` for ``|eps| <= epsbar``."""
    rep = StringStabilityReport("string stability (uncertain plant)")
    if not 0 <= epsbar < 1.0 / tau:
        rep.checks.append(Check("epsbar_range", False, epsbar, 1.0 / tau))
        return rep
    c = theorem4_coefficients(mu_p, mu_v, mu_a, omega_o, h, tau, epsbar)
    bo, bu = c["b_hi"], c["b_lo"]
    mp_bound = 4 * mu_a * bo / (tau * bu**2 * h**2)
    rep.checks += [
        Check("mu_a_positive", mu_a > 0, mu_a, 0.0),
        Check("mu_p", mu_p > mp_bound, mu_p, mp_bound),
    ]
    mv_bound = max(4 * mu_a * bo**2 / (h * bu**2), 2 * mu_a * bo / (tau * h * bu**2))
    rep.checks.append(Check("mu_v", mu_v > mv_bound, mu_v, mv_bound))
    l1, l2, l3 = c["lambda_lo"]
    w1 = (math.sqrt(abs(l2**2 - 4 * l1 * l3)) - l2) / (2 * l1) if l1 != 0 else math.inf
    den = bu**2 * h**2 * mu_v**2 - bo**2 * mu_a**2
    num = 3 * (2 * bu * mu_p * mu_a / tau + 2 * bu**2 * mu_p * mu_a + bu**2 * h**2 * mu_p**2)
    w2 = math.sqrt(num / den) if den > 0 else math.inf
    w_bound = max(w1, w2)
    rep.checks.append(Check("omega_o", omega_o > w_bound, omega_o, w_bound))
    g5_hi = 2 * bo**2 * mu_p * omega_o**6
    a5_lo = (bu**2 * h**2 * mu_p**2 + 2 * bu**2 * mu_a * mu_p) * omega_o**6
    k_bound = max(*c["theta"], g5_hi / a5_lo if a5_lo > 0 else math.inf)
    rep.checks.append(Check("k", k >= k_bound, k, k_bound, ">="))
    amin = min(c["alpha_lo"])
    rep.checks.append(Check("alpha_positive", amin > 0, amin, 0.0))
    for key in ("rho", "lambda_hi", "lambda_lo", "alpha_hi", "alpha_lo", "gamma_hi", "gamma_lo", "theta"):
        for i, v in enumerate(c[key]):
            rep.coefficients[f"{key}{i + 1}"] = v
    rep.coefficients.update(b_hi=bo, b_lo=bu, gamma5_hi=g5_hi, alpha5_lo=a5_lo)
    return rep
