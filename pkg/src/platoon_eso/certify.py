"""Closed-loop stability certificates.

The closed loop is written in error coordinates ``W = [F_1..F_N, E_1..E_N]``
with ``F_i = (e_i, v_{d,i}, a_i)`` and ``E_i = (z1-v_d, z2-a_d, z3-q)``.
``Psi`` collects the k_a-free part, ``Psi_hat`` everything else (the k_a
feed-forward and, for uncertain plants, every epsilon-dependent term).
Stability follows whenever ``||Psi_hat|| < r_c(Psi)``; the checks here only
certify, they never claim instability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateRow, EigenFailure, NotStable

RC_GRID_POINTS = 4000
RC_XTOL = 1e-8


# ---------------------------------------------------------------- Routh ----

@dataclass(frozen=True)
class RouthResult:
    column: tuple
    stable: bool


def routh_first_column(poly) -> RouthResult:
    """First Routh column ``[1, c2, (c2 c1 - c0)/c2, c0]`` of a cubic.

    ``poly`` holds descending coefficients ``[a3, a2, a1, a0]``; it is
    normalized by ``a3``.
    """
    p = np.asarray(poly, dtype=float)
    if p.shape != (4,):
        raise ValueError("routh_first_column handles cubics only")
    if p[0] == 0:
        raise DegenerateRow("leading coefficient is zero")
    _, c2, c1, c0 = p / p[0]
    if c2 == 0:
        raise DegenerateRow("zero pivot in the s^2 row")
    s1 = (c2 * c1 - c0) / c2
    if s1 == 0:
        raise DegenerateRow("zero pivot in the s^1 row")
    col = (1.0, float(c2), float(s1), float(c0))
    return RouthResult(col, all(x > 0 for x in col))


def routh_column(poly):
    """First Routh column of a polynomial of any degree (descending coefficients).

    Raises DegenerateRow on a zero pivot.
    """
    p = np.trim_zeros(np.asarray(poly, dtype=float), "f")
    if p.size == 0:
        raise DegenerateRow("zero polynomial")
    p = p / p[0]
    rows = [p[0::2].copy(), p[1::2].copy()]
    width = len(rows[0])
    rows = [np.pad(r, (0, width - len(r))) for r in rows]
    col = [rows[0][0]]
    for _ in range(len(p) - 1):
        top, cur = rows[-2], rows[-1]
        if cur[0] == 0:
            raise DegenerateRow("zero pivot in the Routh array")
        col.append(cur[0])
        nxt = np.zeros(width)
        nxt[:-1] = (cur[0] * top[1:] - top[0] * cur[1:]) / cur[0]
        rows.append(nxt)
    return tuple(float(x) for x in col)


def routh_stable(poly) -> bool:
    """Hurwitz test; a zero pivot counts as not stable."""
    try:
        return all(x > 0 for x in routh_column(poly))
    except DegenerateRow:
        return False


def spacing_polynomial(kp, kv, h, tau):
    """Characteristic cubic of the spacing block ``A`` (descending)."""
    return [1.0, (1 + kv * h) / tau, (kv + kp * h) / tau, kp / tau]


def observer_polynomial(beta1, beta2, beta3):
    return [1.0, beta1, beta2, beta3]


# ------------------------------------------------------- block matrices ----

def _row3(a, b, c):
    m = np.zeros((3, 3))
    m[2] = (a, b, c)
    return m


def nominal_blocks(kp, kv, ka, h, tau, beta):
    b1, b2, b3 = beta
    t2 = tau * tau
    B = np.zeros((3, 3))
    B[1, 2] = 1.0
    G = np.zeros((3, 3))
    G[2, 1] = ka / tau
    J = np.zeros((3, 3))
    J[2, 1] = -ka**2 / t2
    return dict(
        A=np.array([[0, 1, -h], [0, 0, -1], [kp / tau, kv / tau, (-1 - kv * h) / tau]], dtype=float),
        B=B,
        B1=B + _row3(0, 0, ka / tau),
        G=G,
        H=np.array([[-b1, 1, 0], [-b2, 0, 1], [-b3, 0, 0]], dtype=float),
        D=_row3(kp * (1 + kv * h) / t2, (kv + kv**2 * h - kp * tau) / t2,
                (kp * h * tau + kv * tau - 2 * kv * h - kv**2 * h**2 - 1) / t2),
        E=_row3(0, 0, -kv / tau),
        E1=_row3(-kp * ka / t2, -kv * ka / t2, -kv / tau + 2 * (1 + kv * h) * ka / t2),
        I=_row3(b2 * ka / tau, (1 + kv * h) * ka / t2, -ka / tau),
        J=J,
        F=_row3(0, 0, -ka**2 / t2),
    )


class _Assembler:
    def __init__(self, N):
        self.N = N
        self.M = np.zeros((6 * N, 6 * N))

    def f(self, i):
        return 3 * (i - 1)

    def e(self, i):
        return 3 * self.N + 3 * (i - 1)

    def put(self, r, c, blk):
        self.M[r:r + 3, c:c + 3] += blk


def _assemble_psi(N, bl):
    a = _Assembler(N)
    for i in range(1, N + 1):
        a.put(a.f(i), a.f(i), bl["A"])
        a.put(a.e(i), a.e(i), bl["H"])
        if i >= 2:
            a.put(a.f(i), a.f(i - 1), bl["B"])
            a.put(a.e(i), a.f(i - 1), bl["D"])
        if i >= 3:
            a.put(a.e(i), a.f(i - 2), bl["E"])
    return a.M


def _assemble_nominal_hat(N, bl):
    a = _Assembler(N)
    for i in range(1, N + 1):
        a.put(a.f(i), a.e(i), bl["G"])
        if i >= 2:
            a.put(a.f(i), a.f(i - 1), bl["B1"] - bl["B"])
            a.put(a.e(i), a.e(i - 1), bl["I"])
        if i >= 3:
            a.put(a.e(i), a.f(i - 2), bl["E1"] - bl["E"])
            a.put(a.e(i), a.e(i - 2), bl["J"])
        if i >= 4:
            a.put(a.e(i), a.f(i - 3), bl["F"])
    return a.M


def _assemble_uncertain(N, kp, kv, ka, h, tau, beta, eps):
    """Full closed-loop matrix for plants with poles ``1/tau + eps[i]``."""
    b1, b2, b3 = beta
    b = [1.0 / tau + x for x in eps]
    a = _Assembler(N)
    for i in range(1, N + 1):
        bi, ei, bp = b[i], eps[i], b[i - 1]
        a.put(a.f(i), a.f(i), np.array(
            [[0, 1, -h], [0, 0, -1], [kp * bi, kv * bi, (-1 - kv * h) * bi]], dtype=float))
        G = np.zeros((3, 3))
        G[2, 1] = bi * ka
        a.put(a.f(i), a.e(i), G)
        a.put(a.e(i), a.e(i), np.array(
            [[-b1, 1, 0], [-b2, 0, 1],
             [-b3 - ka * b2 * ei, -ka * ei * bi - kv * ka * h * bi * ei, ka * ei]], dtype=float))
        a.put(a.e(i), a.f(i), _row3(
            -kp * kv * h * bi * ei - kp * ei * bi,
            kp * ei - kv * ei * bi - kv**2 * h * bi * ei,
            ei * bi + kv * h * ei * bi - kv * ei - kp * h * ei + kv * h * bi * ei + kv**2 * h**2 * bi * ei))
        if i >= 2:
            B1 = np.zeros((3, 3))
            B1[1, 2] = 1.0
            B1[2, 2] = bi * ka
            a.put(a.f(i), a.f(i - 1), B1)
            a.put(a.e(i), a.f(i - 1), _row3(
                kp * kv * h * bp**2 + kp * ka * ei * bp + kp * bp**2,
                kv * ka * ei * bp + kv**2 * h * bp**2 - kp * bp + kv * bp**2,
                kp * h * bp + kv * bp - bp**2 - ka * ei * bp - kv**2 * h**2 * bp**2 - ka * ei * bi
                + kv * ei - kv * ka * h * ei * bi - kv * ka * h * ei * bp - 2 * kv * h * bp**2))
            a.put(a.e(i), a.e(i - 1), _row3(
                ka * b2 * bp, ka * bp**2 + kv * ka * h * bp**2 + ka**2 * ei * bp, -ka * bp))
        if i >= 3:
            bpp = b[i - 2]
            a.put(a.e(i), a.f(i - 2), _row3(
                -kp * ka * bp * bpp, -kv * ka * bp * bpp,
                kv * ka * h * bp * bpp + kv * ka * h * bp**2 + ka * bp * bpp + ka**2 * ei * bp
                + ka * bp**2 - kv * bp))
            J = np.zeros((3, 3))
            J[2, 1] = -ka**2 * bp * bpp
            a.put(a.e(i), a.e(i - 2), J)
        if i >= 4:
            a.put(a.e(i), a.f(i - 3), _row3(0, 0, -ka**2 * bp * b[i - 2]))
    return a.M


@dataclass(frozen=True)
class StateMatrixBundle:
    """``psi``, ``closed_loop = psi + psi_hat`` and ``psi_hat`` (6N x 6N).

    Row/column ``3(i-1)+k`` is component k of ``F_i``; ``3N+3(i-1)+k`` is
    component k of ``E_i``.
    """

    psi: np.ndarray
    closed_loop: Optional[np.ndarray] = None
    psi_hat: Optional[np.ndarray] = None
    N: int = 1


def build_psi(gains, eso_gains, h, tau, N) -> StateMatrixBundle:
    if N < 1:
        raise ValueError("N must be at least 1")
    bl = nominal_blocks(gains.kp, gains.kv, gains.ka, h, tau, eso_gains.as_tuple())
    return StateMatrixBundle(psi=_assemble_psi(N, bl), N=N)


def build_closed_loop(gains, eso_gains, h, tau, N, epsilons=None) -> StateMatrixBundle:
    """Assemble ``Psi``, ``Psi + Psi_hat`` and ``Psi_hat``.

    ``epsilons`` (length N+1, leader first) selects the uncertain-plant form;
    with ``None`` the nominal form is used.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    beta = eso_gains.as_tuple()
    kp, kv, ka = gains.kp, gains.kv, gains.ka
    bl = nominal_blocks(kp, kv, ka, h, tau, beta)
    psi = _assemble_psi(N, bl)
    if epsilons is None:
        hat = _assemble_nominal_hat(N, bl)
    else:
        eps = [float(x) for x in epsilons]
        if len(eps) != N + 1:
            raise ValueError(f"need {N + 1} epsilons (leader first), got {len(eps)}")
        if any(not abs(x) < 1.0 / tau for x in eps):
            raise ValueError("every |epsilon| must be below 1/tau")
        hat = _assemble_uncertain(N, kp, kv, ka, h, tau, beta, eps) - psi
    return StateMatrixBundle(psi=psi, closed_loop=psi + hat, psi_hat=hat, N=N)


# ----------------------------------------------------- matrix measures ----

def spectral_abscissa(M) -> float:
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise EigenFailure("matrix has non-finite entries")
    try:
        ev = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    return float(np.max(ev.real))


def sum_abs_bound(M) -> float:
    """Sum of absolute entries; an upper bound on the spectral norm."""
    return float(np.sum(np.abs(M)))


def _sigma_min(M, omegas):
    n = M.shape[0]
    stack = 1j * np.asarray(omegas)[:, None, None] * np.eye(n) - M
    return np.linalg.svd(stack, compute_uv=False)[:, -1]


def _sigma_min_grid(M, omegas, chunk=1024):
    """Grid screening through ``sigma^2 = lambda_min(w^2 I + M'M + iw(M - M'))``.

    About twice as fast as batched SVD and accurate to roughly ``eps ||M||^2 /
    sigma``; only used to pick refinement brackets, never as the answer.
    """
    n = M.shape[0]
    gram, skew = M.T @ M, M - M.T
    out = np.empty(len(omegas))
    for lo in range(0, len(omegas), chunk):
        w = np.asarray(omegas[lo:lo + chunk])[:, None, None]
        lam = np.linalg.eigvalsh((w * w) * np.eye(n) + gram + 1j * w * skew)[:, 0]
        out[lo:lo + chunk] = np.sqrt(np.maximum(lam, 0.0))
    return out


def stability_radius_rc(M):
    """``(r_c, omega*)`` with ``r_c = min_w sigma_min(iwI - M)``.

    Uniform grid on ``[0, 2 sum|m_ij|]`` augmented with log-spaced points and
    the imaginary parts of the eigenvalues, followed by bounded scalar
    refinement around every local minimum of the grid.
    """
    M = np.asarray(M, dtype=float)
    if spectral_abscissa(M) >= 0:
        raise NotStable("stability radius needs a Hurwitz matrix")
    top = max(2.0 * sum_abs_bound(M), 1e-12)
    ev = np.abs(np.linalg.eigvals(M).imag)
    grid = np.unique(np.concatenate([
        np.linspace(0.0, top, RC_GRID_POINTS),
        np.geomspace(top * 1e-9, top, 600),
        ev[ev <= top],
    ]))
    vals = _sigma_min_grid(M, grid)
    k0 = int(np.argmin(vals))
    exact = _sigma_min(M, [0.0, grid[k0]])
    # the screening can misrank near-ties, and the bounded refinement never
    # evaluates bracket ends, so w = 0 is always checked exactly
    j = int(np.argmin(exact))
    best_w, best = (0.0, float(grid[k0]))[j], float(exact[j])
    # refine every grid local minimum within a factor of the best value
    inner = np.flatnonzero((vals[1:-1] <= vals[:-2]) & (vals[1:-1] <= vals[2:])) + 1
    slack = 1e-12 * max(1.0, float(np.linalg.norm(M, 2))) ** 2
    cands = set(int(k) for k in inner if vals[k] <= 2.0 * best + slack)
    cands |= {k0}
    for k in cands:
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
        if hi <= lo:
            continue
        res = minimize_scalar(lambda w: _sigma_min(M, [w])[0], bounds=(lo, hi),
                              method="bounded", options={"xatol": RC_XTOL})
        if res.fun < best:
            best, best_w = float(res.fun), float(res.x)
    return best, best_w


# ----------------------------------------------------- theorem bounds ----

def theta_nominal(kp, kv, h, tau, beta2, N):
    return (N * tau + (N - 1) * (tau * beta2 + 2 * tau + kv * h + 1)
            + (N - 2) * (kp + kv + 2 * kv * h + 2)) / tau**2


@dataclass(frozen=True)
class RobustCoefficients:
    """Coefficients of the uncertain-plant perturbation bound."""

    Theta: float
    Theta1: float
    A1: float
    A2: float
    Y: tuple  # Y1..Y6
    Z: tuple  # Z1..Z6

    def as_dict(self):
        out = {"Theta": self.Theta, "Theta1": self.Theta1, "A1": self.A1, "A2": self.A2}
        out.update({f"Y{i + 1}": v for i, v in enumerate(self.Y)})
        out.update({f"Z{i + 1}": v for i, v in enumerate(self.Z)})
        return out


def robust_coefficients(kp, kv, h, tau, beta2, N, epsbar) -> RobustCoefficients:
    e = epsbar
    Y = (
        kv * h + 1,
        kv * h / tau + beta2 + 2,
        kp + kv + 5 * kv * h + 5,
        (kp + kv + 6 * kv * h + 3) / tau + 3 * beta2 + 6,
        (2 * N - 3) * (kp + kv + 2 * kv * h + 2) + (2 * N - 1) * (kv * h + 1),
        N * (kv * h / tau + beta2 + 2)
        + (N - 1) * ((kp + kv + 4 * kv * h + 3) / tau + beta2 + 2)
        + (N - 2) * (4 + 2 * kp + 2 * kv + 4 * kv * h) / tau,
    )
    Z = (
        kv**2 * h**2 + (2 * kv + kp * kv + kv**2) * h + kp + kv + 1,
        kv**2 * h**2 / tau + (kv**2 + kp * kv + kv) * h / tau + kp * h + kv * h + 2 * kp + 2 * kv + 1,
        3 * kv**2 * h**2 + (3 * kv**2 + 3 * kp * kv + 6 * kv) * h + 3 * kp + 3 * kv + 3,
        4 * kv**2 * h**2 / tau + ((4 * kv**2 + 6 * kv + 4 * kp * kv) * h + 2 * kp + 2 * kv) / tau
        + (3 * kp + 2 * kv) * h + 5 * kp + 6 * kv + 4,
        (2 * N - 1) * (kp * kv * h + kp + kv + kv**2 * h + 1 + 2 * kv * h + kv**2 * h**2),
        N * ((kp * kv * h + kv**2 * h + kv * h + kv**2 * h**2) / tau + 1 + kv * h + 2 * kp + 2 * kv + kp * h)
        + (N - 1) * ((2 * kv + 2 * kp + 2 * kv**2 * h + 2 * kp * kv * h + 2 * kv**2 * h**2 + 4 * kv * h) / tau
                     + kp + kp * h + 2 * kv + 2)
        + (N - 2) * kv / tau,
    )
    return RobustCoefficients(
        Theta=theta_nominal(kp, kv, h, tau, beta2, N),
        Theta1=(kv * h + tau * beta2 + 4 * tau + 1) / tau**2,
        A1=e**2 + e / tau,
        A2=(2 * N - 5) / tau**2 + (4 * N - 8) * e**2 + (5 * N - 11) * e / tau,
        Y=Y,
        Z=Z,
    )


def _bound_polynomial(kp, kv, h, tau, beta2, N, epsbar):
    """``(A, B, C)`` with ``||Psi_hat|| <= A ka^2 + B ka + C``."""
    if epsbar is None:
        if N == 1:
            return 0.0, 1.0 / tau, 0.0
        if N == 2:
            return 0.0, (kv * h + tau * beta2 + 4 * tau + 1) / tau**2, 0.0
        return (2 * N - 5) / tau**2, theta_nominal(kp, kv, h, tau, beta2, N), 0.0
    c = robust_coefficients(kp, kv, h, tau, beta2, N, epsbar)
    e = epsbar
    Y, Z = c.Y, c.Z
    dA, dB, dC = _eps_tau_correction(kp, kv, h, tau, N, e)
    if N == 1:
        return dA, 1.0 / tau + Y[0] * e**2 + Y[1] * e + dB, Z[0] * e**2 + Z[1] * e + dC
    if N == 2:
        return c.A1 + dA, c.Theta1 + Y[2] * e**2 + Y[3] * e + dB, Z[2] * e**2 + Z[3] * e + dC
    return c.A2 + dA, c.Theta + Y[4] * e**2 + Y[5] * e + dB, Z[4] * e**2 + Z[5] * e + dC


def _eps_tau_correction(kp, kv, h, tau, N, e):
    """Terms of order ``epsbar / tau`` missing from the Y/Z tables.

    Every true pole enters the perturbation as ``b = 1/tau + eps``, so each
    ``eps * b`` entry contributes ``eps / tau`` as well as ``eps^2``; the
    tables only carry the latter. Adding these keeps the bound above the
    entrywise sum of ``|Psi_hat|`` and vanishes at ``epsbar = 0``.
    """
    dA = max(N - 2, 0) * e / tau
    dB = (2 * N - 1) * e / tau
    dC = e * (N * (kp + kv * h) / tau + min(N, 2) * kv / tau + max(N - 2, 0) * kv + (3 * N - 2) / tau)
    return dA, dB, dC


def psi_hat_norm_bound(gains, eso_gains, h, tau, N, epsbar=None) -> float:
    if N < 1:
        raise ValueError("N must be at least 1")
    if epsbar is not None and not 0 <= epsbar < 1.0 / tau:
        raise ValueError("epsbar must lie in [0, 1/tau)")
    A, B, C = _bound_polynomial(gains.kp, gains.kv, h, tau, eso_gains.beta2, N, epsbar)
    ka = gains.ka
    return A * ka**2 + B * ka + C


def _positive_root(A, B, C):
    """Positive root of ``A x^2 + B x = C`` (``B > 0``), cancellation free."""
    if C <= 0:
        return 0.0
    return 2.0 * C / (B + math.sqrt(B * B + 4.0 * A * C))


def thm1_kv_threshold(kp, h, tau) -> float:
    """Smallest admissible velocity gain (strict lower bound)."""
    if h >= tau:
        return 0.0
    disc = (1 - kp * h**2) ** 2 + 4 * kp * h * tau
    # equivalent to (sqrt(disc) - (1 + kp h^2)) / (2h), written without cancellation
    return 2 * kp * (tau - h) / (math.sqrt(disc) + (1 + kp * h**2))


def _psi_stable_or_raise(kp, kv, h, tau, eso):
    if not kp > 0:
        raise NotStable("kp must be positive")
    if not kv > thm1_kv_threshold(kp, h, tau):
        raise NotStable("kv below the spacing-block threshold")
    if not routh_first_column(spacing_polynomial(kp, kv, h, tau)).stable:
        raise NotStable("spacing block fails the Routh test")
    if not routh_first_column(observer_polynomial(*eso.as_tuple())).stable:
        raise NotStable("observer block fails the Routh test")


def thm1_ka_max(gains, eso_gains, h, tau, N, r_c=None) -> float:
    _psi_stable_or_raise(gains.kp, gains.kv, h, tau, eso_gains)
    if r_c is None:
        r_c, _ = stability_radius_rc(build_psi(gains, eso_gains, h, tau, N).psi)
    A, B, _ = _bound_polynomial(gains.kp, gains.kv, h, tau, eso_gains.beta2, N, None)
    return _positive_root(A, B, r_c)


def thm3_ka_max(gains, eso_gains, h, tau, N, epsbar, r_c=None) -> float:
    _psi_stable_or_raise(gains.kp, gains.kv, h, tau, eso_gains)
    if r_c is None:
        r_c, _ = stability_radius_rc(build_psi(gains, eso_gains, h, tau, N).psi)
    A, B, C = _bound_polynomial(gains.kp, gains.kv, h, tau, eso_gains.beta2, N, epsbar)
    return _positive_root(A, B, r_c - C)


# ------------------------------------------------------------- reports ----

@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    bound: float
    relation: str = ">"

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"CHECK {self.name}: {status} value={self.value:.10g} bound={self.bound:.10g}"


@dataclass
class CertificateReport:
    title: str
    checks: list = field(default_factory=list)
    intermediates: dict = field(default_factory=dict)
    routh: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_text(self):
        lines = [f"# {self.title}"]
        lines += [c.line() for c in self.checks]
        for k, col in self.routh.items():
            lines.append(f"ROUTH {k}: " + " ".join(f"{x:.10g}" for x in col))
        for k, v in self.intermediates.items():
            lines.append(f"VALUE {k} = {v:.10g}" if isinstance(v, (int, float)) else f"VALUE {k} = {v}")
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(f"VERDICT: {verdict} (sufficient condition; FAIL does not imply instability)")
        return "\n".join(lines) + "\n"


def _common_checks(rep, kp, kv, h, tau, eso):
    b1, b2, b3 = eso.as_tuple()
    rep.checks += [
        Check("beta1_positive", b1 > 0, b1, 0.0),
        Check("beta3_positive", b3 > 0, b3, 0.0),
        Check("observer_routh", b1 * b2 - b3 > 0, b1 * b2 - b3, 0.0),
        Check("kp_positive", kp > 0, kp, 0.0),
    ]
    thr = thm1_kv_threshold(kp, h, tau) if kp > 0 else 0.0
    rep.checks.append(Check("kv_threshold", kv > thr, kv, thr))
    for key, poly in (("spacing", spacing_polynomial(kp, kv, h, tau)), ("observer", observer_polynomial(b1, b2, b3))):
        try:
            rep.routh[key] = routh_first_column(poly).column
        except DegenerateRow:
            rep.routh[key] = (float("nan"),) * 4
    return rep.passed


def _certify(cfg, epsbar, r_c=None):
    g, eso = cfg.gains, cfg.eso
    h, tau, N = cfg.spacing.h, cfg.tau, cfg.n_followers
    robust = epsbar is not None
    rep = CertificateReport("uncertain-plant closed-loop stability" if robust else "closed-loop stability")
    if robust:
        if not 0 <= epsbar < 1.0 / tau:
            rep.checks.append(Check("epsbar_range", False, epsbar, 1.0 / tau, "<"))
            return rep
        rep.intermediates["epsbar"] = epsbar
    if not _common_checks(rep, g.kp, g.kv, h, tau, eso):
        return rep
    # Psi does not involve ka, so a radius computed for other ka values is reusable
    r_c, w = r_c if r_c is not None else stability_radius_rc(build_psi(g, eso, h, tau, N).psi)
    rep.intermediates.update(r_c=r_c, r_c_omega=w,
                             Theta=theta_nominal(g.kp, g.kv, h, tau, eso.beta2, N))
    A, B, C = _bound_polynomial(g.kp, g.kv, h, tau, eso.beta2, N, epsbar)
    if robust:
        rep.intermediates.update(robust_coefficients(g.kp, g.kv, h, tau, eso.beta2, N, epsbar).as_dict())
        rep.checks.append(Check("epsbar_feasibility", C - r_c < 0, C, r_c, "<"))
    ka_max = _positive_root(A, B, r_c - C)
    rep.intermediates["ka_max"] = ka_max
    rep.intermediates["psi_hat_bound"] = A * g.ka**2 + B * g.ka + C
    rep.checks.append(Check("ka_positive", g.ka > 0, g.ka, 0.0))
    rep.checks.append(Check("ka_max", g.ka < ka_max, g.ka, ka_max, "<"))
    return rep


def thm1_check(cfg, r_c=None) -> CertificateReport:
    """Evaluate every nominal closed-loop stability condition for ``cfg``.

    ``r_c`` optionally supplies a precomputed ``(radius, omega)`` pair.
    """
    return _certify(cfg, None, r_c)


def thm3_check(cfg, epsbar, r_c=None) -> CertificateReport:
    """Uncertain-plant version of :func:`thm1_check` for ``|eps_i| <= epsbar``."""
    return _certify(cfg, float(epsbar), r_c)
