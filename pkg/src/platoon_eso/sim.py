"""Fixed-step closed-loop simulation of the platoon.

Two integration paths share one RK4 scheme:

* continuous control (no sampling, delay or noise): the whole loop is the
  linear system from :mod:`platoon_eso.realization` and every RK4 stage
  re-evaluates the control law;
* held control: measurements are drawn and the control law is evaluated at
  sample instants, held between them, and pushed through a delay line of
  ``input_delay / dt`` steps before reaching the actuator. The observer keeps
  integrating continuously on the held measurement.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import ScenarioConfig, validate_config
from .errors import DivergenceDetected
from .realization import closed_loop, control_rows, held_input_system

log = logging.getLogger(__name__)

DIVERGENCE_LIMIT = 1e9
RATIO_THRESHOLD = 1e-6


def _rk4(f, x, t, dt):
    k1 = f(x, t)
    k2 = f(x + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = f(x + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = f(x + dt * k3, t + dt)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_vehicle(state, u, plant, dt):
    """Advance ``(p, v, a)`` by one RK4 step under a constant command ``u``."""
    b = plant.pole

    def f(x, _t):
        return np.array([x[1], x[2], -b * (x[2] - u)])

    return tuple(_rk4(f, np.asarray(state, dtype=float), 0.0, dt))


@dataclass
class PlatoonTrajectory:
    t: np.ndarray
    p: np.ndarray  # (K, N+1)
    v: np.ndarray
    a: np.ndarray
    u: np.ndarray  # applied actuator command, (K, N+1)
    e: np.ndarray  # (K, N) true spacing errors
    vd: np.ndarray
    ad: np.ndarray
    z1: np.ndarray
    z2: np.ndarray
    z3: np.ndarray
    q: np.ndarray  # true extended state seen by each observer
    r: float
    h: float

    @property
    def n_followers(self):
        return self.e.shape[1]

    def spacing_identity_residual(self):
        e = self.p[:, :-1] - self.p[:, 1:] - self.r - self.h * self.v[:, 1:]
        return float(np.max(np.abs(e - self.e))) if e.size else 0.0


@dataclass
class MetricsReport:
    peak_error: np.ndarray
    terminal_error: np.ndarray
    steady_peak_error: np.ndarray
    l2_error: np.ndarray
    peak_ratio: list
    l2_ratio: list
    eso_rms: np.ndarray
    velocity_error: np.ndarray
    t_transient: float

    def max_l2_ratio(self) -> Optional[float]:
        vals = [x for x in self.l2_ratio if x is not None]
        return max(vals) if vals else None


def _noise_source(cfg):
    return np.random.Generator(np.random.PCG64(cfg.rng_seed))


def simulate(cfg: ScenarioConfig) -> PlatoonTrajectory:
    if not cfg.validated:
        cfg = validate_config(cfg)
    held = cfg.sampling_period > 0 or cfg.input_delay > 0 or any(
        x > 0 for x in (cfg.noise_amplitude, cfg.noise_e, cfg.noise_a))
    return _simulate_held(cfg) if held else _simulate_continuous(cfg)


def _initial_state(cfg, idx, vd0):
    x = np.zeros(idx.n)
    N = cfg.n_followers
    x[idx.p(0):idx.p(0) + N + 1] = cfg.p0
    x[idx.v(0):idx.v(0) + N + 1] = cfg.v0
    x[idx.a(0):idx.a(0) + N + 1] = cfg.a0
    x[idx.z(1, 1):idx.z(1, 1) + N] = vd0
    return x


def _grid(cfg):
    steps = int(round(cfg.horizon / cfg.dt))
    return steps, cfg.dt * np.arange(steps + 1)


def _leader_command(cfg, t):
    return cfg.leader_profile.accel(np.asarray(t) - cfg.input_delay)


def _check(x, t):
    mag = np.max(np.abs(x))
    if not mag < DIVERGENCE_LIMIT:
        raise DivergenceDetected(t, float(mag))


def _simulate_continuous(cfg):
    N = cfg.n_followers
    tau, h, r = cfg.tau, cfg.spacing.h, cfg.spacing.r
    lti = closed_loop(cfg.gains, cfg.eso, h, tau, cfg.epsilons, r=r)
    idx = lti.index
    steps, t = _grid(cfg)
    dt = cfg.dt
    half = _leader_command(cfg, np.arange(2 * steps + 1) * (0.5 * dt))
    A, bu, c = lti.A, lti.b_u0, lti.c

    x = _initial_state(cfg, idx, np.subtract(cfg.v0[:-1], cfg.v0[1:]))
    X = np.empty((steps + 1, idx.n))
    X[0] = x
    for k in range(steps):
        u_a, u_m, u_b = half[2 * k], half[2 * k + 1], half[2 * k + 2]
        k1 = A @ x + bu * u_a + c
        k2 = A @ (x + 0.5 * dt * k1) + bu * u_m + c
        k3 = A @ (x + 0.5 * dt * k2) + bu * u_m + c
        k4 = A @ (x + dt * k3) + bu * u_b + c
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _check(x, t[k + 1])
        X[k + 1] = x

    K = control_rows(idx, cfg.gains.kp, cfg.gains.kv, cfg.gains.ka, h)
    u = np.empty((steps + 1, N + 1))
    u[:, 0] = half[::2]
    u[:, 1:] = X @ K[1:].T - cfg.gains.kp * r
    return _assemble(cfg, t, X, idx, u, u)


def _simulate_held(cfg):
    N = cfg.n_followers
    tau, h, r = cfg.tau, cfg.spacing.h, cfg.spacing.r
    g = cfg.gains
    sysm = held_input_system(cfg.eso, tau, cfg.epsilons)
    idx = sysm.index
    steps, t = _grid(cfg)
    dt = cfg.dt
    period = int(round(cfg.sampling_period / dt)) if cfg.sampling_period > 0 else 1
    delay = int(round(cfg.input_delay / dt))
    half = _leader_command(cfg, np.arange(2 * steps + 1) * (0.5 * dt))
    rng = _noise_source(cfg)

    def measure(x):
        p = x[idx.p(0):idx.p(0) + N + 1]
        v = x[idx.v(0):idx.v(0) + N + 1]
        a = x[idx.a(0):idx.a(0) + N + 1]
        e = p[:-1] - p[1:] - r - h * v[1:]
        vd = v[:-1] - v[1:]
        y = vd + (rng.uniform(-cfg.noise_amplitude, cfg.noise_amplitude, N) if cfg.noise_amplitude > 0 else 0.0)
        em = e + (rng.uniform(-cfg.noise_e, cfg.noise_e, N) if cfg.noise_e > 0 else 0.0)
        am = a[1:] + (rng.uniform(-cfg.noise_a, cfg.noise_a, N) if cfg.noise_a > 0 else 0.0)
        return y, em, am

    x = _initial_state(cfg, idx, np.zeros(N))
    y, em, am = measure(x)
    x[idx.z(1, 1):idx.z(1, 1) + N] = y
    z2 = x[idx.z(2, 1):idx.z(2, 1) + N]
    uc = g.kp * em + g.kv * (y - h * am) + g.ka * (z2 + am)

    line = deque([np.zeros(N)] * delay, maxlen=delay + 1)
    A = sysm.A
    X = np.empty((steps + 1, idx.n))
    U_app = np.empty((steps + 1, N + 1))
    U_ctl = np.empty((steps + 1, N + 1))
    X[0] = x
    for k in range(steps + 1):
        if k > 0 and k % period == 0:
            y, em, am = measure(x)
            z2 = x[idx.z(2, 1):idx.z(2, 1) + N]
            uc = g.kp * em + g.kv * (y - h * am) + g.ka * (z2 + am)
        line.append(uc)
        u_app = line[0]
        U_app[k, 0] = U_ctl[k, 0] = half[2 * k]
        U_app[k, 1:] = u_app
        U_ctl[k, 1:] = uc
        if k == steps:
            break
        forcing = sysm.B_app @ u_app + sysm.B_y @ y + sysm.B_am @ am + sysm.B_uc @ uc
        u_a, u_m, u_b = half[2 * k], half[2 * k + 1], half[2 * k + 2]
        bu = sysm.b_u0
        k1 = A @ x + bu * u_a + forcing
        k2 = A @ (x + 0.5 * dt * k1) + bu * u_m + forcing
        k3 = A @ (x + 0.5 * dt * k2) + bu * u_m + forcing
        k4 = A @ (x + dt * k3) + bu * u_b + forcing
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _check(x, t[k + 1])
        X[k + 1] = x
    return _assemble(cfg, t, X, idx, U_app, U_ctl)


def _assemble(cfg, t, X, idx, u_app, u_ctl):
    N = cfg.n_followers
    h, r, tau = cfg.spacing.h, cfg.spacing.r, cfg.tau
    p = X[:, idx.p(0):idx.p(0) + N + 1]
    v = X[:, idx.v(0):idx.v(0) + N + 1]
    a = X[:, idx.a(0):idx.a(0) + N + 1]
    z1 = X[:, idx.z(1, 1):idx.z(1, 1) + N]
    z2 = X[:, idx.z(2, 1):idx.z(2, 1) + N]
    z3 = X[:, idx.z(3, 1):idx.z(3, 1) + N]
    e = p[:, :-1] - p[:, 1:] - r - h * v[:, 1:]
    poles = np.array([pl.pole for pl in cfg.plants])
    adot = poles * (u_app - a)
    ad = a[:, :-1] - a[:, 1:]
    # extended state relative to the observer's nominal model term
    q = (adot[:, :-1] - adot[:, 1:]) - (a[:, 1:] - u_ctl[:, 1:]) / tau
    return PlatoonTrajectory(
        t=t, p=p.copy(), v=v.copy(), a=a.copy(), u=np.array(u_app), e=e,
        vd=v[:, :-1] - v[:, 1:], ad=ad, z1=z1.copy(), z2=z2.copy(), z3=z3.copy(), q=q,
        r=r, h=h,
    )


def metrics(traj: PlatoonTrajectory, t_transient: float) -> MetricsReport:
    """Peak, terminal and energy measures of the spacing errors.

    Peaks, L2 norms and amplification ratios use the whole horizon; steady
    peaks and observer RMS use ``[t_transient, T]``.
    """
    t = traj.t
    if not t_transient < t[-1]:
        raise ValueError("t_transient must be smaller than the horizon")
    e = traj.e
    absn = np.abs(e)
    peak = absn.max(axis=0)
    late = t >= t_transient
    l2 = np.sqrt(np.trapezoid(e**2, t, axis=0))
    peak_ratio = [None]
    l2_ratio = [None]
    for i in range(1, e.shape[1]):
        if peak[i - 1] > RATIO_THRESHOLD:
            peak_ratio.append(float(peak[i] / peak[i - 1]))
            l2_ratio.append(float(l2[i] / l2[i - 1]) if l2[i - 1] > 0 else None)
        else:
            peak_ratio.append(None)
            l2_ratio.append(None)
    track = traj.z2[late] - traj.ad[late]
    return MetricsReport(
        peak_error=peak,
        terminal_error=absn[-1],
        steady_peak_error=absn[late].max(axis=0),
        l2_error=l2,
        peak_ratio=peak_ratio,
        l2_ratio=l2_ratio,
        eso_rms=np.sqrt(np.mean(track**2, axis=0)),
        velocity_error=np.abs(traj.v[-1, 1:] - traj.v[-1, 0]),
        t_transient=t_transient,
    )
