"""Configuration and domain types for platoon scenarios.

All types are frozen dataclasses. ``validate_config`` checks every invariant
at once and returns a normalized copy of the scenario (input delay snapped
onto the integration grid).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidConfig, InvalidParameter

_REL_TOL = 1e-12


@dataclass(frozen=True)
class PlantParams:
    """First-order actuator lag of one vehicle.

    The realized acceleration pole is ``b = 1/tau + epsilon``; ``tau`` is the
    nominal lag known to the controller and ``epsilon`` the model error.
    """

    tau: float
    epsilon: float = 0.0
    index: int = 0

    @property
    def pole(self) -> float:
        return 1.0 / self.tau + self.epsilon


@dataclass(frozen=True)
class SpacingPolicy:
    r: float
    h: float

    def desired_gap(self, v):
        return self.r + self.h * v


@dataclass(frozen=True)
class ControllerGains:
    kp: float
    kv: float
    ka: float
    k: Optional[float] = None
    mu_p: Optional[float] = None
    mu_v: Optional[float] = None
    mu_a: Optional[float] = None

    @classmethod
    def factored(cls, k, mu_p, mu_v, mu_a):
        return cls(kp=mu_p * k, kv=mu_v * k, ka=mu_a * k, k=k, mu_p=mu_p, mu_v=mu_v, mu_a=mu_a)

    @property
    def is_factored(self) -> bool:
        return self.k is not None


@dataclass(frozen=True)
class EsoGains:
    beta1: float
    beta2: float
    beta3: float
    omega_o: Optional[float] = None

    @classmethod
    def from_bandwidth(cls, omega_o):
        return cls(3.0 * omega_o, 3.0 * omega_o**2, omega_o**3, omega_o=omega_o)

    def as_tuple(self):
        return (self.beta1, self.beta2, self.beta3)


@dataclass(frozen=True)
class LeaderProfile:
    """Piecewise-linear desired leader acceleration with finite support.

    ``knots`` are ``(t, a)`` pairs; the acceleration is zero before the first
    knot and after the last one, so both end values must be zero.
    """

    knots: tuple = ()
    name: str = "custom"

    @property
    def t_final(self) -> float:
        return self.knots[-1][0] if self.knots else 0.0

    def accel(self, t):
        if not self.knots:
            return np.zeros_like(t, dtype=float) if np.ndim(t) else 0.0
        ts, vals = zip(*self.knots)
        out = np.interp(t, ts, vals, left=0.0, right=0.0)
        return out if np.ndim(t) else float(out)

    def velocity_change(self, t) -> float:
        """Exact integral of the acceleration over [0, t]."""
        if not self.knots or t <= 0:
            return 0.0
        # trapezoid rule is exact on a piecewise-linear integrand
        pts = np.array(sorted({0.0, t} | {k[0] for k in self.knots if 0 < k[0] < t}))
        return float(np.trapezoid(self.accel(pts), pts))

    def check(self):
        problems = []
        ts = [k[0] for k in self.knots]
        if any(b <= a for a, b in zip(ts[:-1], ts[1:])):
            problems.append(InvalidParameter("leader.knots", "knot times must be strictly increasing"))
        if ts and ts[0] < 0:
            problems.append(InvalidParameter("leader.knots", "knot times must be nonnegative"))
        if self.knots and (self.knots[0][1] != 0.0 or self.knots[-1][1] != 0.0):
            problems.append(InvalidParameter("leader.knots", "profile must start and end at zero acceleration"))
        if any(not math.isfinite(a) for _, a in self.knots):
            problems.append(InvalidParameter("leader.knots", "accelerations must be finite"))
        return problems


DEFAULT_PROFILE = LeaderProfile(
    knots=(
        (5.0, 0.0), (6.0, 2.0), (10.0, 2.0), (11.0, 0.0),
        (20.0, 0.0), (21.0, -2.0), (25.0, -2.0), (26.0, 0.0),
    ),
    name="default",
)
CONSTANT_VELOCITY = LeaderProfile(knots=(), name="constant")

LEADER_PROFILES = {p.name: p for p in (DEFAULT_PROFILE, CONSTANT_VELOCITY)}


def leader_profile(name_or_profile) -> LeaderProfile:
    if isinstance(name_or_profile, LeaderProfile):
        return name_or_profile
    try:
        return LEADER_PROFILES[name_or_profile]
    except KeyError:
        raise InvalidParameter("leader.profile", f"unknown profile {name_or_profile!r}") from None


def leader_accel(profile, t):
    """Desired leader acceleration at time ``t`` (zero for ``t >= t_final``)."""
    return leader_profile(profile).accel(t)


@dataclass(frozen=True)
class ScenarioConfig:
    plants: tuple
    spacing: SpacingPolicy
    gains: ControllerGains
    eso: EsoGains
    p0: tuple
    v0: tuple
    a0: tuple = None
    input_delay: float = 0.0
    sampling_period: float = 0.0
    noise_amplitude: float = 0.0
    noise_e: float = 0.0
    noise_a: float = 0.0
    rng_seed: int = 0
    horizon: float = 60.0
    dt: float = 1e-3
    leader: object = "default"
    validated: bool = field(default=False, compare=False)

    @property
    def n_followers(self) -> int:
        return len(self.plants) - 1

    @property
    def tau(self) -> float:
        """Nominal lag used by every controller and observer."""
        return self.plants[0].tau

    @property
    def epsilons(self):
        return tuple(p.epsilon for p in self.plants)

    @property
    def leader_profile(self) -> LeaderProfile:
        return leader_profile(self.leader)


def make_scenario(
    n_followers: int,
    tau: float,
    h: float,
    gains: ControllerGains,
    eso: EsoGains,
    r: float = 3.0,
    epsilons: Optional[Sequence[float]] = None,
    v_init: float = 10.0,
    p0: Optional[Sequence[float]] = None,
    **kwargs,
) -> ScenarioConfig:
    """Convenience builder: equal initial speeds and zero initial spacing errors."""
    n = n_followers + 1
    eps = tuple(epsilons) if epsilons is not None else (0.0,) * n
    plants = tuple(PlantParams(tau, e, i) for i, e in enumerate(eps))
    if p0 is None:
        gap = r + h * v_init
        p0 = tuple(gap * (n - 1 - i) for i in range(n))
    return ScenarioConfig(
        plants=plants,
        spacing=SpacingPolicy(r, h),
        gains=gains,
        eso=eso,
        p0=tuple(float(x) for x in p0),
        v0=(float(v_init),) * n,
        a0=(0.0,) * n,
        **kwargs,
    )


def _check_gains(g: ControllerGains):
    out = []
    for name in ("kp", "kv", "ka"):
        val = getattr(g, name)
        if not (math.isfinite(val) and val > 0):
            out.append(InvalidParameter(name, "must be strictly positive"))
    parts = (g.k, g.mu_p, g.mu_v, g.mu_a)
    if any(p is not None for p in parts):
        if any(p is None for p in parts):
            out.append(InvalidParameter("k", "factored gains need all of k, mu_p, mu_v, mu_a"))
        else:
            for name, mu, direct in (("kp", g.mu_p, g.kp), ("kv", g.mu_v, g.kv), ("ka", g.mu_a, g.ka)):
                if not mu > 0:
                    out.append(InvalidParameter("mu_" + name[1], "must be strictly positive"))
                if not math.isclose(mu * g.k, direct, rel_tol=_REL_TOL, abs_tol=0.0):
                    out.append(InvalidParameter(name, f"factorization mismatch: mu*k={mu * g.k!r} != {direct!r}"))
            if not g.k > 0:
                out.append(InvalidParameter("k", "must be strictly positive"))
    return out


def _check_eso(e: EsoGains):
    out = []
    if not e.beta1 > 0:
        out.append(InvalidParameter("beta1", "must be strictly positive"))
    if not e.beta3 > 0:
        out.append(InvalidParameter("beta3", "must be strictly positive"))
    if not e.beta1 * e.beta2 - e.beta3 > 0:
        out.append(InvalidParameter("beta2", "beta1*beta2 - beta3 must be positive"))
    if e.omega_o is not None:
        w = e.omega_o
        if not w > 0:
            out.append(InvalidParameter("omega_o", "must be strictly positive"))
        else:
            for name, got, want in (("beta1", e.beta1, 3 * w), ("beta2", e.beta2, 3 * w**2), ("beta3", e.beta3, w**3)):
                if not math.isclose(got, want, rel_tol=_REL_TOL):
                    out.append(InvalidParameter(name, f"bandwidth mismatch: expected {want!r} for omega_o={w!r}"))
    return out


def _is_multiple(x, step):
    n = round(x / step)
    return n >= 1 and math.isclose(n * step, x, rel_tol=1e-9, abs_tol=1e-12)


def validate_config(cfg: ScenarioConfig) -> ScenarioConfig:
    """Check every invariant and return a normalized, validated copy.

    Raises InvalidConfig listing each violated invariant.
    """
    problems = []
    n = len(cfg.plants)
    if n < 2:
        problems.append(InvalidParameter("N", "need a leader and at least one follower"))
    for i, p in enumerate(cfg.plants):
        if not (math.isfinite(p.tau) and p.tau > 0):
            problems.append(InvalidParameter(f"plant[{i}].tau", "must be strictly positive"))
            continue
        if not abs(p.epsilon) < 1.0 / p.tau:
            problems.append(InvalidParameter(f"plant[{i}].epsilon", "|epsilon| must be below 1/tau"))
        if p.index != i:
            problems.append(InvalidParameter(f"plant[{i}].index", f"index {p.index} does not match position {i}"))
    if n and len({p.tau for p in cfg.plants}) > 1:
        problems.append(InvalidParameter("tau", "all vehicles share one nominal tau; model errors go in epsilon"))

    if not cfg.spacing.r >= 0:
        problems.append(InvalidParameter("r", "standstill distance must be nonnegative"))
    if not cfg.spacing.h > 0:
        problems.append(InvalidParameter("h", "time headway must be strictly positive"))

    problems += _check_gains(cfg.gains)
    problems += _check_eso(cfg.eso)

    dt = cfg.dt
    delay = cfg.input_delay
    if not (math.isfinite(dt) and dt > 0):
        problems.append(InvalidParameter("dt", "must be strictly positive"))
        dt = None
    if not cfg.horizon > 0:
        problems.append(InvalidParameter("T", "horizon must be strictly positive"))
    if cfg.sampling_period != 0:
        if not cfg.sampling_period > 0:
            problems.append(InvalidParameter("sigma", "sampling period must be 0 or positive"))
        elif dt is not None and not _is_multiple(cfg.sampling_period, dt):
            problems.append(InvalidParameter("sigma", "must be an integer multiple of dt (and >= dt)"))
    if not delay >= 0:
        problems.append(InvalidParameter("phi", "input delay must be nonnegative"))
    elif dt is not None and delay > 0:
        snapped = round(delay / dt) * dt
        if not math.isclose(snapped, delay, rel_tol=1e-9, abs_tol=1e-12):
            warnings.warn(f"input delay {delay} s snapped to {snapped} s (multiple of dt={dt})", stacklevel=2)
            delay = snapped

    for name in ("noise_amplitude", "noise_e", "noise_a"):
        if not getattr(cfg, name) >= 0:
            problems.append(InvalidParameter(name, "noise amplitude must be nonnegative"))

    a0 = cfg.a0 if cfg.a0 is not None else (0.0,) * n
    for name, arr in (("p0", cfg.p0), ("v0", cfg.v0), ("a0", a0)):
        if len(arr) != n:
            problems.append(InvalidParameter(name, f"need {n} initial values, got {len(arr)}"))
        elif not all(math.isfinite(x) for x in arr):
            problems.append(InvalidParameter(name, "initial values must be finite"))

    try:
        prof = cfg.leader_profile
    except InvalidParameter as exc:
        problems.append(exc)
    else:
        problems += prof.check()

    if problems:
        raise InvalidConfig(problems)
    return replace(
        cfg,
        input_delay=delay,
        a0=tuple(float(x) for x in a0),
        p0=tuple(float(x) for x in cfg.p0),
        v0=tuple(float(x) for x in cfg.v0),
        validated=True,
    )
