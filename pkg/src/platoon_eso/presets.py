"""Named scenarios reproducing the reference experiments.

Each preset carries a full scenario and the outcome it is expected to show:

* ``converges``: noise-free run ends with every spacing error and velocity
  mismatch below 1e-3;
* ``bounded-neighborhood``: no divergence and spacing errors stay within
  0.2 m over the final 10 s;
* ``string-unstable``: the nominal spacing-error transfer function has an
  H-infinity norm above one while the closed loop itself stays stable.

A run can show several of these at once (a string-unstable loop still
converges); a preset matches when its expected descriptor is among them.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .config import ControllerGains, EsoGains, ScenarioConfig, make_scenario, validate_config
from .errors import DivergenceDetected
from .sim import metrics, simulate
from .string_stability import HINF_TOL, gei_coefficients, hinf_sweep

EXPECTED_OUTCOMES = ("converges", "bounded-neighborhood", "string-unstable")

TAU = 0.1
EPSILONS = (-0.8, 0.1, 0.5, -0.2, 0.65, -0.3)
INITIAL_POSITIONS = (30.0, 24.0, 18.0, 12.0, 6.0, 0.0)
NOMINAL_GAINS = ControllerGains(8.0, 40.0, 1.2)
SLOW_GAINS = ControllerGains(0.05, 0.6, 0.8)
SMALL_HEADWAY_GAINS = ControllerGains(0.01, 0.2, 0.8)

CONVERGENCE_TOL = 1e-3
NEIGHBORHOOD_TOL = 0.2
NEIGHBORHOOD_WINDOW = 10.0


@dataclass(frozen=True)
class ScenarioPreset:
    name: str
    config: ScenarioConfig
    expected: str
    description: str = ""
    # (label, gains) pairs run on top of ``config``; empty for single runs
    variations: tuple = ()


def _base(h, gains, omega_o, horizon=60.0, **kw):
    return make_scenario(
        5, TAU, h, gains, EsoGains.from_bandwidth(omega_o), r=3.0,
        epsilons=EPSILONS, v_init=10.0, p0=INITIAL_POSITIONS, horizon=horizon, **kw,
    )


def _gain_study():
    g = NOMINAL_GAINS
    out = []
    for kp in (4.0, 8.0, 16.0):
        out.append((f"kp={kp:g}", replace(g, kp=kp)))
    for kv in (20.0, 40.0, 80.0):
        out.append((f"kv={kv:g}", replace(g, kv=kv)))
    for ka in (0.6, 1.2, 2.4):
        out.append((f"ka={ka:g}", replace(g, ka=ka)))
    return tuple(out)


def preset_registry():
    """The five reference scenarios, each already validated."""
    presets = [
        ScenarioPreset(
            "fig2-nominal", _base(0.3, NOMINAL_GAINS, 15.0), "converges",
            "uncertain lags, continuous control, no noise or delay",
        ),
        ScenarioPreset(
            "fig3-delay-noise",
            _base(0.3, SLOW_GAINS, 10.0, horizon=100.0, input_delay=0.2,
                  sampling_period=0.002, noise_amplitude=0.005, rng_seed=2024),
            "bounded-neighborhood",
            "0.2 s input delay, 2 ms sampling, uniform noise on relative velocity",
        ),
        ScenarioPreset(
            "fig4a-h001-unstable", _base(0.01, NOMINAL_GAINS, 15.0), "string-unstable",
            "headway 0.01 s with the nominal gains",
        ),
        ScenarioPreset(
            "fig4b-h001-restab", _base(0.01, SMALL_HEADWAY_GAINS, 15.0, horizon=200.0), "converges",
            "headway 0.01 s with retuned gains (slow convergence)",
        ),
        ScenarioPreset(
            "fig5-gain-study", _base(0.3, NOMINAL_GAINS, 15.0), "converges",
            "one gain varied at a time, first follower's spacing error",
            variations=_gain_study(),
        ),
    ]
    return [replace(p, config=validate_config(p.config)) for p in presets]


def get_preset(name) -> ScenarioPreset:
    for p in preset_registry():
        if p.name == name:
            return p
    raise KeyError(name)


@dataclass
class PresetOutcome:
    name: str
    expected: str
    observed: tuple  # every outcome descriptor that holds for this run
    hinf: tuple
    runs: dict  # label -> (trajectory or None, metrics or None)

    @property
    def matches(self) -> bool:
        return self.expected in self.observed

    def summary_lines(self):
        lines = [f"preset {self.name}: expected={self.expected} observed={','.join(self.observed) or 'none'} "
                 f"{'MATCH' if self.matches else 'MISMATCH'}",
                 f"hinf_nominal = {self.hinf[0]:.12g} at w={self.hinf[1]:.6g}"]
        for label, (_, m) in self.runs.items():
            if m is None:
                lines.append(f"[{label}] diverged")
                continue
            ratio = m.max_l2_ratio()
            lines.append(
                f"[{label}] peak|e|={m.peak_error.max():.6g} terminal|e|={m.terminal_error.max():.6g} "
                f"steady|e|={m.steady_peak_error.max():.6g} |v-v0|={m.velocity_error.max():.6g} "
                f"max_l2_ratio={'n/a' if ratio is None else f'{ratio:.6g}'} eso_rms={m.eso_rms.max():.6g}")
        return lines


def observed_outcomes(runs, hinf_max):
    """Descriptors supported by the runs; they are not mutually exclusive."""
    ms = [m for _, m in runs.values()]
    if any(m is None for m in ms):
        return ("diverges",)
    out = []
    if all(m.terminal_error.max() < CONVERGENCE_TOL and m.velocity_error.max() < CONVERGENCE_TOL for m in ms):
        out.append("converges")
    if all(m.steady_peak_error.max() <= NEIGHBORHOOD_TOL for m in ms):
        out.append("bounded-neighborhood")
    if hinf_max > 1.0 + HINF_TOL:
        out.append("string-unstable")
    return tuple(out)


def evaluate_preset(preset: ScenarioPreset, t_transient=None) -> PresetOutcome:
    """Simulate a preset (and its variations) and classify what it shows."""
    cfg = preset.config
    t_late = cfg.horizon - NEIGHBORHOOD_WINDOW if t_transient is None else t_transient
    cases = preset.variations or (("base", cfg.gains),)
    runs = {}
    for label, gains in cases:
        try:
            traj = simulate(replace(cfg, gains=gains, validated=False))
        except DivergenceDetected:
            runs[label] = (None, None)
            continue
        runs[label] = (traj, metrics(traj, t_late))
    hinf = hinf_sweep(gei_coefficients(cfg.gains, cfg.eso, cfg.spacing.h, cfg.tau))
    return PresetOutcome(preset.name, preset.expected, observed_outcomes(runs, hinf[0]), hinf, runs)
