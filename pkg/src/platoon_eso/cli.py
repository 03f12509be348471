"""Command-line front end.

Exit codes: 0 success, 1 a check failed (or the run diverged), 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import io as pio
from .certify import thm1_check, thm3_check
from .config import ControllerGains, EsoGains, make_scenario, validate_config
from .errors import DivergenceDetected, InvalidConfig, InvalidParameter, PlatoonError
from .presets import evaluate_preset, preset_registry
from .sim import metrics, simulate
from .string_stability import (
    HINF_TOL,
    OMEGA_WINDOW,
    frequency_response_table,
    gei_coefficients,
    gei_coefficients_uncertain,
    hinf_sweep,
    impulse_nonneg,
    thm2_check,
    thm4_check,
)

log = logging.getLogger("platoon_eso")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "plant.N": "5",
    "plant.tau": "0.1",
    "plant.eps": "",
    "spacing.h": "0.3",
    "spacing.r": "3",
    "gains.kp": "8",
    "gains.kv": "40",
    "gains.ka": "1.2",
    "eso.omega_o": "15",
    "eso.beta": "",
    "sim.T": "60",
    "sim.dt": "0.001",
    "sim.phi": "0",
    "sim.sigma": "0",
    "sim.noise": "0",
    "sim.noise_e": "0",
    "sim.noise_a": "0",
    "sim.seed": "0",
    "sim.leader": "default",
    "init.v": "10",
}

# command-line flag -> config key
FLAGS = {
    "N": "plant.N", "tau": "plant.tau", "eps": "plant.eps",
    "h": "spacing.h", "r": "spacing.r",
    "kp": "gains.kp", "kv": "gains.kv", "ka": "gains.ka",
    "wo": "eso.omega_o", "beta": "eso.beta",
    "T": "sim.T", "dt": "sim.dt", "phi": "sim.phi", "sigma": "sim.sigma",
    "noise": "sim.noise", "noise_e": "sim.noise_e", "noise_a": "sim.noise_a",
    "seed": "sim.seed", "leader": "sim.leader", "v0": "init.v",
}


class UsageError(Exception):
    pass


def parse_config_text(text, origin="<config>"):
    """Flat ``key = value`` lines with dotted keys; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{origin}:{lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in DEFAULTS:
            raise UsageError(f"{origin}:{lineno}: unknown key {key!r}")
        out[key] = val
    return out


def _floats(text, name):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InvalidParameter(name, f"not a number list: {text!r}") from None


def _num(values, key, kind=float):
    try:
        return kind(values[key])
    except ValueError:
        raise InvalidParameter(key, f"not a number: {values[key]!r}") from None


def resolve_values(args):
    values = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                values.update(parse_config_text(fh.read(), args.config))
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
    for flag, key in FLAGS.items():
        val = getattr(args, flag, None)
        if val is not None:
            values[key] = str(val)
    return values


def build_config(values):
    N = _num(values, "plant.N", int)
    tau = _num(values, "plant.tau")
    eps = _floats(values["plant.eps"], "plant.eps") or [0.0] * (N + 1)
    if len(eps) != N + 1:
        raise InvalidParameter("plant.eps", f"need {N + 1} values (leader first), got {len(eps)}")
    gains = ControllerGains(_num(values, "gains.kp"), _num(values, "gains.kv"), _num(values, "gains.ka"))
    if values["eso.beta"]:
        b = _floats(values["eso.beta"], "eso.beta")
        if len(b) != 3:
            raise InvalidParameter("eso.beta", "need three observer gains")
        eso = EsoGains(*b)
    else:
        eso = EsoGains.from_bandwidth(_num(values, "eso.omega_o"))
    cfg = make_scenario(
        N, tau, _num(values, "spacing.h"), gains, eso, r=_num(values, "spacing.r"),
        epsilons=eps, v_init=_num(values, "init.v"),
        horizon=_num(values, "sim.T"), dt=_num(values, "sim.dt"),
        input_delay=_num(values, "sim.phi"), sampling_period=_num(values, "sim.sigma"),
        noise_amplitude=_num(values, "sim.noise"), noise_e=_num(values, "sim.noise_e"),
        noise_a=_num(values, "sim.noise_a"), rng_seed=_num(values, "sim.seed", int),
        leader=values["sim.leader"],
    )
    return validate_config(cfg)


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _fmt(vals):
    return " ".join(f"{x:.9g}" for x in np.atleast_1d(vals))


def metrics_report(m):
    lines = ["# trajectory metrics"]
    for name in ("peak_error", "terminal_error", "steady_peak_error", "l2_error", "eso_rms", "velocity_error"):
        lines.append(f"METRIC {name} = {_fmt(getattr(m, name))}")
    for name in ("peak_ratio", "l2_ratio"):
        vals = getattr(m, name)
        lines.append(f"METRIC {name} = " + " ".join("n/a" if v is None else f"{v:.9g}" for v in vals))
    lines.append(f"METRIC t_transient = {m.t_transient:g}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------- commands ----

def cmd_simulate(args):
    cfg = build_config(resolve_values(args))
    try:
        traj = simulate(cfg)
    except DivergenceDetected as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_FAIL
    pio.emit_trajectory_csv(traj, args.out, args.output_period)
    m = metrics(traj, args.t_transient)
    _write(metrics_report(m), args.report)
    if args.svg:
        pio.svg_line_chart(args.svg, traj.t, {f"e{i + 1}": traj.e[:, i] for i in range(traj.n_followers)},
                           title="spacing errors", xlabel="t [s]", ylabel="e [m]")
    return EXIT_OK


def cmd_certify(args):
    cfg = build_config(resolve_values(args))
    rep = thm3_check(cfg, args.epsbar) if args.epsbar is not None else thm1_check(cfg)
    _write(rep.to_text(), args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _factored(gains, k):
    k = 1.0 if k is None else k
    return k, gains.kp / k, gains.kv / k, gains.ka / k


def cmd_string_stability(args):
    cfg = build_config(resolve_values(args))
    g, eso, h, tau = cfg.gains, cfg.eso, cfg.spacing.h, cfg.tau
    window = (args.wmin, args.wmax)
    lines = []
    tf = gei_coefficients(g, eso, h, tau)
    lines.append("# spacing-error transfer function (ascending powers of s)")
    lines.append(f"VALUE numerator = {_fmt(tf.num)}")
    lines.append(f"VALUE denominator = {_fmt(tf.den)}")
    k, mp, mv, ma = _factored(g, args.k)
    if args.epsbar is None:
        rep = thm2_check(mp, mv, ma, eso.omega_o or eso.beta3 ** (1 / 3), k, h, tau)
        sweeps = [("nominal", tf)]
    else:
        rep = thm4_check(mp, mv, ma, eso.omega_o or eso.beta3 ** (1 / 3), k, h, tau, args.epsbar)
        bs = np.linspace(1 / tau - args.epsbar, 1 / tau + args.epsbar, 22)
        sweeps = [(f"b={b:.6g}", gei_coefficients_uncertain(g, eso, h, tau, b)) for b in bs]
    worst = (-math.inf, None, None)
    for label, t in sweeps:
        m, w = hinf_sweep(t, *window, args.points)
        lines.append(f"VALUE hinf[{label}] = {m:.12g} at w={w:.6g}")
        if m > worst[0]:
            worst = (m, w, t)
    hinf_ok = worst[0] <= 1.0 + HINF_TOL
    lines.append(f"CHECK hinf: {'PASS' if hinf_ok else 'FAIL'} value={worst[0]:.12g} bound={1 + HINF_TOL:.12g}")
    try:
        imp = impulse_nonneg(worst[2])
        lines.append(f"CHECK impulse_nonnegative: {'PASS' if imp.nonnegative() else 'FAIL'} "
                     f"value={imp.min_value:.6g} bound={-1e-6 * imp.peak:.6g}")
        lines.append(f"VALUE impulse_integral = {imp.integral:.9g}")
    except PlatoonError as exc:
        lines.append(f"# impulse check skipped: {exc}")
    text = "\n".join(lines) + "\n" + rep.to_text()
    _write(text, args.out)
    if args.csv:
        grid = np.geomspace(*window, args.points)
        pio.emit_frequency_csv(args.csv, frequency_response_table(worst[2], grid))
    if args.svg:
        grid = np.geomspace(*window, args.points)
        pio.svg_line_chart(args.svg, grid, {label: t.magnitude(grid) for label, t in sweeps[:4]},
                           title="|G(jw)|", xlabel="w [rad/s]", ylabel="magnitude", logx=True)
    return EXIT_OK if hinf_ok else EXIT_FAIL


def cmd_preset(args):
    presets = {p.name: p for p in preset_registry()}
    if args.list or not args.name:
        for p in presets.values():
            print(f"{p.name:22s} expected={p.expected:22s} {p.description}")
        return EXIT_OK
    if args.name not in presets:
        raise UsageError(f"unknown preset {args.name!r}; choose from {', '.join(presets)}")
    outcome = evaluate_preset(presets[args.name])
    print("\n".join(outcome.summary_lines()))
    os.makedirs(args.outdir, exist_ok=True)
    base = os.path.join(args.outdir, args.name)
    runs = [(label, tr) for label, (tr, _) in outcome.runs.items() if tr is not None]
    if len(runs) == 1:
        pio.emit_trajectory_csv(runs[0][1], base + ".csv", args.output_period)
    elif runs:
        t = runs[0][1].t
        rows = pio.output_rows(t, args.output_period)
        cols = ["t"] + [f"e1[{label}]" for label, _ in runs]
        pio.emit_table_csv(base + ".csv", cols, np.column_stack([t] + [tr.e[:, 0] for _, tr in runs])[rows])
    if args.svg and runs:
        if len(runs) == 1:
            tr = runs[0][1]
            series = {f"e{i + 1}": tr.e[:, i] for i in range(tr.n_followers)}
        else:
            series = {label: tr.e[:, 0] for label, tr in runs}
        pio.svg_line_chart(base + ".svg", runs[0][1].t, series, title=args.name, xlabel="t [s]", ylabel="e [m]")
    return EXIT_OK if outcome.matches else EXIT_FAIL


def _parse_values(args):
    if args.values:
        return _floats(args.values, "--values")
    try:
        start, stop, num = args.range.split(":")
        grid = np.geomspace if args.log else np.linspace
        return list(grid(float(start), float(stop), int(num)))
    except (AttributeError, ValueError):
        raise UsageError("give --values a,b,c or --range start:stop:num") from None


def _sweep_point(task):
    values, key, value, check, epsbar = task
    values = dict(values)
    values[key] = repr(float(value))
    try:
        cfg = build_config(values)
    except (InvalidConfig, InvalidParameter) as exc:
        return value, "INVALID", str(exc)
    g, h, tau = cfg.gains, cfg.spacing.h, cfg.tau
    if check == "thm1":
        rep = thm1_check(cfg)
        return value, "PASS" if rep.passed else "FAIL", f"ka_max={rep.intermediates.get('ka_max', float('nan')):.6g}"
    if check == "thm3":
        rep = thm3_check(cfg, epsbar)
        return value, "PASS" if rep.passed else "FAIL", f"ka_max={rep.intermediates.get('ka_max', float('nan')):.6g}"
    if check == "hinf":
        m, w = hinf_sweep(gei_coefficients(g, cfg.eso, h, tau))
        return value, "PASS" if m <= 1 + HINF_TOL else "FAIL", f"hinf={m:.12g} w={w:.6g}"
    try:
        traj = simulate(cfg)
    except DivergenceDetected as exc:
        return value, "FAIL", f"diverged t={exc.time:.6g}"
    m = metrics(traj, cfg.horizon - 10.0 if cfg.horizon > 10.0 else 0.0)
    ok = m.terminal_error.max() < 1e-3 and m.velocity_error.max() < 1e-3
    return value, "PASS" if ok else "FAIL", f"terminal={m.terminal_error.max():.6g}"


def cmd_sweep(args):
    values = resolve_values(args)
    key = FLAGS.get(args.param, args.param)
    if key not in DEFAULTS:
        raise UsageError(f"unknown sweep parameter {args.param!r}")
    build_config(values)  # fail fast on a bad base configuration
    if args.check == "thm3" and args.epsbar is None:
        raise UsageError("--check thm3 needs --epsbar")
    tasks = [(values, key, v, args.check, args.epsbar) for v in _parse_values(args)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    out = [f"# sweep {key} check={args.check}", f"{'value':>14s}  verdict  detail"]
    out += [f"{v:14.6g}  {verdict:7s}  {detail}" for v, verdict, detail in rows]
    _write("\n".join(out) + "\n", args.out)
    return EXIT_OK if all(r[1] == "PASS" for r in rows) else EXIT_FAIL


# ------------------------------------------------------------- parser ----

def _add_scenario_flags(p):
    p.add_argument("--config", help="key = value file with dotted keys")
    g = p.add_argument_group("scenario (override the config file)")
    g.add_argument("--N", type=int, help="number of followers")
    g.add_argument("--tau", type=float, help="nominal actuator lag [s]")
    g.add_argument("--eps", help="comma-separated lag-pole errors, leader first")
    g.add_argument("--h", type=float, help="time headway [s]")
    g.add_argument("--r", type=float, help="standstill distance [m]")
    g.add_argument("--kp", type=float)
    g.add_argument("--kv", type=float)
    g.add_argument("--ka", type=float)
    g.add_argument("--wo", type=float, help="observer bandwidth [rad/s]")
    g.add_argument("--beta", help="explicit observer gains b1,b2,b3 (overrides --wo)")
    g.add_argument("--T", type=float, help="horizon [s]")
    g.add_argument("--dt", type=float, help="integration step [s]")
    g.add_argument("--phi", type=float, help="input delay [s]")
    g.add_argument("--sigma", type=float, help="sampling period [s], 0 for continuous control")
    g.add_argument("--noise", type=float, help="uniform noise amplitude on relative velocity")
    g.add_argument("--noise-e", dest="noise_e", type=float, help="uniform noise amplitude on spacing error")
    g.add_argument("--noise-a", dest="noise_a", type=float, help="uniform noise amplitude on acceleration")
    g.add_argument("--seed", type=int)
    g.add_argument("--leader", help="leader profile name (default, constant)")
    g.add_argument("--v0", type=float, help="initial speed of every vehicle [m/s]")


def build_parser():
    parser = argparse.ArgumentParser(prog="platoon-eso", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario, write trajectory CSV and metrics")
    _add_scenario_flags(p)
    p.add_argument("--out", default="trajectory.csv")
    p.add_argument("--report", default="-", help="metrics report path ('-' for stdout)")
    p.add_argument("--output-period", type=float, default=pio.DEFAULT_OUTPUT_PERIOD)
    p.add_argument("--t-transient", type=float, default=2.0)
    p.add_argument("--svg")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("certify", help="closed-loop stability certificate")
    _add_scenario_flags(p)
    p.add_argument("--epsbar", type=float, help="bound on |eps_i|; selects the uncertain-plant test")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("string-stability", help="transfer function, H-inf sweep and sufficient conditions")
    _add_scenario_flags(p)
    p.add_argument("--k", type=float, help="common gain factor for the sufficient conditions (default 1)")
    p.add_argument("--epsbar", type=float, help="bound on |eps|; selects the uncertain-plant test")
    p.add_argument("--wmin", type=float, default=OMEGA_WINDOW[0])
    p.add_argument("--wmax", type=float, default=OMEGA_WINDOW[1])
    p.add_argument("--points", type=int, default=2000)
    p.add_argument("--csv", help="frequency-response CSV (omega, magnitude, phase)")
    p.add_argument("--svg")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_string_stability)

    p = sub.add_parser("preset", help="run a named reference scenario end to end")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true")
    p.add_argument("--outdir", default=".")
    p.add_argument("--output-period", type=float, default=pio.DEFAULT_OUTPUT_PERIOD)
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("sweep", help="grid over one parameter, pass/fail table")
    _add_scenario_flags(p)
    p.add_argument("--param", required=True, help="flag name (kp, h, ...) or dotted config key")
    p.add_argument("--values", help="comma-separated values")
    p.add_argument("--range", help="start:stop:num")
    p.add_argument("--log", action="store_true", help="log-spaced --range")
    p.add_argument("--check", choices=("thm1", "thm3", "hinf", "simulate"), default="hinf")
    p.add_argument("--epsbar", type=float)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)
    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, InvalidConfig, InvalidParameter) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
