"""Command-line front end: ``bubblechaos SUBCOMMAND [options]``.

Settings come from the preset, then ``--config`` (flat ``key = value``),
then ``--set key=value`` pairs, then dedicated flags. Numbers are written with
17 significant digits so that CSV output parses back exactly.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .classify import color
from .errors import (BubbleChaosError, ConfigError, IntegrationError, IoError,
                     InvalidParameters)
from .integrator import StepControl, trajectory
from .lyapunov import RATE_UNITS, LyapunovSettings, spectrum
from .model import State
from .params import PARAM_KEYS, PRESETS, nondimensionalize, params_from_mapping, preset, \
    read_keyvalue
from .poincare import section
from .sweep import (ASYM_SEED, CHART_SEEDINGS, DIRECTIONS, SEEDINGS, SWEPT, ChartGrid,
                    ChartSpec, ScanSpec, bifurcation_scan, chart2d, default_ensemble,
                    probe_multistability)

COMMANDS = ("simulate", "spectrum", "poincare", "scan", "chart", "probe")


def _state(text) -> State:
    if isinstance(text, State):
        return text
    parts = [p for p in str(text).replace(" ", "").split(",") if p]
    if len(parts) not in (4, 5):
        raise ConfigError(f"initial state needs 4 or 5 comma-separated numbers, got {text!r}")
    try:
        return State(*map(float, parts))
    except ValueError:
        raise ConfigError(f"initial state is not numeric: {text!r}") from None


def _choice(options):
    def conv(text):
        if text not in options:
            raise ConfigError(f"{text!r} is not one of {list(options)}")
        return text
    return conv


# key -> (converter, default); None defaults fall back to the library default
COMMON_KEYS = {
    "atol": (float, 1e-10),
    "rtol": (float, 1e-10),
    "max_steps": (int, 1_000_000),
    "transient_periods": (int, None),
    "average_periods": (int, None),
    "renorm_interval": (float, None),
    "convergence_window": (float, None),
    "zero_eps": (float, None),
    "rate_unit": (_choice(RATE_UNITS), None),
    "workers": (int, None),
    "rng_seed": (int, 0),
    "ic": (_state, ASYM_SEED),
}
COMMAND_KEYS = {
    "simulate": {"periods": (int, 10), "samples_per_period": (int, 50)},
    "spectrum": {},
    "poincare": {"transient": (int, 1000), "n": (int, 256)},
    "scan": {
        "swept": (_choice(SWEPT), "d_over_r0"), "start": (float, None),
        "stop": (float, None), "steps": (int, 100),
        "direction": (_choice(DIRECTIONS), "forward"),
        "seeding": (_choice(SEEDINGS), "continuation"), "section_points": (int, 128),
        "tree": (str, None),
    },
    "chart": {
        "d_start": (float, 5.0), "d_stop": (float, 35.0), "d_count": (int, 40),
        "p_start": (float, 1.0e6), "p_stop": (float, 1.8e6), "p_count": (int, 40),
        "seeding": (_choice(CHART_SEEDINGS), "fixed"), "section_points": (int, 64),
        "ppm": (str, None),
    },
    "probe": {"n_random": (int, 8), "section_points": (int, 1000), "tol": (float, 1e-3)},
}


@dataclass
class RunConfig:
    """Fully resolved settings of one CLI run."""

    command: str
    params: object
    ctl: StepControl
    settings: LyapunovSettings
    workers: int
    out: str | None
    options: dict = field(default_factory=dict)


def _parse_set(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _convert(key, conv, value):
    if not isinstance(value, str):
        return value
    try:
        return conv(value)
    except ValueError:
        raise ConfigError(f"{key}: invalid value {value!r}") from None


def resolve(args) -> RunConfig:
    """Merge preset, config file, ``--set`` pairs and flags into a RunConfig."""
    raw = {}
    if args.config:
        raw.update(read_keyvalue(args.config))
    raw.update(_parse_set(args.set))
    for key in ("d_over_r0", "p_ac", "atol", "rtol", "workers", "ic"):
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = val
            if key == "d_over_r0":
                raw.pop("d", None)
    allowed = dict(COMMON_KEYS)
    allowed.update(COMMAND_KEYS[args.command])
    unknown = set(raw) - set(allowed) - set(PARAM_KEYS)
    if unknown:
        raise ConfigError(f"unknown keys for {args.command}: {sorted(unknown)}")
    params = params_from_mapping({k: v for k, v in raw.items() if k in PARAM_KEYS},
                                 preset(args.preset))
    opts = {}
    for k, (conv, default) in allowed.items():
        opts[k] = _convert(k, conv, raw[k]) if k in raw else default
    try:
        ctl = StepControl(atol=opts["atol"], rtol=opts["rtol"], max_steps=opts["max_steps"])
        lkw = {k: opts[k] for k in ("transient_periods", "average_periods", "renorm_interval",
                                    "convergence_window", "zero_eps", "rate_unit")
               if opts[k] is not None}
        settings = (LyapunovSettings.chart_grade(**lkw) if args.command == "chart"
                    else LyapunovSettings(**lkw))
    except InvalidParameters as exc:
        raise ConfigError(str(exc)) from exc
    workers = opts["workers"]
    if workers is None:
        env = os.environ.get("BUBBLECHAOS_WORKERS")
        try:
            workers = int(env) if env else 1
        except ValueError:
            raise ConfigError(f"BUBBLECHAOS_WORKERS is not an integer: {env!r}") from None
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    return RunConfig(args.command, params, ctl, settings, workers, args.out, opts)


def fmt(x) -> str:
    """CSV cell text; floats use 17 significant digits."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".16e")
    return str(x)


def write_csv(header, rows, out=None):
    """Write rows to ``out`` (a path or None for stdout); LF line endings, UTF-8."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    text = buf.getvalue()
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {out}: {exc}") from exc


def ppm_bytes(grid: ChartGrid) -> bytes:
    """Binary PPM of a chart: one pixel per cell, top row = highest p_ac."""
    n_p, n_d = grid.shape
    body = bytearray()
    for i_p in range(n_p - 1, -1, -1):
        for i_d in range(n_d):
            c = grid.cell(i_p, i_d)
            rc = c.regime if c.regime is not None and c.status != "collapsed" else None
            body.extend(color(rc))
    return f"P6 {n_d} {n_p} 255\n".encode("ascii") + bytes(body)


def render_ppm(grid: ChartGrid, path) -> None:
    try:
        Path(path).write_bytes(ppm_bytes(grid))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


SCAN_HEADER = ["index", "value", "d_over_r0", "p_ac", "status", "l1", "l2", "stderr1",
               "stderr2", "regime", "synchronous", "period", "sync_deviation"]
CELL_HEADER = ["i_p", "i_d", "d_over_r0", "p_ac", "status", "l1", "l2", "stderr1", "stderr2",
               "regime", "synchronous", "period", "sync_deviation"]


def _regime_cols(rc):
    return (rc.kind.value, rc.synchronous) if rc else (None, None)


def scan_rows(rows):
    for r in rows:
        yield (r.index, r.value, r.d_over_r0, r.p_ac, r.status, r.l1, r.l2, r.stderr1,
               r.stderr2, *_regime_cols(r.regime), r.period, r.sync_deviation)


def cell_rows(grid):
    for c in grid:
        yield (c.i_p, c.i_d, c.d_over_r0, c.p_ac, c.status, c.l1, c.l2, c.stderr1, c.stderr2,
               *_regime_cols(c.regime), c.period, c.sync_deviation)


def cmd_simulate(cfg: RunConfig):
    dp = nondimensionalize(cfg.params)
    o = cfg.options
    n = o["periods"] * o["samples_per_period"]
    taus, ys = trajectory(dp, o["ic"], o["periods"] * dp.period, n, cfg.ctl)
    write_csv(["tau", "r1", "u1", "r2", "u2"],
              ([t, *y[:4]] for t, y in zip(taus, ys)), cfg.out)


def cmd_spectrum(cfg: RunConfig):
    res = spectrum(nondimensionalize(cfg.params), cfg.options["ic"], cfg.ctl, cfg.settings)
    write_csv(["index", "exponent", "stderr", "trivial", "converged"],
              ((i, res.exponents[i], res.stderr[i], i == res.trivial_index, res.converged)
               for i in range(5)), cfg.out)


def cmd_poincare(cfg: RunConfig):
    o = cfg.options
    s = section(nondimensionalize(cfg.params), o["ic"], cfg.ctl, o["transient"], o["n"])
    write_csv(["r1", "u1", "r2", "u2"], s.points, cfg.out)


def _scan_spec(cfg: RunConfig) -> ScanSpec:
    o = cfg.options
    if o["start"] is None or o["stop"] is None:
        raise ConfigError("scan needs start and stop")
    try:
        return ScanSpec(swept=o["swept"], start=o["start"], stop=o["stop"], steps=o["steps"],
                        direction=o["direction"], seeding=o["seeding"], seed=o["ic"],
                        base=cfg.params, section_points=o["section_points"],
                        settings=cfg.settings, ctl=cfg.ctl)
    except InvalidParameters as exc:
        raise ConfigError(str(exc)) from exc


def cmd_scan(cfg: RunConfig):
    rows = bifurcation_scan(_scan_spec(cfg))
    write_csv(SCAN_HEADER, scan_rows(rows), cfg.out)
    if cfg.options["tree"]:
        write_csv(["index", "value", "r1"],
                  ((r.index, r.value, x) for r in rows for x in r.tree), cfg.options["tree"])


def cmd_chart(cfg: RunConfig):
    o = cfg.options
    try:
        spec = ChartSpec(d_range=(o["d_start"], o["d_stop"], o["d_count"]),
                         p_range=(o["p_start"], o["p_stop"], o["p_count"]),
                         seeding=o["seeding"], seed=o["ic"], base=cfg.params,
                         section_points=o["section_points"], settings=cfg.settings,
                         ctl=cfg.ctl)
    except InvalidParameters as exc:
        raise ConfigError(str(exc)) from exc
    grid = chart2d(spec, cfg.workers)
    write_csv(CELL_HEADER, cell_rows(grid), cfg.out)
    ppm = o["ppm"]
    if ppm is None:
        ppm = str(Path(cfg.out).with_suffix(".ppm")) if cfg.out not in (None, "-") \
            else "chart.ppm"
    render_ppm(grid, ppm)


def cmd_probe(cfg: RunConfig):
    o = cfg.options
    ensemble = default_ensemble(o["n_random"], o["rng_seed"])
    if o["ic"] not in ensemble:
        ensemble.append(o["ic"])
    p = cfg.params
    rep = probe_multistability((p.d_over_r0, p.p_ac), ensemble, cfg.ctl, cfg.settings, p,
                               o["section_points"], o["tol"], cfg.workers)
    rows = []
    for k, a in enumerate(rep.attractors):
        s = a.seed
        rows.append((k, a.regime.kind.value, a.regime.synchronous, a.fingerprint.detected_period,
                     a.l1, a.l2, a.stderr1, a.stderr2, a.fingerprint.sync_deviation,
                     a.fingerprint.cloud_radius, len(a.seeds), s.r1, s.u1, s.r2, s.u2))
    write_csv(["attractor", "regime", "synchronous", "period", "l1", "l2", "stderr1", "stderr2",
               "sync_deviation", "cloud_radius", "seeds", "seed_r1", "seed_u1", "seed_r2",
               "seed_u2"], rows, cfg.out)
    for seed, status in rep.dropped:
        print(f"dropped seed {seed.as_array()[:4].tolist()}: {status}", file=sys.stderr)


HANDLERS = {
    "simulate": cmd_simulate, "spectrum": cmd_spectrum, "poincare": cmd_poincare,
    "scan": cmd_scan, "chart": cmd_chart, "probe": cmd_probe,
}


def _key_help(command):
    keys = dict(COMMON_KEYS)
    keys.update(COMMAND_KEYS[command])
    parts = []
    for k, (_, d) in keys.items():
        d = d.as_array()[:4].tolist() if isinstance(d, State) else d
        parts.append(f"{k}={'(library default)' if d is None else d}")
    return "config keys: " + ", ".join(parts) + "; plus physical parameters " + \
        ", ".join(PARAM_KEYS)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value settings file")
    common.add_argument("--preset", default="sonovue-1.72um", choices=sorted(PRESETS))
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one setting (repeatable)")
    common.add_argument("--atol", type=float, help="absolute tolerance (default 1e-10)")
    common.add_argument("--rtol", type=float, help="relative tolerance (default 1e-10)")
    common.add_argument("--workers", type=int,
                        help="worker processes (default $BUBBLECHAOS_WORKERS or 1)")
    common.add_argument("--out", metavar="PATH", help="CSV output path (default stdout)")
    common.add_argument("--d-over-r0", dest="d_over_r0", type=float,
                        help="centre distance in units of R0")
    common.add_argument("--p-ac", dest="p_ac", type=float, help="drive amplitude, Pa")
    common.add_argument("--ic", help="initial state r1,u1,r2,u2[,theta]")
    parser = argparse.ArgumentParser(
        prog="bubblechaos",
        description="Dynamics of two coupled encapsulated microbubbles.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "simulate": "trajectory CSV: tau, r1, u1, r2, u2",
        "spectrum": "all five Lyapunov exponents with standard errors",
        "poincare": "section points at drive-phase zero",
        "scan": "one-parameter bifurcation scan",
        "chart": "two-parameter Lyapunov chart (CSV + PPM)",
        "probe": "distinct attractors reached from an ensemble of seeds",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], description=helps[name],
                       epilog=_key_help(name))
    return parser


def _error_line(exc, context=None) -> str:
    rec = {"error": type(exc).__name__, "message": str(exc)}
    if context:
        rec["context"] = context
    return json.dumps(rec)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(_error_line(exc, args.command), file=sys.stderr)
        return 2
    except IoError as exc:
        print(_error_line(exc, args.command), file=sys.stderr)
        return 4
    except (IntegrationError, BubbleChaosError, ArithmeticError) as exc:
        print(_error_line(exc, args.command), file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
