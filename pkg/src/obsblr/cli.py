"""Command-line front end: ``obsblr {eval,sweep,qos,simulate,compare,figure}``."""

import argparse
import json
import math
import os
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import figures
from .analytic import SwitchParams, TimingSpec, blr_fixed_blocking, burst_loss_rate, slots_per_burst
from .errors import ObsError
from .qos import QosParams, class_blr
from .sim import SimConfig, simulate, simulate_qos

EXIT_OK = 0
EXIT_USAGE = 2

SWEEP_PARAMS = {
    "arrival_prob": "A",
    "conversion_capability": "rho",
    "slots_per_burst": "ell",
    "wavelengths": "w",
    "reserved_L0": "L0",
    "fixed_blocking": "pb",
}
_INTEGER_PARAMS = {"ell", "w", "L0"}
_SIM_SWEEPS = ("arrival_prob", "conversion_capability", "slots_per_burst", "wavelengths")


class UsageError(ObsError):
    pass


def fmt(value) -> str:
    """Shortest round-trip text of ``value`` rounded to 12 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    value = float(value)
    if math.isnan(value):
        return "nan"
    return repr(float(f"{value:.12g}"))


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) else float(f"{value:.12g}")
    return value


def read_config(path: str) -> Dict[str, str]:
    """Parse a flat ``key=value`` file; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = value
    return out


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--config", help="key=value file; command-line flags take precedence")
    parser.add_argument("--out", help="output file (directory for 'figure'); default stdout")
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed (unsigned 64-bit)")


def _switch_flags(parser):
    parser.add_argument("--w", type=int, help="wavelengths")
    parser.add_argument("--ell", type=int, help="slots per burst")
    parser.add_argument("--rho", type=float, help="conversion capability")
    parser.add_argument("--A", type=float, help="arrival probability")
    parser.add_argument("--t-off", type=float, help="offset time; with --t-b and --t-s derives ell")
    parser.add_argument("--t-b", type=float, help="data burst time")
    parser.add_argument("--t-s", type=float, help="slot time")
    parser.add_argument("--t-c", type=float, default=1e-9, help="control burst time")


def _qos_flags(parser):
    parser.add_argument("--N", type=int, help="total wavelengths")
    parser.add_argument("--L0", type=int, help="wavelengths reserved for class 0")
    parser.add_argument("--S0", type=float, help="class-0 traffic share")


def _sim_flags(parser):
    parser.add_argument("--horizon", type=int, default=100_000)
    parser.add_argument("--warmup", type=int, default=None, help="default 5%% of horizon")
    parser.add_argument("--replications", type=int, default=10)
    parser.add_argument("--selection", choices=("uniform", "lowest"), default="uniform")


def _grid_flags(parser):
    parser.add_argument("--param", choices=sorted(SWEEP_PARAMS))
    parser.add_argument("--values", help="comma-separated grid")
    parser.add_argument("--range", dest="grid_range", help="start,stop,count")
    parser.add_argument("--scale", choices=("linear", "log"), default="linear")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obsblr", description="Burst loss rate of a slotted OBS node.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="analytic BLR at one point")
    _common(p)
    _switch_flags(p)

    p = sub.add_parser("sweep", help="analytic BLR over a grid of one parameter")
    _common(p)
    _switch_flags(p)
    _qos_flags(p)
    _grid_flags(p)

    p = sub.add_parser("qos", help="per-class BLR of the two-class model")
    _common(p)
    _qos_flags(p)
    p.add_argument("--ell", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--A", type=float)
    p.add_argument("--rounding", choices=("half_away", "half_even"), default="half_away")

    p = sub.add_parser("simulate", help="Monte Carlo estimate of the BLR")
    _common(p)
    _switch_flags(p)
    _sim_flags(p)
    p.add_argument("--qos", action="store_true", help="two-class variant; needs --L0 and --S0")
    p.add_argument("--L0", type=int)
    p.add_argument("--S0", type=float)

    p = sub.add_parser("compare", help="analytic vs simulated BLR over a grid")
    _common(p)
    _switch_flags(p)
    _sim_flags(p)
    _grid_flags(p)

    p = sub.add_parser("figure", help="write figure_<id>.csv for a preset figure")
    _common(p)
    p.add_argument("id", type=int)
    return parser


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            config = read_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = sorted(set(config) - known)
        if unknown:
            raise UsageError(f"unknown config keys for '{args.command}': {', '.join(unknown)}")
        subparser.set_defaults(**config)
        args = parser.parse_args(argv)
    return args


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required " + ", ".join(f"--{n}" for n in missing))


def _ell_from(args) -> int:
    timing = (args.t_off, args.t_b, args.t_s)
    if all(v is not None for v in timing):
        ell = slots_per_burst(TimingSpec(args.t_c, args.t_off, args.t_b, args.t_s))
        if args.ell is not None and args.ell != ell:
            raise UsageError(f"--ell {args.ell} disagrees with timing-derived ell={ell}")
        return ell
    if any(v is not None for v in timing):
        raise UsageError("--t-off, --t-b and --t-s must be given together")
    _require(args, "ell")
    return args.ell


def _switch(args, skip: Optional[str] = None) -> Dict[str, float]:
    values = {}
    for name in ("w", "ell", "rho", "A"):
        if name == skip:
            continue
        if name == "ell":
            values[name] = _ell_from(args)
        else:
            _require(args, name)
            values[name] = getattr(args, name)
    return values


def _effective(args) -> Dict[str, object]:
    return {k: v for k, v in sorted(vars(args).items()) if v is not None}


class Output:
    def __init__(self, args):
        self.args = args
        self.lines: List[str] = []

    def csv(self, header: Sequence[str], rows: Sequence[Sequence[object]],
            trailer: Sequence[str] = ()):
        self.lines.append(",".join(header))
        for row in rows:
            self.lines.append(",".join(fmt(v) for v in row))
        self.lines.extend(f"# {t}" for t in trailer)

    def json(self, payload):
        self.lines.append(json.dumps(payload, sort_keys=False))

    def records(self, header, rows, extra=None):
        """Emit rows as CSV or as a JSON document, per --format."""
        if self.args.format == "csv":
            self.csv(header, rows, trailer=(extra or {}).get("trailer", ()))
        else:
            payload = {"records": [dict(zip(header, map(_json_value, r))) for r in rows]}
            for key, value in (extra or {}).items():
                if key != "trailer":
                    payload[key] = value
            payload["config"] = {k: _json_value(v) for k, v in _effective(self.args).items()}
            self.json(payload)

    def flush(self):
        text = "\n".join(self.lines) + "\n"
        if self.args.out:
            with open(self.args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _regime(p: SwitchParams) -> str:
    return "" if p.in_derivation_regime else "w_ge_ell"


def cmd_eval(args, out: Output):
    p = SwitchParams(**_switch(args))
    header = ["w", "ell", "rho", "A", "u", "blr", "regime_warning"]
    row = [p.w, p.ell, p.rho, p.A, p.u, burst_loss_rate(p), _regime(p)]
    out.records(header, [row])


def parse_grid(args) -> List[float]:
    if (args.values is None) == (args.grid_range is None):
        raise UsageError("give exactly one of --values or --range")
    if args.values is not None:
        items = [s for s in args.values.split(",") if s.strip()]
        grid = [float(s) for s in items]
    else:
        parts = args.grid_range.split(",")
        if len(parts) != 3:
            raise UsageError("--range expects start,stop,count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise UsageError("--range count must be >= 1")
        if args.scale == "log":
            if start <= 0 or stop <= 0:
                raise UsageError("log-scaled ranges need positive endpoints")
            grid = list(np.geomspace(start, stop, count))
        else:
            grid = list(np.linspace(start, stop, count))
    if not grid:
        raise UsageError("grid is empty")
    grid = [float(g) for g in grid]
    name = SWEEP_PARAMS[args.param]
    if name in _INTEGER_PARAMS:
        if any(g != int(g) for g in grid):
            raise UsageError(f"--param {args.param} needs integer grid values")
        grid = [int(g) for g in grid]
    return grid


def _sweep_point(args, name: str, value) -> SwitchParams:
    base = _switch(args, skip=name)
    base[name] = value
    return SwitchParams(**base)


def cmd_sweep(args, out: Output):
    _require(args, "param")
    grid = parse_grid(args)
    name = SWEEP_PARAMS[args.param]
    rows = []
    if name == "L0":
        _require(args, "N", "S0", "rho", "A")
        ell = _ell_from(args)
        header = ["param", "value", "N", "L0", "S0", "ell", "rho", "A", "blr_0", "blr_1"]
        for L0 in grid:
            res = class_blr(QosParams(args.N, L0, args.S0), ell, args.rho, args.A)
            rows.append([args.param, L0, args.N, L0, args.S0, ell, args.rho, args.A, *res.blr])
    elif name == "pb":
        _require(args, "w", "A")
        ell = _ell_from(args)
        header = ["param", "value", "w", "ell", "rho", "A", "blr"]
        rho = args.rho if args.rho is not None else 0.0
        for pb in grid:
            rows.append([args.param, pb, args.w, ell, rho, args.A,
                         blr_fixed_blocking(args.w, ell, args.A, pb)])
    else:
        header = ["param", "value", "w", "ell", "rho", "A", "blr"]
        for value in grid:
            p = _sweep_point(args, name, value)
            rows.append([args.param, value, p.w, p.ell, p.rho, p.A, burst_loss_rate(p)])
    out.records(header, rows)


def cmd_qos(args, out: Output):
    _require(args, "N", "L0", "S0", "ell", "rho", "A")
    q = QosParams(args.N, args.L0, args.S0)
    res = class_blr(q, args.ell, args.rho, args.A, rounding=args.rounding)
    header = ["N", "L0", "L1", "S0", "S1", "ell", "rho", "A", "blr_0", "blr_1"]
    out.records(header, [[q.N, q.L0, q.L1, q.S0, q.S1, args.ell, args.rho, args.A, *res.blr]])


def _sim_config(args, params: SwitchParams, qos: Optional[QosParams] = None) -> SimConfig:
    return SimConfig(params=params, horizon=args.horizon, warmup=args.warmup, seed=args.seed,
                     replications=args.replications, qos=qos, selection=args.selection)


def cmd_simulate(args, out: Output):
    p = SwitchParams(**_switch(args))
    if args.qos:
        _require(args, "L0", "S0")
        q = QosParams(p.w, args.L0, args.S0)
        est = simulate_qos(_sim_config(args, p, q))
        header = ["class", "w", "ell", "rho", "A", "offered", "blocked", "blr_hat", "ci95"]
        rows = [[c, p.w, p.ell, p.rho, p.A, e.offered, e.blocked, e.blr_hat, e.ci95]
                for c, e in enumerate(est.per_class)]
    else:
        e = simulate(_sim_config(args, p))
        header = ["w", "ell", "rho", "A", "u", "offered", "blocked", "blr_hat", "ci95"]
        rows = [[p.w, p.ell, p.rho, p.A, p.u, e.offered, e.blocked, e.blr_hat, e.ci95]]
    out.records(header, rows)


def rank_order_agreement(a: Sequence[float], b: Sequence[float]) -> float:
    """Fraction of adjacent grid pairs where both series move the same way."""
    if len(a) < 2:
        return 1.0
    da = np.sign(np.diff(np.asarray(a, dtype=float)))
    db = np.sign(np.diff(np.asarray(b, dtype=float)))
    return float(np.mean(da == db))


def cmd_compare(args, out: Output):
    _require(args, "param")
    if args.param not in _SIM_SWEEPS:
        raise UsageError(f"compare supports --param in {', '.join(_SIM_SWEEPS)}")
    grid = parse_grid(args)
    name = SWEEP_PARAMS[args.param]
    rows, analytic, simulated = [], [], []
    for value in grid:
        p = _sweep_point(args, name, value)
        est = simulate(_sim_config(args, p))
        blr = burst_loss_rate(p)
        analytic.append(blr)
        simulated.append(est.blr_hat)
        rows.append([args.param, value, blr, est.blr_hat, est.ci95])
    agreement = rank_order_agreement(analytic, simulated)
    out.records(["param", "value", "blr_analytic", "blr_sim", "ci95"], rows,
                extra={"rank_order_agreement": agreement,
                       "trailer": [f"rank_order_agreement={fmt(agreement)}"]})


def cmd_figure(args, out: Output):
    try:
        preset = figures.figure(args.id)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    directory = args.out or "."
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"figure_{args.id}.csv")
    lines = [",".join(preset.header())]
    lines += [",".join(fmt(v) for v in row) for row in preset.rows()]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    sys.stderr.write(f"wrote {path}\n")


COMMANDS = {
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "qos": cmd_qos,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "figure": cmd_figure,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        out = Output(args)
        COMMANDS[args.command](args, out)
        if args.command != "figure":
            out.flush()
    except SystemExit as exc:
        # argparse reports usage errors with code 2 and --help with 0
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except (ObsError, ValueError) as exc:
        sys.stderr.write(f"obsblr: error: {exc}\n")
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
