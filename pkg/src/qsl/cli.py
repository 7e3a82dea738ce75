"""Command-line front end.

Exit codes: 0 success, 1 verification found violations, 2 usage or domain
error, 3 file error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from .bc import bc_bound, bc_table
from .bounds import BOUND_LABELS, bound_report
from .cases import cnot_case, grover_case, hadamard_case, hadamard_endpoint
from .core import EnergyStats, check_theta, energy_stats
from .errors import QSLError
from .evolution import overlap_trajectory
from .files import SystemFileError, emit_curves, fmt, load_system_file
from .verify import RunConfig, verify_random, worker_count

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_FILE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _time_scale(units: str) -> float:
    return 2 * math.pi if units == "h" else 1.0


def _emit(record: dict, fmt_name: str, digits: int, out) -> None:
    if fmt_name == "json":
        out.write(json.dumps(record, indent=2) + "\n")
    elif fmt_name == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(record.keys())
        writer.writerow(fmt(v) if isinstance(v, float) else ("" if v is None else v)
                        for v in record.values())
    else:
        for key, val in record.items():
            if isinstance(val, float):
                val = f"{val:.{digits}g}"
            elif val is None:
                val = "n/a"
            out.write(f"{key} = {val}\n")


def _cmd_bounds(args, out):
    theta = check_theta(args.theta)
    if args.system:
        system, state = load_system_file(args.system)
        stats = energy_stats(state, system)
    else:
        missing = [n for n in ("mean", "spread", "emin", "emax") if getattr(args, n) is None]
        if missing:
            raise _UsageError("need --system or all of --mean --spread --emin --emax")
        if not args.emin <= args.mean <= args.emax:
            raise QSLError("need emin <= mean <= emax")
        if not 0 <= args.spread <= 0.5 * (args.emax - args.emin) + 1e-12:
            raise QSLError("spread must lie in [0, (emax - emin)/2]")
        stats = EnergyStats(mean=args.mean, spread=args.spread, e_min=args.emin, e_max=args.emax)
    report = bound_report(stats, theta, bc_bound(theta).value, actual_time=args.actual_time)
    record = report.as_record(_time_scale(args.units))
    record["units"] = args.units
    _emit(record, args.format, args.digits, out)
    return EXIT_OK


def _cmd_curve(args, out):
    if args.points < 2:
        raise _UsageError("--points must be at least 2")
    try:
        rows = emit_curves(args.points, args.out)
    except OSError as exc:
        raise SystemFileError(f"cannot write {args.out}: {exc.strerror or exc}") from None
    out.write(f"wrote {rows} rows to {args.out}\n")
    return EXIT_OK


def _cmd_evolve(args, out):
    if args.samples < 1 or not args.t_max > 0:
        raise _UsageError("--samples must be >= 1 and --t-max > 0")
    system, state = load_system_file(args.system)
    stats = energy_stats(state, system)
    table = bc_table()
    scale = _time_scale(args.units)
    times = args.t_max * np.arange(args.samples + 1) / args.samples
    s = overlap_trajectory(system, state, times)
    header = ["time", "s_real", "s_imag", "theta"] + [f"ratio_{l}" for l in BOUND_LABELS]
    try:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for t, z in zip(times, s):
                theta = math.acos(min(1.0, abs(z)))
                report = bound_report(stats, theta, table(theta))
                ratios = [
                    t / b if b > 0 else math.inf
                    for b in (getattr(report, l) for l in BOUND_LABELS)
                ]
                writer.writerow([fmt(t / scale), fmt(z.real), fmt(z.imag), fmt(theta)]
                                + [fmt(r) for r in ratios])
    except OSError as exc:
        raise SystemFileError(f"cannot write {args.out}: {exc.strerror or exc}") from None
    out.write(f"wrote {len(times)} rows to {args.out}\n")
    return EXIT_OK


def _cmd_case(args, out):
    scale = _time_scale(args.units)
    if args.case == "hadamard":
        rep = hadamard_case(args.epsilon, args.delta)
        record = rep.as_record(scale)
        if args.endpoint:
            record.update({f"endpoint_{k}": v for k, v in hadamard_endpoint().items()})
    elif args.case == "cnot":
        rep = cnot_case(args.epsilon, args.variant, delta=args.delta)
        record = rep.as_record(scale)
    else:
        record = grover_case(args.n, args.spread).as_record(scale)
    record["units"] = args.units
    _emit(record, args.format, args.digits, out)
    return EXIT_OK


def _cmd_verify(args, out):
    cfg = RunConfig(
        seed=args.seed, trials=args.trials, dim_max=args.dim_max, samples=args.samples,
        t_max_policy=args.t_max_policy, saturating_trials=args.saturating,
    )
    report = verify_random(cfg, threads=worker_count())
    text = report.to_json(include_timing=args.timing)
    if args.out:
        try:
            with open(args.out, "w", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise SystemFileError(f"cannot write {args.out}: {exc.strerror or exc}") from None
    else:
        out.write(text)
    print(f"elapsed {report.elapsed:.2f} s, {len(report.violations)} violations", file=sys.stderr)
    return EXIT_VIOLATION if report.violations else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qsl", description="Quantum speed limit bounds and checks (hbar = 1).")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def display(sp):
        sp.add_argument("--units", choices=("hbar", "h"), default="hbar",
                        help="report times in hbar=1 units or in units of h")
        sp.add_argument("--format", choices=("text", "json", "csv"), default="text")
        sp.add_argument("--digits", type=int, default=6, help="significant digits for text output")

    b = sub.add_parser("bounds", help="evaluate every bound at one angle")
    b.add_argument("--theta", type=float, required=True)
    b.add_argument("--system", help="system description file")
    for name in ("mean", "spread", "emin", "emax"):
        b.add_argument(f"--{name}", type=float)
    b.add_argument("--actual-time", type=float, help="observed time, to get a saturation ratio")
    display(b)
    b.set_defaults(func=_cmd_bounds)

    c = sub.add_parser("curve", help="write dimensionless bound curves as CSV")
    c.add_argument("--points", type=int, default=101)
    c.add_argument("--out", required=True)
    c.set_defaults(func=_cmd_curve)

    e = sub.add_parser("evolve", help="trace S(t) and bound saturation ratios")
    e.add_argument("--system", required=True)
    e.add_argument("--t-max", type=float, required=True)
    e.add_argument("--samples", type=int, default=200)
    e.add_argument("--out", required=True)
    e.add_argument("--units", choices=("hbar", "h"), default="hbar")
    e.set_defaults(func=_cmd_evolve)

    k = sub.add_parser("case", help="gate and algorithm case studies")
    ksub = k.add_subparsers(dest="case", required=True, parser_class=_Parser)
    kh = ksub.add_parser("hadamard")
    kh.add_argument("--epsilon", type=float, required=True)
    kh.add_argument("--delta", type=float, required=True)
    kh.add_argument("--endpoint", action="store_true", help="also report the eps/delta->1 endpoint")
    kc = ksub.add_parser("cnot")
    kc.add_argument("--epsilon", type=float, required=True)
    kc.add_argument("--variant", choices=("A", "B"), default="A")
    kc.add_argument("--delta", type=float, help="finite Hadamard pulse strength (variant A)")
    kg = ksub.add_parser("grover")
    kg.add_argument("--n", type=int, required=True)
    kg.add_argument("--spread", type=float, default=1.0)
    for sp in (kh, kc, kg):
        display(sp)
    k.set_defaults(func=_cmd_case)

    v = sub.add_parser("verify", help="randomized bound-violation search")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--dim-max", type=int, default=8)
    v.add_argument("--samples", type=int, default=64)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--saturating", type=int, default=0,
                   help="extra trials with maximal-spread states")
    v.add_argument("--t-max-policy", choices=("horizon", "recurrence"), default="horizon")
    v.add_argument("--out", help="write the report here instead of stdout")
    v.add_argument("--timing", action="store_true", help="include wall time in the report")
    v.set_defaults(func=_cmd_verify)
    return p


def run_cli(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except _UsageError as exc:
        print(f"qsl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemFileError as exc:
        print(f"qsl: file error: {exc}", file=sys.stderr)
        return EXIT_FILE
    except (QSLError, ValueError) as exc:
        print(f"qsl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())
