"""Command-line front end.

Subcommands: bounds, simulate, audit, diagnose, steady. Exit codes are a
stable contract: 0 clean, 1 usage, 2 input parse, 3 output I/O, 4
diagnostic failure (suppressible with --no-fail where diagnosis is the
point of the command).
"""

from __future__ import annotations

import argparse
import sys

from ._version import __version__
from .curves import solve_reference
from .ingest import (
    InsufficientSteadyStateError,
    ParseError,
    SeriesFormat,
    parse_profile,
    parse_series,
    parse_trace,
    steady_state_average,
)
from .model import bounds_summary
from .report import DetectorConfig, Report, audit_series, diagnose_series, plot_rows

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_OUTPUT = 3
EXIT_DIAGNOSTIC = 4

COMBINED_PLOT_CAVEAT = ("combined throughput-delay view: the optimal-load knee cannot be "
                        "located in this projection; use the separate X(N) and R(N) plots")


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; our contract reserves 2
    # for input parse failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="loadlaw",
                     description="Operational-law diagnostics for closed-loop load tests.")
    parser.add_argument("--version", action="version", version=f"loadlaw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("bounds",
                       help="throughput ceiling, response floor and optimal load for a profile")
    p.add_argument("profile", help="profile JSON path")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate",
                       help="write the lawful reference curves for a profile as CSV")
    p.add_argument("profile", help="profile JSON path")
    p.add_argument("--n-max", type=int, required=True, help="largest client count to solve")
    p.add_argument("--out", required=True, help="output CSV path, or - for stdout")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("audit",
                       help="Little's-law audit of a measured series")
    p.add_argument("series", help="series CSV path")
    _series_flags(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--no-fail", action="store_true",
                   help="exit 0 even when critical findings are present")
    _tolerance_flags(p, ("plateau-tol", "span-factor", "think-tol"))
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("diagnose",
                       help="run the full detector suite against a measured series")
    p.add_argument("series", help="series CSV path")
    p.add_argument("--profile", help="profile JSON path (enables exact bounds and the ceiling check)")
    _series_flags(p)
    p.add_argument("--format", choices=("text", "json"), default="json")
    p.add_argument("--out", help="also write the JSON report to this path")
    p.add_argument("--plot-csv", help="write measured points with bounding lines to this CSV")
    p.add_argument("--combined-csv",
                   help="write the combined throughput-delay projection to this CSV "
                        "(cannot locate the optimal-load knee; noted in the file)")
    p.add_argument("--no-fail", action="store_true",
                   help="exit 0 even when the verdict is suspect or broken")
    _tolerance_flags(p, ("bound-tol", "retro-tol", "plateau-tol", "span-factor",
                         "think-tol", "slope-fraction", "min-growth-points"))
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("steady",
                       help="steady-state time-averaged throughput of an instantaneous trace")
    p.add_argument("trace", help="trace CSV path (t,x_inst)")
    p.add_argument("--warmup", type=float, default=0.25,
                   help="fraction of the trace span to discard as warm-up (default 0.25)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_steady)
    return parser


def _series_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r-unit", choices=("s", "ms"), default="s",
                   help="unit of a bare 'r' column (suffixed r_s/r_ms headers declare themselves)")
    p.add_argument("--z", type=float, default=None, metavar="SECONDS",
                   help="think time the harness was configured with")


def _tolerance_flags(p: argparse.ArgumentParser, names) -> None:
    defaults = DetectorConfig()
    flags = {
        "bound-tol": ("bound_rel_tol", float, "relative tolerance for the throughput ceiling check"),
        "retro-tol": ("retrograde_rel_tol", float, "relative drop that counts as retrograde"),
        "plateau-tol": ("plateau_tol", float, "relative n_run spread that still counts as a plateau"),
        "span-factor": ("span_factor", float, "minimum load growth across a plateau"),
        "think-tol": ("think_time_rel_tol", float, "relative deviation allowed for implied think time"),
        "slope-fraction": ("slope_fraction", float, "fraction of the bottleneck slope below which response is flat"),
        "min-growth-points": ("min_growth_points", int, "post-knee points needed to classify growth"),
    }
    for name in names:
        dest, typ, help_text = flags[name]
        p.add_argument(f"--{name}", dest=dest, type=typ, default=getattr(defaults, dest),
                       help=f"{help_text} (default {getattr(defaults, dest)})")


def _config_from(args: argparse.Namespace) -> DetectorConfig:
    config = DetectorConfig()
    for field_name in vars(config):
        if hasattr(args, field_name):
            setattr(config, field_name, getattr(args, field_name))
    return config


def _read_file(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _load_profile(path: str):
    return parse_profile(_read_file(path))


def _load_series(args: argparse.Namespace):
    fmt = SeriesFormat(r_unit=args.r_unit)
    return parse_series(_read_file(args.series), fmt,
                        configured_think_time=args.z, source_label=args.series)


def cmd_bounds(args: argparse.Namespace) -> int:
    summary = bounds_summary(_load_profile(args.profile))
    if args.format == "json":
        report = Report(tool_version=__version__, inputs={"profile": args.profile},
                        bounds=summary, knee=None, audit=None, findings=[], verdict="clean")
        print(report.to_json())
    else:
        tie = f" (tied with: {', '.join(summary.tied_labels)})" if summary.tied_labels else ""
        print(f"bottleneck:  {summary.bottleneck_label}{tie}")
        print(f"x_max:       {summary.x_max:g} TPS")
        print(f"r_min:       {summary.r_min:g} s")
        print(f"n_opt:       {summary.n_opt:g} VUsers")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.n_max < 1:
        raise _UsageError("--n-max must be >= 1")
    curves = solve_reference(_load_profile(args.profile), args.n_max)
    if args.out == "-":
        curves.write_csv(sys.stdout)
    else:
        try:
            curves.write_csv(args.out)
        except OSError as exc:
            print(f"loadlaw: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_OUTPUT
    return EXIT_OK


def cmd_audit(args: argparse.Namespace) -> int:
    series = _load_series(args)
    report = audit_series(series, config=_config_from(args), inputs={"series": args.series})
    if args.format == "json":
        print(report.to_json())
    else:
        _print_audit_text(report)
    has_critical = any(f.severity == "critical" for f in report.findings)
    if has_critical and not args.no_fail:
        return EXIT_DIAGNOSTIC
    return EXIT_OK


def _print_audit_text(report: Report) -> None:
    print(f"{'n_was':>8} {'x_was':>10} {'r_was':>10} {'n_run':>10} {'n_idle':>10}")
    for row in report.audit:
        print(f"{row.n_was:>8d} {row.x_was:>10.3f} {row.r_was:>10.4f} "
              f"{row.n_run:>10.2f} {row.n_idle:>10.2f}")
    _print_findings(report)


def _print_findings(report: Report) -> None:
    for f in report.findings:
        points = f" (points: {', '.join(map(str, f.affected_points))})" if f.affected_points else ""
        print(f"[{f.severity}] {f.detector}: {f.message}{points}")
    print(f"verdict: {report.verdict}")


def cmd_diagnose(args: argparse.Namespace) -> int:
    series = _load_series(args)
    profile = _load_profile(args.profile) if args.profile else None
    inputs = {"series": args.series}
    if args.profile:
        inputs["profile"] = args.profile
    report = diagnose_series(series, profile, config=_config_from(args), inputs=inputs)

    if args.format == "json":
        print(report.to_json())
    else:
        _print_diagnose_text(report)
    try:
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(report.to_json() + "\n")
        if args.plot_csv:
            _write_plot_csv(args.plot_csv, series, profile, report)
        if args.combined_csv:
            _write_combined_csv(args.combined_csv, series)
    except OSError as exc:
        print(f"loadlaw: cannot write output: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    if report.verdict != "clean" and not args.no_fail:
        return EXIT_DIAGNOSTIC
    return EXIT_OK


def _print_diagnose_text(report: Report) -> None:
    if report.bounds is not None:
        b = report.bounds
        print(f"bounds: x_max {b.x_max:g} TPS, r_min {b.r_min:g} s, "
              f"n_opt {b.n_opt:g} VUsers, bottleneck {b.bottleneck_label}")
    if report.knee is not None:
        k = report.knee
        print(f"knee ({k.basis}): s_max {k.s_max_hat:g} s, r_min {k.r_min_hat:g} s, "
              f"n_opt {k.n_opt_hat:g} VUsers")
    _print_findings(report)


def _write_plot_csv(path: str, series, profile, report: Report) -> None:
    rows = plot_rows(series, profile, report.knee)
    with open(path, "w") as fh:
        fh.write("n,x_measured,r_measured,x_upper_bound,r_lower_bound\n")
        for n, x, r, xb, rb in rows:
            fh.write(f"{n},{x!r},{r!r},{xb!r},{rb!r}\n")


def _write_combined_csv(path: str, series) -> None:
    with open(path, "w") as fh:
        fh.write(f"# {COMBINED_PLOT_CAVEAT}\n")
        fh.write("x,r,n\n")
        for p in series.points:
            fh.write(f"{p.x!r},{p.r!r},{p.n}\n")


def cmd_steady(args: argparse.Namespace) -> int:
    if not 0.0 <= args.warmup < 1.0:
        raise _UsageError("--warmup must be in [0, 1)")
    trace = parse_trace(_read_file(args.trace))
    try:
        x_bar, window = steady_state_average(trace, warmup_fraction=args.warmup)
    except InsufficientSteadyStateError as exc:
        print(f"loadlaw: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    if args.format == "json":
        print(f'{{"x_bar": {x_bar!r}, "window": [{window[0]!r}, {window[1]!r}]}}')
    else:
        print(f"x_bar:  {x_bar:g}")
        print(f"window: ({window[0]:g}, {window[1]:g})")
    return EXIT_OK


class _UsageError(Exception):
    pass


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"loadlaw: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"loadlaw: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"loadlaw: cannot read input: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
