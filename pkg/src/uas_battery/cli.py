"""Command line front end.

Exit codes: 0 success, 2 usage error, 3 configuration rejected, 4 no
convergence, 5 file or parse error, 6 numerical failure during a run.
Set ``UAS_BATTERY_LOG`` (DEBUG, INFO, WARNING, ERROR) for log verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import analytics, io
from .errors import (
    BatteryError,
    ConfigRejected,
    NoConvergence,
    NonPositiveCapacitance,
    ParseError,
    ProfileDomain,
)
from .estimator import run_estimation
from .model import random_current_table, simulate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_NO_CONVERGENCE = 4
EXIT_IO = 5
EXIT_NUMERIC = 6

log = logging.getLogger("uas_battery")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


class UsageError(Exception):
    pass


def _need(value, what):
    if value is None:
        raise ConfigRejected(f"missing {what}")
    return value


def _flag(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


def cmd_simulate(args) -> int:
    cfg = io.load_config(_flag(args.config, "--config"))
    params = _need(cfg.params, "[parameters] section")
    cap = _need(cfg.capacity, "[cell] section")
    dt = args.dt or 0.01
    if args.profile:
        profile = io.read_profile(args.profile)
        t_end = args.t_end or profile.times[-1]
    else:
        profile = _need(cfg.load, "[load] section or --profile")
        t_end = _need(args.t_end or cfg.t_end, "[load] t_end or --t-end")
    trace = simulate(params, cap, profile, t_end, dt)
    io.write_trace(_out_dir(args) / "trace.csv", trace)
    if trace.stopped_early:
        log.info("state of charge reached the floor at t=%.2f s", trace.t[-1])
    log.info("wrote %d rows", len(trace))
    return EXIT_OK


def cmd_estimate(args) -> int:
    cfg = io.load_config(_flag(args.config, "--config"), {"dt": args.dt, "epsilon": args.epsilon})
    est = _need(cfg.estimator, "[estimator] and bounds sections")
    telemetry = io.read_telemetry(_flag(args.input, "--in"), dt=args.dt or None)
    if telemetry.dt is not None and abs(telemetry.dt - est.dt) > io.UNIFORM_TOL:
        raise ConfigRejected(f"telemetry spacing {telemetry.dt} s differs from estimator dt {est.dt} s")
    out = _out_dir(args)
    try:
        report = run_estimation(est, telemetry.samples())
    except NoConvergence as exc:
        if exc.report is not None:
            io.write_report(out, exc.report, cfg.capacity)
        raise
    io.write_report(out, report, cfg.capacity)
    log.info("converged at sample %d; %d good samples", report.convergence_index, report.good_count)
    return EXIT_OK


def cmd_validate(args) -> int:
    a = io.load_config(_flag(args.config, "--config"))
    b = io.load_config(_flag(args.input, "--in"))
    pa = _need(a.params, "[parameters] in --config")
    pb = _need(b.params, "[parameters] in --in")
    cap = _need(a.capacity, "[cell] in --config")
    dt = args.dt or 0.01
    if args.profile:
        profile = io.read_profile(args.profile)
        t_end = args.t_end or profile.times[-1]
    elif a.load is not None:
        profile, t_end = a.load, args.t_end or a.t_end
    else:
        t_end = args.t_end or 3600.0
        profile = random_current_table(args.seed, t_end)
    cmp = analytics.compare_models(pa, pb, cap, profile, _need(t_end, "t_end"), dt)
    out = _out_dir(args)
    io.write_csv(
        out / "compare.csv",
        ("t_s", "i_A", "y_a_V", "y_b_V", "eo_a_V", "eo_b_V", "diff_V"),
        zip(cmp.t, cmp.i, cmp.y_a, cmp.y_b, cmp.eo_a, cmp.eo_b, cmp.diff),
    )
    io.write_csv(
        out / "summary.csv",
        ("metric", "value"),
        [("max_abs_terminal_diff_V", cmp.max_abs_diff()), ("max_abs_ocv_diff_V", cmp.max_abs_eo_diff())],
    )
    print(f"max |y_a - y_b| = {cmp.max_abs_diff():.6g} V")
    print(f"max |Eo_a - Eo_b| = {cmp.max_abs_eo_diff():.6g} V")
    return EXIT_OK


def cmd_stats(args) -> int:
    path = _flag(args.input, "--in")
    cols = io._read_columns(path, (args.column,))
    errors = cols[args.column]
    stats = analytics.error_stats(errors, args.bin_width)
    hist = analytics.histogram(errors, args.bin_width)
    xs, frac = analytics.cdf(errors)
    out = _out_dir(args)
    io.write_csv(out / "stats.csv", ("metric", "value"), stats.as_rows())
    io.write_csv(out / "histogram.csv", ("x", "count"), zip(hist.centers(), hist.counts))
    io.write_csv(out / "cdf.csv", ("x", "fraction"), zip(xs, frac))
    for name, value in stats.as_rows():
        print(f"{name} = {io.fmt(value)}")
    return EXIT_OK


def cmd_make_profile(args) -> int:
    table = random_current_table(args.seed, args.t_end or 3600.0)
    io.write_profile(_out_dir(args) / "profile.csv", table)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uas-battery", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", metavar="PATH")
        sp.add_argument("--in", dest="input", metavar="PATH")
        sp.add_argument("--out", metavar="DIR", default=".")
        sp.add_argument("--dt", type=float)
        sp.add_argument("--epsilon", type=float)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--t-end", type=float)
        return sp

    common(sub.add_parser("simulate", help="integrate the cell model under a load")).add_argument(
        "--profile", metavar="PATH", help="t_s,i_A step-hold current table")
    common(sub.add_parser("estimate", help="run the adaptive observer on telemetry"))
    common(sub.add_parser("validate", help="compare two parameter sets under one current sequence")).add_argument(
        "--profile", metavar="PATH")
    st = common(sub.add_parser("stats", help="error statistics, histogram and CDF"))
    st.add_argument("--column", default="e_V")
    st.add_argument("--bin-width", type=float, default=analytics.DEFAULT_BIN_WIDTH)
    common(sub.add_parser("make-profile", help="seeded random discharge schedule"))
    return p


_COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "validate": cmd_validate,
    "stats": cmd_stats,
    "make-profile": cmd_make_profile,
}


def _setup_logging():
    level = os.environ.get("UAS_BATTERY_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        log.error("%s", exc)
        return EXIT_USAGE
    except NoConvergence as exc:
        log.error("%s", exc)
        return EXIT_NO_CONVERGENCE
    except (ParseError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_IO
    except (ConfigRejected, ProfileDomain) as exc:
        log.error("configuration rejected: %s", exc)
        return EXIT_CONFIG
    except NonPositiveCapacitance as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    except BatteryError as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
