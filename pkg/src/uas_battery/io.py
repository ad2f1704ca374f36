"""Telemetry, trace and configuration files.

CSV numbers are written with ``%.17g`` so every double survives a round trip.
INI values use the shortest round-tripping ``repr`` to stay readable.
Configuration files are INI documents::

    [cell]
    capacity_ah = 0.27

    [parameters]          ; the 21 model constants, r1 ... r21
    r1 = 1.031
    ...

    [estimator]           ; every key optional except where noted
    alpha = 2.5
    lambda = 1.0
    epsilon = 1e-3
    dt = 0.01
    ...

    [r1]                  ; one section per adaptive parameter
    upper = 4
    lower = 0.1
    lambda_x = 20
    lambda_y = 65
    init = 100

    [load]                ; profile for ``simulate``/``validate``
    kind = constant_resistance
    R = 50
    t_end = 10

Unknown sections and keys are rejected.
"""

from __future__ import annotations

import configparser
import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigRejected, NonMonotonicTime, ParseError
from .estimator import ADAPTIVE, TRACE_COLUMNS, BoundsEntry, EstimatorConfig, RunReport
from .model import (
    PARAM_NAMES,
    CapacityConfig,
    ConstantCurrent,
    ConstantResistance,
    CurrentTable,
    ParameterSet,
    PulsedResistance,
    TelemetrySample,
    Trace,
)

log = logging.getLogger(__name__)

TELEMETRY_COLUMNS = ("t_s", "i_A", "y_V")
SIM_TRACE_COLUMNS = ("t_s", "i_A", "y_V", "z", "x1_V", "x2_V", "x3_V", "x4_ohm")
PROFILE_COLUMNS = ("t_s", "i_A")
UNIFORM_TOL = 1e-6


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return "%.17g" % float(x)


def write_csv(path, header, rows) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_trace(path, trace: Trace) -> None:
    cols = (trace.t, trace.i, trace.y, trace.z, trace.x1, trace.x2, trace.x3, trace.x4)
    write_csv(path, SIM_TRACE_COLUMNS, zip(*cols))


def write_profile(path, table: CurrentTable) -> None:
    write_csv(path, PROFILE_COLUMNS, zip(table.times, table.currents))


def _read_columns(path, required) -> dict:
    path = Path(path)
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path}: empty file, expected header {','.join(required)}")
        missing = [c for c in required if c not in header]
        if missing:
            raise ParseError(f"{path}: header lacks column(s) {', '.join(missing)}")
        idx = [header.index(c) for c in required]
        data = {c: [] for c in required}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            for c, j in zip(required, idx):
                try:
                    v = float(row[j])
                except IndexError:
                    raise ParseError(f"{path}:{lineno}: missing column {c!r}")
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: column {c!r} is not a number: {row[j]!r}")
                if not math.isfinite(v):
                    raise ParseError(f"{path}:{lineno}: column {c!r} is not finite")
                data[c].append(v)
    return {c: np.array(v, dtype=float) for c, v in data.items()}


@dataclass
class Telemetry:
    t: np.ndarray
    i: np.ndarray
    y: np.ndarray
    dt: Optional[float]
    resampled: bool = False

    def __len__(self):
        return len(self.t)

    def samples(self):
        for t, i, y in zip(self.t, self.i, self.y):
            yield TelemetrySample(float(t), float(i), float(y))


def read_telemetry(path, dt: Optional[float] = None) -> Telemetry:
    """Load ``t_s,i_A,y_V`` columns (other columns are ignored).

    Timestamps must increase strictly. Streams whose spacing deviates from
    uniform by more than 1e-6 s, or from an explicit ``dt``, are resampled by
    step-hold onto a uniform grid; ``resampled`` records that and a warning is
    logged.
    """
    cols = _read_columns(path, TELEMETRY_COLUMNS)
    t, i, y = cols["t_s"], cols["i_A"], cols["y_V"]
    if len(t) == 0:
        return Telemetry(t, i, y, dt)
    steps = np.diff(t)
    if np.any(steps <= 0):
        k = int(np.argmax(steps <= 0)) + 1
        raise NonMonotonicTime(f"{path}: timestamp at data row {k + 1} does not increase ({t[k - 1]} -> {t[k]})")
    if len(t) == 1:
        return Telemetry(t, i, y, dt)
    grid_dt = dt if dt is not None else float(np.median(steps))
    if np.all(np.abs(steps - grid_dt) <= UNIFORM_TOL):
        return Telemetry(t, i, y, grid_dt)
    n = int(math.floor((t[-1] - t[0]) / grid_dt + 1e-9)) + 1
    grid = t[0] + grid_dt * np.arange(n)
    k = np.searchsorted(t, grid + UNIFORM_TOL, side="right") - 1
    log.warning("%s: non-uniform timestamps resampled by step-hold onto dt=%g s (%d -> %d samples)",
                path, grid_dt, len(t), n)
    return Telemetry(grid, i[k], y[k], grid_dt, resampled=True)


def read_profile(path) -> CurrentTable:
    cols = _read_columns(path, PROFILE_COLUMNS)
    if len(cols["t_s"]) == 0:
        raise ParseError(f"{path}: profile has no rows")
    return CurrentTable(tuple(cols["t_s"].tolist()), tuple(cols["i_A"].tolist()))


# -- configuration ------------------------------------------------------------

_ESTIMATOR_KEYS = {
    "alpha": float, "lambda": float, "epsilon": float, "dt": float, "k0": float,
    "z0": float, "z_floor": float, "aggregate": str, "adaptation": str, "settle_tol": str,
    "current_warn_fraction": float, "cc": float, "x1_0": float,
}
_BOUND_KEYS = ("upper", "lower", "lambda_x", "lambda_y", "init")
_CELL_KEYS = ("capacity_ah", "f1", "f2", "f3")
_LOAD_KEYS = ("kind", "i", "r", "on", "off", "t_end")
_SECTIONS = {"cell", "parameters", "estimator", "load"} | {f"r{n}" for n in ADAPTIVE}


@dataclass
class Config:
    capacity: Optional[CapacityConfig] = None
    params: Optional[ParameterSet] = None
    estimator: Optional[EstimatorConfig] = None
    load: Optional[object] = None
    t_end: Optional[float] = None


def _num(section, key, value) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigRejected(f"[{section}] {key} = {value!r} is not a number")


def _check_keys(parser, section, allowed):
    unknown = set(parser[section]) - set(allowed)
    if unknown:
        raise ConfigRejected(f"[{section}] unknown key(s): {', '.join(sorted(unknown))}")


def parse_config(text: str, source: str = "<config>", overrides: Optional[dict] = None) -> Config:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ParseError(f"{source}: {exc}") from exc
    unknown = set(parser.sections()) - _SECTIONS
    if unknown:
        raise ConfigRejected(f"{source}: unknown section(s): {', '.join(sorted(unknown))}")
    cfg = Config()

    if parser.has_section("cell"):
        _check_keys(parser, "cell", _CELL_KEYS)
        sec = parser["cell"]
        if "capacity_ah" not in sec:
            raise ConfigRejected("[cell] capacity_ah is required")
        try:
            cfg.capacity = CapacityConfig(**{
                ("C" if k == "capacity_ah" else k): _num("cell", k, v) for k, v in sec.items()
            })
        except ValueError as exc:
            raise ConfigRejected(f"[cell] {exc}") from exc

    if parser.has_section("parameters"):
        _check_keys(parser, "parameters", PARAM_NAMES)
        sec = parser["parameters"]
        missing = [k for k in PARAM_NAMES if k not in sec]
        if missing:
            raise ConfigRejected(f"[parameters] missing {', '.join(missing)}")
        cfg.params = ParameterSet.from_values([_num("parameters", k, sec[k]) for k in PARAM_NAMES])

    if parser.has_section("load"):
        _check_keys(parser, "load", _LOAD_KEYS)
        cfg.load, cfg.t_end = _parse_load(parser["load"])

    bound_sections = [s for s in parser.sections() if s.startswith("r") and s != "r"]
    if parser.has_section("estimator") or bound_sections:
        est = {}
        if parser.has_section("estimator"):
            _check_keys(parser, "estimator", _ESTIMATOR_KEYS)
            for k, v in parser["estimator"].items():
                if k in ("aggregate", "adaptation"):
                    est[k] = v.strip()
                elif k == "settle_tol":
                    est[k] = None if v.strip().lower() in ("none", "off", "") else _num("estimator", k, v)
                else:
                    est["lam" if k == "lambda" else k] = _num("estimator", k, v)
        est.update({k: v for k, v in (overrides or {}).items() if v is not None})
        bounds = {}
        for n in ADAPTIVE:
            name = f"r{n}"
            if not parser.has_section(name):
                raise ConfigRejected(f"missing bounds section [{name}]")
            _check_keys(parser, name, _BOUND_KEYS)
            sec = parser[name]
            missing = [k for k in _BOUND_KEYS if k not in sec]
            if missing:
                raise ConfigRejected(f"[{name}] missing {', '.join(missing)}")
            bounds[n] = BoundsEntry(*(_num(name, k, sec[k]) for k in _BOUND_KEYS))
        if "cc" not in est:
            if cfg.capacity is None:
                raise ConfigRejected("estimator needs [estimator] cc or [cell] capacity_ah")
            est["cc"] = cfg.capacity.cc
        cfg.estimator = EstimatorConfig(bounds=bounds, **est)
    return cfg


def _parse_load(sec):
    kind = sec.get("kind", "").strip()
    vals = {k: _num("load", k, v) for k, v in sec.items() if k != "kind"}
    t_end = vals.get("t_end")
    try:
        if kind == "constant_current":
            return ConstantCurrent(vals["i"]), t_end
        if kind == "constant_resistance":
            return ConstantResistance(vals["r"]), t_end
        if kind == "pulsed_resistance":
            return PulsedResistance(vals["r"], vals["on"], vals["off"]), t_end
    except KeyError as exc:
        raise ConfigRejected(f"[load] kind = {kind} needs key {exc.args[0]}")
    raise ConfigRejected(f"[load] unknown kind {kind!r}")


def load_config(path, overrides: Optional[dict] = None) -> Config:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return parse_config(text, str(path), overrides)


def _ini(x) -> str:
    return repr(float(x))


def format_parameters(p: ParameterSet, capacity: Optional[CapacityConfig] = None) -> str:
    lines = []
    if capacity is not None:
        lines += ["[cell]", f"capacity_ah = {_ini(capacity.C)}"]
        for k in ("f1", "f2", "f3"):
            if getattr(capacity, k) != 1.0:
                lines.append(f"{k} = {_ini(getattr(capacity, k))}")
        lines.append("")
    lines.append("[parameters]")
    lines += [f"{k} = {_ini(v)}" for k, v in zip(PARAM_NAMES, p.values())]
    return "\n".join(lines) + "\n"


def format_estimator_config(cfg: EstimatorConfig) -> str:
    lines = ["[estimator]"]
    for key, attr in (("alpha", "alpha"), ("lambda", "lam"), ("epsilon", "epsilon"), ("dt", "dt"),
                      ("k0", "k0"), ("cc", "cc"), ("z0", "z0"), ("z_floor", "z_floor"),
                      ("current_warn_fraction", "current_warn_fraction")):
        lines.append(f"{key} = {_ini(getattr(cfg, attr))}")
    lines.append(f"aggregate = {cfg.aggregate}")
    lines.append(f"adaptation = {cfg.adaptation}")
    lines.append(f"settle_tol = {'none' if cfg.settle_tol is None else _ini(cfg.settle_tol)}")
    if cfg.x1_0 is not None:
        lines.append(f"x1_0 = {_ini(cfg.x1_0)}")
    for n in ADAPTIVE:
        b = cfg.bounds[n]
        lines += ["", f"[r{n}]"]
        lines += [f"{k} = {_ini(v)}" for k, v in zip(_BOUND_KEYS, (b.r_u, b.r_l, b.lambda_x, b.lambda_y, b.r_init))]
    return "\n".join(lines) + "\n"


def write_report(out_dir, report: RunReport, capacity: Optional[CapacityConfig] = None) -> None:
    """Trace CSV, the 21 final parameters as a loadable INI block, and error statistics."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "trace.csv", TRACE_COLUMNS, report.trace)
    if report.params is not None:
        (out / "parameters.ini").write_text(format_parameters(report.params, capacity))
    if report.error_stats is not None:
        write_csv(out / "stats.csv", ("metric", "value"), report.error_stats.as_rows())
