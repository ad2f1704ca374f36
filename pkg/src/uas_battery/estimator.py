"""High-gain adaptive observer with a Nussbaum-switched injection.

The observer copies the cell's state equations with estimated parameters and
injects ``u = -N(k) e`` into every voltage-like state, where ``e`` is the
terminal-voltage error and ``k`` integrates ``e**2``. Each of the nineteen
parameters that appear in the observer is driven by

    r' = e**2 + lx * (r_upper - r) + ly * (r_lower - r)

and ``r3``/``r21`` are closed algebraically from the converged open circuit
voltage and series resistance states.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    ConfigRejected,
    NoConvergence,
    NonPositiveEstimatedCapacitance,
    NotConverged,
)
from .model import PARAM_NAMES, ParameterSet, TelemetrySample, rk4_step
from .specfun import NussbaumParams, nussbaum

log = logging.getLogger(__name__)

ADAPTIVE = tuple(n for n in range(1, 22) if n not in (3, 21))
_POS = {n: j for j, n in enumerate(ADAPTIVE)}


@dataclass(frozen=True)
class BoundsEntry:
    r_u: float
    r_l: float
    lambda_x: float
    lambda_y: float
    r_init: float

    def __post_init__(self):
        if not (self.r_u >= self.r_l > 0):
            raise ConfigRejected(f"need r_u >= r_l > 0, got {self.r_u}, {self.r_l}")
        if not (self.lambda_x > 0 and self.lambda_y > 0):
            raise ConfigRejected("confidence weights must be positive")
        if not self.r_init > 0:
            raise ConfigRejected("initial estimate must be positive")

    @property
    def rate(self) -> float:
        return self.lambda_x + self.lambda_y


def adaptive_steady_state(b: BoundsEntry) -> float:
    """Limit of the adaptation law once the voltage error has vanished."""
    return (b.lambda_x * b.r_u + b.lambda_y * b.r_l) / (b.lambda_x + b.lambda_y)


def adapt_parameter(r: float, e: float, b: BoundsEntry, dt: float, method: str = "exact") -> float:
    """Advance one parameter estimate by ``dt`` with ``e`` held over the step.

    The law is affine in ``r`` so the zero-order-hold solution ("exact") is
    available in closed form; it stays a convex combination of ``r`` and a
    positive target whatever ``(lambda_x + lambda_y) * dt`` is. "euler" takes
    one explicit Euler step instead, which overshoots below zero once
    ``(lambda_x + lambda_y) * dt`` approaches 1 and the estimate starts far
    from its target.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if method == "euler":
        return r + dt * (e * e + b.lambda_x * (b.r_u - r) + b.lambda_y * (b.r_l - r))
    lam = b.lambda_x + b.lambda_y
    target = (e * e + b.lambda_x * b.r_u + b.lambda_y * b.r_l) / lam
    return target + (r - target) * math.exp(-lam * dt)


def update_gain(k: float, e: float, dt: float) -> float:
    if dt <= 0:
        raise ValueError("dt must be positive")
    return k + dt * e * e


class EstimatedElements(NamedTuple):
    Rts: float
    Rtl: float
    Cts: float
    Ctl: float


def _as_vector(r) -> tuple:
    if isinstance(r, Mapping):
        return tuple(float(r[n]) for n in ADAPTIVE)
    if isinstance(r, ParameterSet):
        return tuple(r[n] for n in ADAPTIVE)
    r = tuple(float(v) for v in r)
    if len(r) != len(ADAPTIVE):
        raise ValueError(f"expected {len(ADAPTIVE)} adaptive estimates, got {len(r)}")
    return r


def estimated_elements(r, z: float) -> EstimatedElements:
    """Transient RC elements from estimates ``r`` (19-vector, mapping or ParameterSet)."""
    v = _as_vector(r)
    g = lambda n: v[_POS[n]]  # noqa: E731
    exp = math.exp
    return EstimatedElements(
        Rts=g(7) * exp(-g(8) * z) + g(9),
        Rtl=g(10) * exp(-g(11) * z) + g(12),
        Cts=-g(13) * exp(-g(14) * z) + g(15),
        Ctl=-g(16) * exp(-g(17) * z) + g(18),
    )


def capacitance_gate(r, z: float) -> bool:
    """True when both estimated capacitances are provably positive at ``z``."""
    v = _as_vector(r)
    r13, r14, r15 = v[_POS[13]], v[_POS[14]], v[_POS[15]]
    r16, r17, r18 = v[_POS[16]], v[_POS[17]], v[_POS[18]]
    if not (z > 0 and r13 > 0 and r15 > 0 and r16 > 0 and r18 > 0):
        return False
    return r14 > -math.log(r15 / r13) / z and r17 > -math.log(r18 / r16) / z


@dataclass(frozen=True)
class EstimatorConfig:
    """Everything the observer needs besides the telemetry.

    ``bounds`` maps parameter index to :class:`BoundsEntry` for every index
    except 3 and 21. ``cc`` is the effective capacity in ampere-seconds.
    ``aggregate`` chooses how good-sample snapshots are reduced ("mean" or
    "median"). A sample only counts as good once every estimate's relative
    change over the step is below ``settle_tol``; ``None`` drops that
    requirement and accepts the initial transient. ``adaptation`` selects the
    parameter update, see :func:`adapt_parameter`. A warning is logged when
    the mean absolute current exceeds ``current_warn_fraction * cc / 3600``.
    ``x1_0`` overrides the initial open-circuit estimate, which defaults to
    the first measured voltage.
    """

    bounds: Mapping[int, BoundsEntry]
    cc: float
    alpha: float = 2.5
    lam: float = 1.0
    epsilon: float = 1e-3
    dt: float = 0.01
    k0: float = 0.0
    z0: float = 1.0
    z_floor: float = 0.07
    aggregate: str = "mean"
    settle_tol: Optional[float] = 1e-4
    current_warn_fraction: float = 0.05
    adaptation: str = "exact"
    x1_0: Optional[float] = None

    def __post_init__(self):
        bounds = {int(n): (b if isinstance(b, BoundsEntry) else BoundsEntry(*b))
                  for n, b in dict(self.bounds).items()}
        object.__setattr__(self, "bounds", bounds)
        missing = set(ADAPTIVE) - set(bounds)
        extra = set(bounds) - set(ADAPTIVE)
        if missing or extra:
            raise ConfigRejected(
                f"bounds must cover exactly {ADAPTIVE}; missing {sorted(missing)}, extra {sorted(extra)}"
            )
        if not 2.0 < self.alpha <= 3.0:
            raise ConfigRejected(f"alpha must lie in (2, 3], got {self.alpha}")
        for name in ("lam", "epsilon", "dt", "cc"):
            if not getattr(self, name) > 0:
                raise ConfigRejected(f"{name} must be positive")
        if self.k0 < 0:
            raise ConfigRejected("k0 must be non-negative")
        if not 0.0 <= self.z_floor < self.z0 <= 1.0:
            raise ConfigRejected("need 0 <= z_floor < z0 <= 1")
        if self.settle_tol is not None and not self.settle_tol > 0:
            raise ConfigRejected("settle_tol must be positive or None")
        if self.adaptation not in ("exact", "euler"):
            raise ConfigRejected(f"unknown adaptation {self.adaptation!r}")
        if self.aggregate not in ("mean", "median"):
            raise ConfigRejected(f"unknown aggregate {self.aggregate!r}")
        for a, b in ((13, 15), (16, 18)):
            _check_capacitance_pair(bounds[a], bounds[b], a, b)

    @property
    def nussbaum_params(self) -> NussbaumParams:
        return NussbaumParams(self.alpha, self.lam)

    def initial_estimates(self) -> tuple:
        return tuple(self.bounds[n].r_init for n in ADAPTIVE)


def _check_capacitance_pair(big: BoundsEntry, small: BoundsEntry, a: int, b: int):
    # the exponential coefficient (a) must dominate the constant (b) initially
    # and decay more slowly toward a larger steady state
    if not big.r_init >= small.r_init > 0:
        raise ConfigRejected(f"need r{a}(0) >= r{b}(0) > 0")
    if not small.rate > big.rate:
        raise ConfigRejected(f"need lambda_x{b} + lambda_y{b} > lambda_x{a} + lambda_y{a}")
    if not adaptive_steady_state(small) < adaptive_steady_state(big):
        raise ConfigRejected(f"steady state of r{b} must lie below that of r{a}")


@dataclass(frozen=True)
class EstimatorState:
    """Observer state between two samples.

    ``z, x1..x4`` are already advanced to the next sample time. ``e, u, N,
    y_hat`` and ``obs`` describe the last processed sample at time ``t``.
    """

    t: float
    z: float
    x1: float
    x2: float
    x3: float
    x4: float
    k: float
    r: tuple
    e: float = 0.0
    u: float = 0.0
    N: float = 1.0
    y_hat: float = 0.0
    obs: tuple = (float("nan"),) * 5
    good: bool = False
    converged: bool = False
    r3: float = float("nan")
    r21: float = float("nan")
    good_count: int = 0
    good_sum: tuple = (0.0,) * 21
    steps: int = 0

    def estimate(self, n: int) -> float:
        if n == 3:
            return self.r3
        if n == 21:
            return self.r21
        return self.r[_POS[n]]

    def running_mean(self) -> Optional[ParameterSet]:
        if self.good_count == 0:
            return None
        return ParameterSet.from_values([s / self.good_count for s in self.good_sum])


def initial_state(cfg: EstimatorConfig, first: TelemetrySample) -> EstimatorState:
    """Observer at rest one sample before ``first``.

    The open-circuit estimate starts at ``cfg.x1_0`` or else the first
    measured voltage; the other voltage states and the resistance estimate
    start at zero.
    """
    return EstimatorState(
        t=first.t - cfg.dt,
        z=cfg.z0,
        x1=first.y if cfg.x1_0 is None else cfg.x1_0,
        x2=0.0,
        x3=0.0,
        x4=0.0,
        k=cfg.k0,
        r=cfg.initial_estimates(),
    )


def control_input(cfg: EstimatorConfig, k: float, e: float) -> float:
    return -nussbaum(cfg.nussbaum_params, k) * e


def _closure(r: tuple, z: float, x1: float, x4: float) -> tuple:
    g = lambda n: r[_POS[n]]  # noqa: E731
    r3 = x1 + g(1) * math.exp(-g(2) * z) - g(4) * z + g(5) * z * z - g(6) * z**3
    r21 = x4 - g(19) * math.exp(-g(20) * z)
    return r3, r21


def solve_r3_r21(st: EstimatorState, cfg: Optional[EstimatorConfig] = None) -> tuple:
    """Close ``(r3, r21)`` from the observer's open-circuit and resistance states.

    Uses the state and estimates at the last processed sample. With ``cfg``
    the convergence precondition is enforced.
    """
    z, x1, _, _, x4 = st.obs if not math.isnan(st.obs[0]) else (st.z, st.x1, st.x2, st.x3, st.x4)
    if cfg is not None and not (abs(st.e) < cfg.epsilon and capacitance_gate(st.r, z)):
        raise NotConverged(f"|e| = {abs(st.e):.3g} V or capacitance gate not satisfied")
    return _closure(st.r, z, x1, x4)


def _observer_rhs(r: tuple, cc: float, i: float, u: float):
    (r1, r2, r4, r5, r6, r7, r8, r9, r10, r11, r12,
     r13, r14, r15, r16, r17, r18, r19, r20) = r
    exp = math.exp
    ic = i / cc

    def f(y):
        z, _, x2, x3, _ = y
        rts = r7 * exp(-r8 * z) + r9
        rtl = r10 * exp(-r11 * z) + r12
        cts = -r13 * exp(-r14 * z) + r15
        ctl = -r16 * exp(-r17 * z) + r18
        if cts <= 0.0 or ctl <= 0.0:
            raise NonPositiveEstimatedCapacitance(
                f"estimated Cts={cts:.6g}, Ctl={ctl:.6g} at z_hat={z:.6g}; "
                "bounds violate the capacitance positivity conditions"
            )
        return (
            -ic,
            -(r1 * r2 * exp(-r2 * z) + r4 - 2.0 * r5 * z + 3.0 * r6 * z * z) * ic - u,
            -x2 / (rts * cts) + i / cts + u,
            -x3 / (rtl * ctl) + i / ctl + u,
            r19 * r20 * exp(-r20 * z) * ic + u,
        )

    return f


def observer_step(cfg: EstimatorConfig, st: EstimatorState, sample: TelemetrySample) -> EstimatorState:
    """Process one telemetry sample and return the successor state."""
    if abs(sample.t - (st.t + cfg.dt)) > 1e-6:
        raise ValueError(f"sample at t={sample.t} does not follow t={st.t} by dt={cfg.dt}")
    i, y = sample.i, sample.y
    y_hat = st.x1 - st.x2 - st.x3 - i * st.x4
    e = y - y_hat

    dt = cfg.dt
    r = tuple(adapt_parameter(rn, e, cfg.bounds[n], dt, cfg.adaptation) for n, rn in zip(ADAPTIVE, st.r))
    N = nussbaum(cfg.nussbaum_params, st.k)
    u = -N * e

    obs = (st.z, st.x1, st.x2, st.x3, st.x4)
    good = abs(e) < cfg.epsilon and capacitance_gate(r, st.z)
    if good and cfg.settle_tol is not None:
        tol = cfg.settle_tol
        good = all(abs(a - b) <= tol * abs(a) for a, b in zip(r, st.r))
    good_sum, good_count = st.good_sum, st.good_count
    r3, r21 = st.r3, st.r21
    if good:
        r3, r21 = _closure(r, st.z, st.x1, st.x4)
        snap = r[:2] + (r3,) + r[2:] + (r21,)
        good_sum = tuple(a + b for a, b in zip(good_sum, snap))
        good_count += 1

    z, x1, x2, x3, x4 = rk4_step(_observer_rhs(r, cfg.cc, i, u), obs, dt)
    z = min(max(z, cfg.z_floor), 1.0)
    return EstimatorState(
        t=sample.t,
        z=z,
        x1=x1 if x1 > 0.0 else 0.0,
        x2=x2 if x2 > 0.0 else 0.0,
        x3=x3 if x3 > 0.0 else 0.0,
        x4=x4 if x4 > 0.0 else 0.0,
        k=update_gain(st.k, e, dt),
        r=r,
        e=e,
        u=u,
        N=N,
        y_hat=y_hat,
        obs=obs,
        good=good,
        converged=st.converged or good,
        r3=r3,
        r21=r21,
        good_count=good_count,
        good_sum=good_sum,
        steps=st.steps + 1,
    )


TRACE_COLUMNS = ("t_s", "e_V", "k", "N_k", "u", "z_hat", "x1_V", "x2_V", "x3_V", "x4_ohm", "y_hat_V")


@dataclass
class RunReport:
    """Outcome of :func:`run_estimation`.

    ``trace`` has one row per processed sample with :data:`TRACE_COLUMNS`.
    ``params`` is ``None`` when no sample converged. ``r_trace`` holds the 19
    adaptive estimates per sample (after adaptation) when requested.
    """

    params: Optional[ParameterSet]
    trace: np.ndarray
    convergence_index: Optional[int]
    good_count: int
    reached_floor: bool
    error_stats: object = None
    r_trace: Optional[np.ndarray] = None
    final_state: Optional[EstimatorState] = None

    def column(self, name: str) -> np.ndarray:
        return self.trace[:, TRACE_COLUMNS.index(name)]

    def summary(self) -> dict:
        if self.params is None:
            return {}
        return dict(zip(PARAM_NAMES, self.params.values()))


def run_estimation(
    cfg: EstimatorConfig,
    stream: Iterable[TelemetrySample],
    record_parameters: bool = False,
    error_bin_width: float = 0.01,
) -> RunReport:
    """Run the observer over a uniform telemetry stream.

    Runs until the stream ends or the estimated state of charge reaches
    ``cfg.z_floor``. Final parameters reduce every good-sample snapshot
    (``|e| < epsilon``, both capacitances provably positive, estimates
    settled).

    Raises :class:`NoConvergence`, carrying the partial report, when no sample
    qualifies.
    """
    from .analytics import error_stats  # analytics depends on nothing here

    rows = []
    r_rows = [] if record_parameters else None
    snaps = [] if cfg.aggregate == "median" else None
    st = None
    conv = None
    reached_floor = False
    abs_current = 0.0
    for sample in stream:
        if st is None:
            st = initial_state(cfg, sample)
        st = observer_step(cfg, st, sample)
        abs_current += abs(sample.i)
        z, x1, x2, x3, x4 = st.obs
        rows.append((st.t, st.e, st.k, st.N, st.u, z, x1, x2, x3, x4, st.y_hat))
        if r_rows is not None:
            r_rows.append(st.r)
        if st.good:
            if conv is None:
                conv = len(rows) - 1
            if snaps is not None:
                snaps.append(st.r[:2] + (st.r3,) + st.r[2:] + (st.r21,))
        if st.z <= cfg.z_floor:
            reached_floor = True
            break

    trace = np.array(rows, dtype=float).reshape(-1, len(TRACE_COLUMNS))
    if rows:
        mean_i = abs_current / len(rows)
        limit = cfg.current_warn_fraction * cfg.cc / 3600.0
        if mean_i > limit:
            log.warning(
                "mean |i| = %.4g A exceeds %.4g A; parameter accuracy is only expected for small currents",
                mean_i, limit,
            )

    report = RunReport(
        params=None,
        trace=trace,
        convergence_index=conv,
        good_count=st.good_count if st else 0,
        reached_floor=reached_floor,
        r_trace=np.array(r_rows).reshape(-1, len(ADAPTIVE)) if r_rows is not None else None,
        final_state=st,
    )
    if conv is None:
        raise NoConvergence("no sample met |e| < epsilon with positive capacitances", report)
    if snaps is not None:
        report.params = ParameterSet.from_values(np.median(np.array(snaps), axis=0))
    else:
        report.params = st.running_mean()
    report.error_stats = error_stats(trace[conv:, 1], error_bin_width)
    return report
