"""Two-RC-branch equivalent circuit with SoC dependent elements.

State vector is ``(z, x1, x2, x3, x4)``: state of charge, open circuit
voltage, voltage across the short and long transient RC branches, and the
series resistance. Positive current discharges the cell.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, fields
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np

from .errors import NonMonotonic, NonPositiveCapacitance, OutOfRange, ProfileDomain

PARAM_NAMES = tuple(f"r{n}" for n in range(1, 22))
Z_FLOOR = 0.07


@dataclass(frozen=True)
class ParameterSet:
    """The 21 constants that shape every circuit-element curve."""

    r1: float
    r2: float
    r3: float
    r4: float
    r5: float
    r6: float
    r7: float
    r8: float
    r9: float
    r10: float
    r11: float
    r12: float
    r13: float
    r14: float
    r15: float
    r16: float
    r17: float
    r18: float
    r19: float
    r20: float
    r21: float

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "ParameterSet":
        if len(values) != 21:
            raise ValueError(f"expected 21 parameters, got {len(values)}")
        return cls(*(float(v) for v in values))

    def values(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self))

    def __getitem__(self, n: int) -> float:
        """1-based access, ``p[13]`` is ``p.r13``."""
        if not 1 <= n <= 21:
            raise IndexError(n)
        return getattr(self, f"r{n}")

    def is_positive(self) -> bool:
        return all(v > 0 for v in self.values())


@dataclass(frozen=True)
class CapacityConfig:
    """Nominal capacity in Ah with temperature, cycle and self-discharge factors."""

    C: float
    f1: float = 1.0
    f2: float = 1.0
    f3: float = 1.0

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("capacity must be positive")
        for f in (self.f1, self.f2, self.f3):
            if not 0.0 <= f <= 1.0:
                raise ValueError("capacity factors must lie in [0, 1]")
        if self.cc <= 0:
            raise ValueError("effective capacity must be positive")

    @property
    def cc(self) -> float:
        """Effective capacity in ampere-seconds."""
        return 3600.0 * self.C * self.f1 * self.f2 * self.f3


class BatteryState(NamedTuple):
    t: float
    z: float
    x1: float
    x2: float
    x3: float
    x4: float


class TelemetrySample(NamedTuple):
    t: float
    i: float
    y: float


class CircuitElements(NamedTuple):
    Eo: float
    Rts: float
    Rtl: float
    Cts: float
    Ctl: float
    Rs: float


def ocv(p: ParameterSet, z: float) -> float:
    return -p.r1 * math.exp(-p.r2 * z) + p.r3 + p.r4 * z - p.r5 * z * z + p.r6 * z**3


def series_resistance(p: ParameterSet, z: float) -> float:
    return p.r19 * math.exp(-p.r20 * z) + p.r21


def eval_circuit_elements(p: ParameterSet, z: float) -> CircuitElements:
    """Evaluate all six SoC dependent circuit elements at ``z``."""
    return CircuitElements(
        Eo=ocv(p, z),
        Rts=p.r7 * math.exp(-p.r8 * z) + p.r9,
        Rtl=p.r10 * math.exp(-p.r11 * z) + p.r12,
        Cts=-p.r13 * math.exp(-p.r14 * z) + p.r15,
        Ctl=-p.r16 * math.exp(-p.r17 * z) + p.r18,
        Rs=series_resistance(p, z),
    )


def terminal_voltage(s: BatteryState, i: float) -> float:
    return s.x1 - s.x2 - s.x3 - i * s.x4


def initial_state(p: ParameterSet, z0: float = 1.0, t0: float = 0.0) -> BatteryState:
    """Rested cell at ``z0``: both RC branches discharged."""
    return BatteryState(t0, z0, ocv(p, z0), 0.0, 0.0, series_resistance(p, z0))


# -- integration --------------------------------------------------------------

def rk4_step(f: Callable, y: Sequence[float], dt: float) -> tuple:
    """One classical fourth-order Runge-Kutta step of the autonomous ``y' = f(y)``.

    ``y`` is a flat tuple of floats and ``f`` returns one of the same length.
    Inputs that vary in time are held constant across the step by the caller.
    """
    h2 = 0.5 * dt
    k1 = f(y)
    k2 = f(tuple(a + h2 * b for a, b in zip(y, k1)))
    k3 = f(tuple(a + h2 * b for a, b in zip(y, k2)))
    k4 = f(tuple(a + dt * b for a, b in zip(y, k3)))
    s = dt / 6.0
    return tuple(
        a + s * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)
    )


def _rhs(p: ParameterSet, cc: float, i: float) -> Callable:
    r1, r2, r4, r5, r6 = p.r1, p.r2, p.r4, p.r5, p.r6
    r7, r8, r9, r10, r11, r12 = p.r7, p.r8, p.r9, p.r10, p.r11, p.r12
    r13, r14, r15, r16, r17, r18 = p.r13, p.r14, p.r15, p.r16, p.r17, p.r18
    r19, r20 = p.r19, p.r20
    exp = math.exp
    ic = i / cc

    def f(y):
        z, _, x2, x3, _ = y
        rts = r7 * exp(-r8 * z) + r9
        rtl = r10 * exp(-r11 * z) + r12
        cts = -r13 * exp(-r14 * z) + r15
        ctl = -r16 * exp(-r17 * z) + r18
        if cts <= 0.0 or ctl <= 0.0:
            raise NonPositiveCapacitance(f"Cts={cts:.6g}, Ctl={ctl:.6g} at z={z:.6g}")
        return (
            -ic,
            -(r1 * r2 * exp(-r2 * z) + r4 - 2.0 * r5 * z + 3.0 * r6 * z * z) * ic,
            -x2 / (rts * cts) + i / cts,
            -x3 / (rtl * ctl) + i / ctl,
            r19 * r20 * exp(-r20 * z) * ic,
        )

    return f


def state_derivative(p: ParameterSet, cap: CapacityConfig, s: BatteryState, i: float) -> BatteryState:
    """Time derivative of the state; the ``t`` slot holds 1 (dt/dt)."""
    d = _rhs(p, cap.cc, i)(s[1:])
    return BatteryState(1.0, *d)


def _clamp(y):
    z, x1, x2, x3, x4 = y
    return (
        min(max(z, 0.0), 1.0),
        x1,
        x2 if x2 > 0.0 else 0.0,
        x3 if x3 > 0.0 else 0.0,
        x4 if x4 > 0.0 else 0.0,
    )


def step(p: ParameterSet, cap: CapacityConfig, s: BatteryState, i: float, dt: float) -> BatteryState:
    """Advance the cell by ``dt`` seconds with current ``i`` held constant."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    y = _clamp(rk4_step(_rhs(p, cap.cc, i), s[1:], dt))
    return BatteryState(s.t + dt, *y)


# -- load profiles ------------------------------------------------------------

@dataclass(frozen=True)
class ConstantCurrent:
    i: float

    def __post_init__(self):
        if self.i < 0:
            raise ProfileDomain("current must be non-negative")


@dataclass(frozen=True)
class ConstantResistance:
    R: float

    def __post_init__(self):
        if not self.R > 0:
            raise ProfileDomain("load resistance must be positive")


@dataclass(frozen=True)
class PulsedResistance:
    """Resistive load switched on for ``on`` seconds, then off for ``off``."""

    R: float
    on: float
    off: float

    def __post_init__(self):
        if not self.R > 0:
            raise ProfileDomain("load resistance must be positive")
        if self.on <= 0 or self.off < 0:
            raise ProfileDomain("pulse durations must be positive")

    def connected(self, t: float) -> bool:
        return math.fmod(t, self.on + self.off) < self.on


@dataclass(frozen=True)
class CurrentTable:
    """Step-hold current schedule; ``times`` must start at 0 and increase."""

    times: tuple
    currents: tuple

    def __post_init__(self):
        if len(self.times) == 0 or len(self.times) != len(self.currents):
            raise ProfileDomain("current table must be non-empty with matching columns")
        if any(c < 0 for c in self.currents):
            raise ProfileDomain("currents must be non-negative")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ProfileDomain("table times must be strictly increasing")

    @classmethod
    def from_pairs(cls, pairs) -> "CurrentTable":
        pairs = list(pairs)
        return cls(tuple(float(t) for t, _ in pairs), tuple(float(c) for _, c in pairs))

    def current(self, t: float) -> float:
        k = bisect.bisect_right(self.times, t) - 1
        return self.currents[max(k, 0)]


def random_current_table(
    seed: int,
    t_end: float,
    i_min: float = 0.02,
    i_max: float = 0.5,
    hold_min: float = 60.0,
    hold_max: float = 300.0,
) -> CurrentTable:
    """Piecewise-constant discharge schedule with random levels and hold times.

    Deterministic for a given ``seed``; levels are drawn uniformly from
    ``[i_min, i_max]`` A and hold times from ``[hold_min, hold_max]`` s.
    """
    if not (0 <= i_min <= i_max and 0 < hold_min <= hold_max and t_end > 0):
        raise ProfileDomain("invalid random profile ranges")
    rng = np.random.default_rng(seed)
    times, currents = [], []
    t = 0.0
    while t < t_end:
        times.append(t)
        currents.append(float(np.round(rng.uniform(i_min, i_max), 4)))
        t += float(np.round(rng.uniform(hold_min, hold_max), 2))
    return CurrentTable(tuple(times), tuple(currents))


LoadProfile = Union[ConstantCurrent, ConstantResistance, PulsedResistance, CurrentTable]


@dataclass
class Trace:
    """Uniformly sampled simulation output.

    Row ``k`` holds the state at ``t[k]`` and the current applied over
    ``[t[k], t[k] + dt)``; ``y[k]`` is the terminal voltage under that current.
    """

    t: np.ndarray
    i: np.ndarray
    y: np.ndarray
    z: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    x3: np.ndarray
    x4: np.ndarray
    dt: float
    stopped_early: bool = False

    def __len__(self):
        return len(self.t)

    def samples(self):
        for t, i, y in zip(self.t, self.i, self.y):
            yield TelemetrySample(float(t), float(i), float(y))

    def states(self):
        for row in zip(self.t, self.z, self.x1, self.x2, self.x3, self.x4):
            yield BatteryState(*map(float, row))


def simulate(
    p: ParameterSet,
    cap: CapacityConfig,
    profile: LoadProfile,
    t_end: float,
    dt: float = 0.01,
    z0: float = 1.0,
    z_floor: float = Z_FLOOR,
    state: BatteryState | None = None,
) -> Trace:
    """Integrate the cell under ``profile`` from ``t=0`` to ``t_end``.

    Resistive loads draw ``y/R`` computed from the previous sample's voltage
    (the open-circuit value at the first sample). The run stops early, with
    ``stopped_early`` set, once the state of charge reaches ``z_floor``.
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if not isinstance(profile, (ConstantCurrent, ConstantResistance, PulsedResistance, CurrentTable)):
        raise ProfileDomain(f"unsupported profile {profile!r}")
    s = state if state is not None else initial_state(p, z0)
    n = int(round(t_end / dt)) + 1
    rows = np.empty((n, 8))
    y_prev = s.x1 - s.x2 - s.x3
    stopped = False
    k = 0
    for k in range(n):
        t = k * dt
        if isinstance(profile, ConstantCurrent):
            i = profile.i
        elif isinstance(profile, ConstantResistance):
            i = y_prev / profile.R
        elif isinstance(profile, PulsedResistance):
            i = y_prev / profile.R if profile.connected(t) else 0.0
        else:
            i = profile.current(t)
        s = s._replace(t=t)
        y = terminal_voltage(s, i)
        rows[k] = (t, i, y, s.z, s.x1, s.x2, s.x3, s.x4)
        y_prev = s.x1 - s.x2 - s.x3 - i * s.x4
        if s.z <= z_floor:
            stopped = k < n - 1
            break
        if k < n - 1:
            s = step(p, cap, s, i, dt)
    rows = rows[: k + 1]
    return Trace(*rows.T.copy(), dt=dt, stopped_early=stopped)


def coulomb_soc(trace: Trace, cap: CapacityConfig, z0: float = 1.0) -> np.ndarray:
    """Left-rectangle charge count of ``trace.i`` starting from ``z0``."""
    i = np.asarray(trace.i, dtype=float)
    drawn = np.concatenate(([0.0], np.cumsum(i[:-1]))) if len(i) else i
    return z0 - (trace.dt / cap.cc) * drawn


def invert_ocv(p: ParameterSet, v: float, z_lo: float = 0.05, grid: int = 2001) -> float:
    """State of charge whose open-circuit voltage equals ``v``, by bisection."""
    zs = np.linspace(z_lo, 1.0, grid)
    e = -p.r1 * np.exp(-p.r2 * zs) + p.r3 + p.r4 * zs - p.r5 * zs**2 + p.r6 * zs**3
    if np.any(np.diff(e) <= 0):
        raise NonMonotonic(f"open circuit voltage is not increasing on [{z_lo}, 1]")
    lo, hi = z_lo, 1.0
    v_lo, v_hi = ocv(p, lo), ocv(p, hi)
    tol = 1e-9
    if not v_lo - tol <= v <= v_hi + tol:
        raise OutOfRange(f"{v} V outside [{v_lo:.6f}, {v_hi:.6f}] V")
    if v >= v_hi:
        return hi
    if v <= v_lo:
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        vm = ocv(p, mid)
        if abs(vm - v) <= tol:
            return mid
        if vm < v:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)
