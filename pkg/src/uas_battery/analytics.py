"""Error statistics and model-versus-model validation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptySeries
from .model import (
    CapacityConfig,
    CurrentTable,
    LoadProfile,
    ParameterSet,
    invert_ocv,
    ocv,
    simulate,
)

DEFAULT_BIN_WIDTH = 0.01


@dataclass(frozen=True)
class Histogram:
    bin_width: float
    origin: float
    first_bin: int
    counts: np.ndarray

    @property
    def sample_count(self) -> int:
        return int(self.counts.sum())

    def edges(self) -> np.ndarray:
        k = np.arange(self.first_bin, self.first_bin + len(self.counts) + 1)
        return self.origin + k * self.bin_width

    def centers(self) -> np.ndarray:
        e = self.edges()
        return 0.5 * (e[:-1] + e[1:])


@dataclass(frozen=True)
class ErrorStats:
    mean: float
    median: float
    mode: float
    stddev: float
    sample_count: int

    def as_rows(self):
        return [
            ("mean", self.mean),
            ("median", self.median),
            ("mode", self.mode),
            ("stddev", self.stddev),
            ("sample_count", self.sample_count),
        ]


def _series(errors) -> np.ndarray:
    a = np.asarray(errors, dtype=float).ravel()
    if a.size == 0:
        raise EmptySeries("series is empty")
    return a


def histogram(errors, bin_width: float = DEFAULT_BIN_WIDTH, origin: float = 0.0) -> Histogram:
    """Contiguous histogram; value ``v`` falls in bin ``floor((v - origin) / bin_width)``."""
    if not bin_width > 0:
        raise ValueError("bin_width must be positive")
    a = _series(errors)
    idx = np.floor((a - origin) / bin_width).astype(np.int64)
    lo = int(idx.min())
    counts = np.bincount(idx - lo)
    return Histogram(bin_width, origin, lo, counts)


def error_stats(errors, bin_width: float = DEFAULT_BIN_WIDTH, origin: float = 0.0) -> ErrorStats:
    """Mean, median, histogram mode and population standard deviation.

    The mode is the centre of the most populated bin, the lowest such bin on
    ties. A constant series reports the constant itself as its mode.
    """
    a = _series(errors)
    if np.all(a == a[0]):
        c = float(a[0])
        return ErrorStats(c, c, c, 0.0, a.size)
    h = histogram(a, bin_width, origin)
    top = int(np.argmax(h.counts))  # argmax returns the first maximum
    mode = origin + (h.first_bin + top + 0.5) * bin_width
    return ErrorStats(
        mean=float(np.mean(a)),
        median=float(np.median(a)),
        mode=float(mode),
        stddev=float(np.std(a)),
        sample_count=int(a.size),
    )


def cdf(errors):
    """Empirical CDF as ``(values, fractions)``, one point per distinct value."""
    a = np.sort(_series(errors))
    values, last = np.unique(a, return_index=False, return_counts=True)
    frac = np.cumsum(last) / a.size
    frac[-1] = 1.0
    return values, frac


def fraction_within(errors, limit: float) -> float:
    a = _series(errors)
    return float(np.count_nonzero(np.abs(a) <= limit)) / a.size


@dataclass
class Comparison:
    t: np.ndarray
    i: np.ndarray
    y_a: np.ndarray
    y_b: np.ndarray
    eo_a: np.ndarray
    eo_b: np.ndarray
    z_a: np.ndarray
    z_b: np.ndarray

    @property
    def diff(self) -> np.ndarray:
        return self.y_a - self.y_b

    @property
    def eo_diff(self) -> np.ndarray:
        return self.eo_a - self.eo_b

    def max_abs_diff(self) -> float:
        return float(np.max(np.abs(self.diff))) if len(self.t) else 0.0

    def max_abs_eo_diff(self) -> float:
        return float(np.max(np.abs(self.eo_diff))) if len(self.t) else 0.0


def compare_models(
    pa: ParameterSet,
    pb: ParameterSet,
    cap: CapacityConfig,
    profile: LoadProfile,
    t_end: float,
    dt: float = 0.01,
    z_floor: float = 0.07,
) -> Comparison:
    """Drive two parameter sets with the identical current sequence.

    ``profile`` is resolved once against model ``a``; the resulting currents
    are replayed as a step-hold table for model ``b``.
    """
    ta = simulate(pa, cap, profile, t_end, dt, z_floor=z_floor)
    replay = CurrentTable(tuple(float(t) for t in ta.t), tuple(float(i) for i in ta.i))
    tb = simulate(pb, cap, replay, float(ta.t[-1]) if len(ta) > 1 else dt, dt, z_floor=-1.0)
    n = min(len(ta), len(tb))
    return Comparison(
        t=ta.t[:n],
        i=ta.i[:n],
        y_a=ta.y[:n],
        y_b=tb.y[:n],
        eo_a=ta.x1[:n],
        eo_b=tb.x1[:n],
        z_a=ta.z[:n],
        z_b=tb.z[:n],
    )


def ocv_soc(p: ParameterSet, voltages, z_lo: float = 0.05) -> np.ndarray:
    """State of charge from open-circuit voltages through ``p``'s OCV curve."""
    return np.array([invert_ocv(p, float(v), z_lo) for v in np.asarray(voltages, dtype=float)])
