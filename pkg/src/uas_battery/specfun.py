"""Gamma, Mittag-Leffler and the Mittag-Leffler Nussbaum gain."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ArgumentTooLarge, DomainError

RHO_MAX = 1e3
MAX_TERMS = 500
_REL_STOP = 1e-16
_STOP_RUN = 3


def gamma(x: float) -> float:
    """Gamma function for positive real ``x``."""
    if not x > 0:
        raise DomainError(f"gamma is only defined here for x > 0, got {x}")
    return math.gamma(x)


def _term(alpha: float, rho: float, k: int) -> float:
    a = k * alpha + 1.0
    if a < 170.0:
        try:
            return rho**k / math.gamma(a)
        except OverflowError:
            pass
    if rho == 0.0:
        return 0.0
    mag = math.exp(k * math.log(abs(rho)) - math.lgamma(a))
    return -mag if (rho < 0 and k % 2) else mag


def mittag_leffler(alpha: float, rho: float) -> float:
    """One-parameter Mittag-Leffler function by compensated power series.

    Summation stops once three consecutive terms fall below ``1e-16`` times
    the running sum, or after 500 terms. Arguments with ``|rho| > 1e3`` are
    refused: the alternating series loses every significant digit there.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if abs(rho) > RHO_MAX:
        raise ArgumentTooLarge(f"|rho| = {abs(rho):.6g} exceeds {RHO_MAX:g}")
    # Neumaier summation
    total = 1.0
    comp = 0.0
    small = 0
    for k in range(1, MAX_TERMS):
        term = _term(alpha, rho, k)
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        if abs(term) < _REL_STOP * abs(total + comp):
            small += 1
            if small >= _STOP_RUN:
                break
        else:
            small = 0
    return total + comp


@dataclass(frozen=True)
class NussbaumParams:
    alpha: float = 2.5
    lam: float = 1.0

    def __post_init__(self):
        if not 2.0 < self.alpha <= 3.0:
            raise DomainError(f"alpha must lie in (2, 3], got {self.alpha}")
        if not self.lam > 0:
            raise DomainError(f"lambda must be positive, got {self.lam}")


def nussbaum(params: NussbaumParams, k: float) -> float:
    """Switching gain ``E_alpha(-lambda k^alpha)``."""
    if k < 0:
        raise DomainError(f"gain argument must be non-negative, got {k}")
    return mittag_leffler(params.alpha, -params.lam * k**params.alpha)


@dataclass(frozen=True)
class NussbaumReport:
    sup_avg: float
    inf_avg: float
    k: np.ndarray
    running_avg: np.ndarray


def verify_nussbaum_property(
    params: NussbaumParams,
    k0: float,
    k_max: float,
    grid: int = 2001,
    func: Optional[Callable[[float], float]] = None,
) -> NussbaumReport:
    """Running average ``(1/(k-k0)) * integral_{k0}^{k} N`` on a uniform grid.

    Only finite evidence of the unbounded sup/inf property can be produced;
    the report carries the extreme values reached on ``(k0, k_max]``. ``func``
    replaces the Nussbaum gain, which is useful to check the quadrature.
    """
    if not k_max > k0 >= 0:
        raise ValueError("need k_max > k0 >= 0")
    if grid < 2:
        raise ValueError("grid needs at least two points")
    f = func if func is not None else (lambda k: nussbaum(params, k))
    ks = np.linspace(k0, k_max, grid)
    vals = np.array([f(float(k)) for k in ks])
    h = ks[1] - ks[0]
    integral = np.concatenate(([0.0], np.cumsum(0.5 * h * (vals[1:] + vals[:-1]))))
    avg = integral[1:] / (ks[1:] - k0)
    return NussbaumReport(float(avg.max()), float(avg.min()), ks[1:], avg)
