"""Exception hierarchy shared by every module in the package."""


class BatteryError(Exception):
    """Base class for all package errors."""


class NonPositiveCapacitance(BatteryError):
    """A transient capacitance evaluated to a non-positive value."""


class NonPositiveEstimatedCapacitance(NonPositiveCapacitance):
    """An estimated capacitance became non-positive during an estimation run."""


class ProfileDomain(BatteryError, ValueError):
    """A load profile was constructed with out-of-domain values."""


class OutOfRange(BatteryError, ValueError):
    """A voltage lies outside the invertible open-circuit-voltage bracket."""


class NonMonotonic(BatteryError, ValueError):
    """The open-circuit-voltage curve is not increasing on the inversion range."""


class DomainError(BatteryError, ValueError):
    """Special-function argument outside its domain."""


class ArgumentTooLarge(BatteryError, ValueError):
    """Series argument too large to be summed in double precision."""


class ConfigRejected(BatteryError, ValueError):
    """Estimator configuration violates a construction-time invariant."""


class NotConverged(BatteryError):
    """The closure for r3/r21 was requested before the observer converged."""


class NoConvergence(BatteryError):
    """A telemetry stream ended without a single converged sample.

    The partial :class:`~uas_battery.estimator.RunReport` is attached as
    ``report`` so traces remain inspectable.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class EmptySeries(BatteryError, ValueError):
    """A statistic was requested on an empty series."""


class ParseError(BatteryError, ValueError):
    """A telemetry or configuration file could not be parsed."""


class NonMonotonicTime(ParseError):
    """Telemetry timestamps are not strictly increasing."""
