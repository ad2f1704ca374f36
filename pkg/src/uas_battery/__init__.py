"""Equivalent-circuit Li-ion cell model with an online adaptive parameter observer."""

from .analytics import cdf, compare_models, error_stats, fraction_within, histogram
from .errors import (
    BatteryError,
    ConfigRejected,
    NoConvergence,
    NonMonotonicTime,
    NonPositiveCapacitance,
    ParseError,
)
from .estimator import (
    BoundsEntry,
    EstimatorConfig,
    RunReport,
    adaptive_steady_state,
    capacitance_gate,
    run_estimation,
)
from .model import (
    CapacityConfig,
    ConstantCurrent,
    ConstantResistance,
    CurrentTable,
    ParameterSet,
    PulsedResistance,
    coulomb_soc,
    invert_ocv,
    random_current_table,
    simulate,
)
from .specfun import NussbaumParams, gamma, mittag_leffler, nussbaum, verify_nussbaum_property

__version__ = "0.1.0"
