"""Reference data for the 4.1 V Li-ion cell used throughout tests and demos.

``CELL_41V`` are the published Chen-Mora constants. ``CELL_41V_BOUNDS`` are
adaptation bounds, confidence weights and initial estimates that recover
them; ``CELL_41V_ESTIMATED`` and ``CELL_41V_ERROR_PCT`` are the published
estimation results for that setup.
"""

from .model import CapacityConfig, ParameterSet

CELL_41V = ParameterSet(
    r1=1.031, r2=35.0, r3=3.685, r4=0.2156, r5=0.1178, r6=0.3201,
    r7=0.3208, r8=29.14, r9=0.04669, r10=6.603, r11=155.2, r12=0.04984,
    r13=752.9, r14=13.51, r15=703.6, r16=6056.0, r17=27.12, r18=4475.0,
    r19=0.1562, r20=24.37, r21=0.07446,
)

# 270 mAh keeps runs short; the transient parameters do not depend on capacity.
CELL_41V_CAPACITY = CapacityConfig(C=0.27)

# n: (upper, lower, confidence on upper, confidence on lower, initial estimate)
CELL_41V_BOUNDS = {
    1: (4.0, 0.1, 20.0, 65.0, 100.0),
    2: (50.0, 25.0, 50.0, 70.0, 2000.0),
    4: (0.5, 0.1, 30.0, 70.0, 50.0),
    5: (0.5, 0.01, 20.0, 70.0, 30.0),
    6: (0.5, 0.1, 60.0, 50.0, 200.0),
    7: (1.0, 0.1, 50.0, 50.0, 180.0),
    8: (50.0, 10.0, 50.0, 50.0, 1700.0),
    9: (0.1, 0.01, 50.0, 50.0, 240.0),
    10: (10.0, 1.0, 70.0, 50.0, 3600.0),
    11: (200.0, 100.0, 50.0, 50.0, 9300.0),
    12: (0.1, 0.01, 50.0, 50.0, 264.0),
    13: (1000.0, 500.0, 60.0, 55.0, 50000.0),
    14: (30.0, 1.0, 5.0, 10.0, 1000.0),
    15: (800.0, 500.0, 80.0, 50.0, 50000.0),
    16: (7000.0, 5000.0, 10.0, 10.0, 50000.0),
    17: (50.0, 5.0, 50.0, 50.0, 1000.0),
    18: (5000.0, 3000.0, 50.0, 50.0, 50000.0),
    19: (0.5, 0.01, 20.0, 50.0, 60.0),
    20: (50.0, 15.0, 30.0, 80.0, 1200.0),
}

CELL_41V_ESTIMATED = ParameterSet(
    r1=1.0176, r2=35.4167, r3=3.6855, r4=0.22, r5=0.1189, r6=0.3182,
    r7=0.3002, r8=30.0, r9=0.055, r10=6.2533, r11=149.9, r12=0.0553,
    r13=760.869, r14=10.6672, r15=684.62, r16=6000.0, r17=27.5, r18=4500.0,
    r19=0.15, r20=24.5455, r21=0.0826,
)

CELL_41V_ERROR_PCT = {
    1: 1.3, 2: 1.2, 3: 0.014, 4: 2.04, 5: 0.934, 6: 0.594, 7: 6.42,
    8: 2.95, 9: 17.79, 10: 5.3, 11: 3.41, 12: 10.95, 13: 1.06, 14: 21.04,
    15: 2.69, 16: 0.92, 17: 1.40, 18: 0.558, 19: 3.97, 20: 0.72, 21: 10.93,
}


def cell_41v_estimator(**overrides):
    """Estimator configuration for the reference cell; keywords override defaults."""
    from .estimator import EstimatorConfig

    kw = dict(bounds=CELL_41V_BOUNDS, cc=CELL_41V_CAPACITY.cc)
    kw.update(overrides)
    return EstimatorConfig(**kw)
