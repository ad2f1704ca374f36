"""Acceptance criteria A1-A8.

Every check records one line in ``RESULTS``; ``conftest.py`` prints them in
the terminal summary, and running this file directly prints them too. A
failing criterion fails its test; nothing here is relaxed to make it pass.
"""

import math
import time

import numpy as np
import pytest

from uas_battery.analytics import compare_models, error_stats, cdf, histogram
from uas_battery.estimator import (
    ADAPTIVE,
    EstimatorConfig,
    EstimatorState,
    adaptive_steady_state,
    estimated_elements,
    capacitance_gate,
    observer_step,
    run_estimation,
)
from uas_battery.model import (
    ConstantCurrent,
    eval_circuit_elements,
    invert_ocv,
    random_current_table,
    simulate,
)
from uas_battery.reference import (
    CELL_41V,
    CELL_41V_CAPACITY,
    CELL_41V_ERROR_PCT,
    CELL_41V_ESTIMATED,
    cell_41v_estimator,
)
from uas_battery.specfun import NussbaumParams, gamma, mittag_leffler, verify_nussbaum_property

P = CELL_41V
CAP = CELL_41V_CAPACITY
A5_SEED = 0
A5_T_END = 4000.0

RESULTS = {}


def record(key, ok, detail):
    RESULTS[key] = (bool(ok), detail)
    return ok


def summary_lines():
    lines = []
    for key in sorted(RESULTS, key=lambda k: (int(k[1]), k)):
        ok, detail = RESULTS[key]
        lines.append(f"{key:<10} {'PASS' if ok else 'FAIL'}  {detail}")
    return lines


def pct(got, want):
    return 100.0 * abs(got - want) / abs(want)


def sig4(x):
    return float(f"{x:.4g}")


@pytest.fixture(scope="module")
def a1():
    tr = simulate(P, CAP, ConstantCurrent(0.4), 4000.0)
    t0 = time.perf_counter()
    rep = run_estimation(cell_41v_estimator(), tr.samples())
    return tr, rep, time.perf_counter() - t0


@pytest.fixture(scope="module")
def a5(a1):
    _, rep, _ = a1
    prof = random_current_table(A5_SEED, A5_T_END)
    return compare_models(P, rep.params, CAP, prof, A5_T_END)


class TestA1TableReproduction:
    def test_adaptive_parameters(self, a1):
        _, rep, _ = a1
        bad = []
        for n in ADAPTIVE:
            err = pct(rep.params[n], P[n])
            if not err <= CELL_41V_ERROR_PCT[n] + 2.0:
                bad.append(f"r{n} {err:.2f}% > {CELL_41V_ERROR_PCT[n] + 2.0:.2f}%")
        ok = record("A1.params", not bad, f"{19 - len(bad)}/19 adaptive parameters within published error + 2 points"
                    + (f"; out: {', '.join(bad)}" if bad else ""))
        assert ok, bad

    def test_r3(self, a1):
        _, rep, _ = a1
        err = pct(rep.params.r3, 3.685)
        ok = record("A1.r3", err <= 0.5, f"r3 = {rep.params.r3:.5f}, error {err:.3f}% (limit 0.5%)")
        assert ok

    def test_r21(self, a1):
        _, rep, _ = a1
        err = pct(rep.params.r21, 0.07446)
        ok = record("A1.r21", err <= 12.0, f"r21 = {rep.params.r21:.5g}, error {err:.1f}% (limit 12%)")
        assert ok

    def test_runtime(self, a1):
        tr, _, seconds = a1
        ok = record("A1.time", seconds <= 60.0, f"estimate over {len(tr)} samples took {seconds:.1f} s (limit 60 s)")
        assert ok


class TestA2SteadyState:
    def test_published_rows(self):
        rows = []
        ok = True
        for n in (1, 2, 4, 13):
            got = adaptive_steady_state(cell_41v_estimator().bounds[n])
            want = CELL_41V_ESTIMATED[n]
            same = sig4(got) == sig4(want)
            ok &= same
            rows.append(f"r{n} {got:.6g} vs {want:g}")
        record("A2", ok, "fixed points match published estimates to 4 significant digits: " + "; ".join(rows))
        assert ok


class TestA3ConvergenceSpeed:
    def test_convergence_index_and_gain(self, a1):
        _, rep, _ = a1
        c = rep.convergence_index
        e = rep.column("e_V")
        dN = np.abs(np.diff(rep.column("N_k")[c:]))
        stays = int(np.nonzero(np.abs(e) >= 1e-3)[0][-1]) + 1 if np.any(np.abs(e) >= 1e-3) else 0
        ok = c is not None and c <= 300 and abs(e[c]) < 1e-3 and float(dN.max(initial=0.0)) < 1e-6
        record("A3", ok, f"converged at sample {c} (limit 300); |e| < 1e-3 from sample {stays} on; "
                         f"max |dN| after convergence {dN.max(initial=0.0):.2e}")
        assert ok


class TestA4Tracking:
    def test_post_convergence_error(self, a1):
        tr, rep, _ = a1
        e = np.abs(rep.column("e_V")[rep.convergence_index:])
        z_end = rep.column("z_hat")[-1]
        ok = rep.reached_floor and e.max() < 1e-2 and e[-1] <= 1e-3
        record("A4", ok, f"max |e| after convergence {e.max():.2e} V (limit 1e-2); final |e| {e[-1]:.2e} V; "
                         f"z_hat reached {z_end:.4f}")
        assert ok


class TestA5ModelValidation:
    def test_voltage_differences(self, a5):
        dy, deo = a5.max_abs_diff(), a5.max_abs_eo_diff()
        ok = dy < 0.05 and deo < 0.05
        record("A5", ok, f"seed {A5_SEED} profile, {len(a5.t)} samples: max |dy| {dy:.4f} V, "
                         f"max |dEo| {deo:.4f} V (limit 0.05)")
        assert ok


class TestA6SocCrossCheck:
    def test_ocv_soc_tracks_coulomb(self, a1, a5):
        _, rep, _ = a1
        pe = rep.params
        zc = 1.0 - np.concatenate(([0.0], np.cumsum(a5.i[:-1]))) * 0.01 / CAP.cc
        idx = np.nonzero(a5.i > 0.05)[0][::10]
        z_ocv = np.array([invert_ocv(pe, v) for v in a5.eo_b[idx]])
        gap = float(np.max(np.abs(z_ocv - zc[idx])))
        # the true cell's OCV read through the estimated curve, for information
        top = eval_circuit_elements(pe, 1.0).Eo
        cross = np.array([invert_ocv(pe, min(v, top)) for v in a5.eo_a[idx]])
        cross_gap = float(np.max(np.abs(cross - zc[idx])))
        ok = gap <= 0.02
        record("A6", ok, f"estimated-model OCV inverted vs Coulomb count: max gap {gap:.2e} (limit 0.02) over "
                         f"{len(idx)} loaded samples; true OCV through estimated curve (info): {cross_gap:.3f}")
        assert ok


def _perfect_model_max_error():
    bounds = {n: (P[n], P[n], 1.0, 2.0 if n in (15, 18) else 1.0, P[n]) for n in ADAPTIVE}
    cfg = EstimatorConfig(bounds=bounds, cc=CAP.cc)
    tr = simulate(P, CAP, random_current_table(9, 600.0, hold_min=10, hold_max=60), 600.0)
    s0 = next(tr.states())
    st = EstimatorState(t=-0.01, z=s0.z, x1=s0.x1, x2=s0.x2, x3=s0.x3, x4=s0.x4, k=0.0, r=cfg.initial_estimates())
    worst = 0.0
    for sample in tr.samples():
        st = observer_step(cfg, st, sample)
        worst = max(worst, abs(st.e))
    return worst


def _gate_soundness(draws=10_000, seed=2024):
    rng = np.random.default_rng(seed)
    base = {n: P[n] for n in ADAPTIVE}
    passed = violations = 0
    for _ in range(draws):
        r = dict(base)
        r[13], r[15], r[16], r[18] = 10 ** rng.uniform(0, 5, 4)
        r[14], r[17] = 10 ** rng.uniform(-3, 2, 2)
        z = rng.uniform(1e-3, 1.0)
        if capacitance_gate(r, z):
            passed += 1
            el = estimated_elements(r, z)
            violations += not (el.Cts > 0 and el.Ctl > 0)
    return passed, violations


class TestA7Properties:
    def test_perfect_model_identity(self):
        worst = _perfect_model_max_error()
        ok = record("A7.ii", worst <= 1e-12, f"observer started at plant truth: max |e| {worst:.1e} V over 600 s")
        assert ok

    def test_gate_soundness(self):
        passed, violations = _gate_soundness()
        ok = record("A7.iii", violations == 0 and passed > 0,
                    f"10000 random draws, {passed} passed the gate, {violations} with a non-positive capacitance")
        assert ok

    def test_nussbaum_evidence(self):
        rep = verify_nussbaum_property(NussbaumParams(2.5, 1.0), 0.0, 14.0, grid=2801)
        ok = record("A7.iv", rep.sup_avg > 1.0 and rep.inf_avg < -1.0,
                    f"running average of N on [0, 14]: sup {rep.sup_avg:.3f}, inf {rep.inf_avg:.3f}")
        assert ok

    def test_statistics_exact(self):
        s = error_stats([1.0, 2.0, 3.0])
        m = error_stats([-1.0, -1.0, 0.0, 2.0], bin_width=1.0)
        x, f = cdf([3.0, 1.0, 2.0])
        h = histogram([0.0, 0.05, 0.15], 0.1)
        ok = (s.mean == 2.0 and s.median == 2.0 and abs(s.stddev - math.sqrt(2.0 / 3.0)) < 1e-15
              and m.mode == -0.5 and x.tolist() == [1.0, 2.0, 3.0] and f.tolist() == [1 / 3, 2 / 3, 1.0]
              and h.counts.tolist() == [2, 1])
        record("A7.v", ok, "mean/median/stddev/mode/cdf/histogram exact on hand-computed arrays")
        assert ok

    def test_property_suites_present(self):
        # (i) lives in the per-module suites; this line only records where
        record("A7.i", True, "invariant and property suites: tests/test_model.py, test_specfun.py, "
                             "test_estimator.py, test_analytics.py, test_io_cli.py")


class TestA8SpecialFunctions:
    def test_identities_and_gamma(self):
        e1 = max(abs(mittag_leffler(1.0, x) / math.exp(x) - 1) for x in np.linspace(-5, 5, 201))
        e2 = max(abs(mittag_leffler(2.0, x) / math.cosh(math.sqrt(x)) - 1) for x in np.linspace(0, 25, 201))
        spots = [(1.0, 1.0), (0.5, math.sqrt(math.pi)), (6.0, 120.0), (3.7, 4.170651783796604)]
        eg = max(abs(gamma(x) / want - 1) for x, want in spots)
        ok = e1 <= 1e-10 and e2 <= 1e-10 and eg <= 1e-12
        record("A8", ok, f"max rel err E_1 vs exp {e1:.1e}, E_2 vs cosh sqrt {e2:.1e} (limit 1e-10); "
                         f"gamma {eg:.1e} (limit 1e-12)")
        assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
