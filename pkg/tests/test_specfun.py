import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uas_battery.errors import ArgumentTooLarge, DomainError
from uas_battery.specfun import (
    MAX_TERMS,
    RHO_MAX,
    NussbaumParams,
    gamma,
    mittag_leffler,
    nussbaum,
    verify_nussbaum_property,
)

NP = NussbaumParams(2.5, 1.0)

# 40-digit mpmath series sums, rounded to 17 digits
ML_ORACLE = [
    (2.5, -1.0, 0.70736124364281796),
    (2.5, -(2.0**2.5), -0.44810649058567119),
    (2.5, -(3.0**2.5), -1.9197468285313749),
    (2.5, -(5.0**2.5), 0.16755116992253487),
    (2.5, -10.0, -1.2442332043062487),
    (2.5, -100.0, 5.4029050697200419),
    (3.0, -50.0, -4.1927661768876284),
]


def sign_changes(values):
    s = np.sign(values)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


class TestGamma:
    @pytest.mark.parametrize(
        "x, want",
        [(1.0, 1.0), (6.0, 120.0), (0.5, math.sqrt(math.pi)), (3.7, 4.170651783796604),
         (26.5, 7.8712648783481768e25)],
    )
    def test_spot_values(self, x, want):
        assert gamma(x) == pytest.approx(want, rel=1e-12)

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            gamma(x)

    @settings(max_examples=100)
    @given(st.floats(0.1, 100.0))
    def test_recurrence(self, x):
        assert gamma(x + 1) == pytest.approx(x * gamma(x), rel=1e-12)


class TestMittagLeffler:
    @pytest.mark.parametrize("alpha", [0.3, 1.0, 2.0, 2.5, 3.0, 7.0])
    def test_zero_argument(self, alpha):
        assert mittag_leffler(alpha, 0.0) == 1.0

    def test_e(self):
        assert mittag_leffler(1.0, 1.0) == pytest.approx(math.e, rel=1e-15)

    def test_cosh(self):
        assert mittag_leffler(2.0, 1.0) == pytest.approx(math.cosh(1.0), rel=1e-15)

    @pytest.mark.parametrize("x", np.linspace(-5.0, 5.0, 41))
    def test_exponential_identity(self, x):
        assert mittag_leffler(1.0, x) == pytest.approx(math.exp(x), rel=1e-10)

    @pytest.mark.parametrize("x", np.linspace(0.0, 25.0, 51))
    def test_cosh_identity(self, x):
        assert mittag_leffler(2.0, x) == pytest.approx(math.cosh(math.sqrt(x)), rel=1e-10)

    @pytest.mark.parametrize("alpha, rho, want", ML_ORACLE)
    def test_series_oracle(self, alpha, rho, want):
        assert mittag_leffler(alpha, rho) == pytest.approx(want, rel=1e-9)

    def test_cos_identity_negative(self):
        # E_2(-x^2) = cos x
        for x in (0.5, 2.0, 4.0):
            assert mittag_leffler(2.0, -x * x) == pytest.approx(math.cos(x), abs=1e-10)

    def test_guard(self):
        mittag_leffler(2.5, -RHO_MAX)
        with pytest.raises(ArgumentTooLarge):
            mittag_leffler(2.5, -RHO_MAX * 1.001)

    def test_alpha_domain(self):
        with pytest.raises(DomainError):
            mittag_leffler(0.0, 1.0)

    def test_term_cap_is_finite(self):
        # alpha small and rho near one converges slowly; the cap still returns
        assert MAX_TERMS == 500
        assert math.isfinite(mittag_leffler(0.05, 0.9))


class TestNussbaum:
    @pytest.mark.parametrize("alpha, lam", [(2.5, 1.0), (2.1, 0.3), (3.0, 5.0)])
    def test_origin(self, alpha, lam):
        assert nussbaum(NussbaumParams(alpha, lam), 0.0) == 1.0

    def test_matches_series_oracle(self):
        assert nussbaum(NP, 2.0) == pytest.approx(-0.44810649058567119, rel=1e-9)

    @pytest.mark.parametrize("alpha, lam", [(2.0, 1.0), (3.1, 1.0), (2.5, 0.0), (2.5, -1.0)])
    def test_params_domain(self, alpha, lam):
        with pytest.raises(DomainError):
            NussbaumParams(alpha, lam)

    def test_negative_gain(self):
        with pytest.raises(DomainError):
            nussbaum(NP, -0.1)

    def test_oscillates(self):
        ks = np.linspace(0.0, 10.0, 4001)
        vals = np.array([nussbaum(NP, k) for k in ks])
        assert sign_changes(vals) >= 3
        assert np.max(np.abs(vals)) > np.max(np.abs(vals[ks <= 5.0]))

    def test_sign_changes_non_decreasing(self):
        ks = np.linspace(0.0, 12.0, 3001)
        vals = np.array([nussbaum(NP, k) for k in ks])
        counts = [sign_changes(vals[: j + 1]) for j in range(0, len(ks), 100)]
        assert counts == sorted(counts)

    @pytest.mark.parametrize("k", [0.3, 1.7, 4.2, 8.9])
    def test_continuity(self, k):
        h = 1e-8
        # |N'| on [0, 10] stays well below 100
        assert abs(nussbaum(NP, k + h) - nussbaum(NP, k)) <= 100 * h


class TestNussbaumProperty:
    def test_running_average_oracle(self):
        # mpmath adaptive quadrature of the 30-digit series gives -0.6855815 at k=10
        rep = verify_nussbaum_property(NP, 0.0, 10.0)
        assert rep.running_avg[-1] == pytest.approx(-0.6855815, abs=1e-5)
        # the average only dips to -0.73 on [0, 10]; it passes -1 before k=12
        assert rep.sup_avg > 1.0
        assert -1.0 < rep.inf_avg < -0.7

    def test_unbounded_evidence(self):
        rep = verify_nussbaum_property(NP, 0.0, 14.0, grid=2801)
        assert rep.sup_avg > 3.0
        assert rep.inf_avg < -2.0

    def test_degenerate_interval(self):
        rep = verify_nussbaum_property(NP, 0.0, 1e-9, grid=11)
        assert rep.sup_avg == pytest.approx(1.0, abs=1e-12)
        assert rep.inf_avg == pytest.approx(1.0, abs=1e-12)

    def test_constant_function(self):
        rep = verify_nussbaum_property(NP, 2.0, 7.0, grid=101, func=lambda k: 1.0)
        assert rep.sup_avg == pytest.approx(1.0, rel=1e-14)
        assert rep.inf_avg == pytest.approx(1.0, rel=1e-14)

    def test_linear_function_is_exact(self):
        rep = verify_nussbaum_property(NP, 0.0, 4.0, grid=41, func=lambda k: k)
        assert np.allclose(rep.running_avg, rep.k / 2.0, rtol=1e-14)

    def test_bad_interval(self):
        with pytest.raises(ValueError):
            verify_nussbaum_property(NP, 3.0, 3.0)
