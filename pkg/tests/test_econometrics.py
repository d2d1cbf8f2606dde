import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cumbreak import CollinearityError, CumbreakError, InsufficientDataError, RankDeficiencyError, Series, cumulative_sum
from cumbreak.econometrics import (
    TrendSpec,
    adf_test,
    default_bandwidth,
    dfgls_test,
    johansen_trace,
    ols,
    pp_test,
    residual_cointegration_test,
    unit_root_battery,
)
from cumbreak.econometrics import tables

import oracles


def walk(seed=2024, n=200):
    return np.cumsum(np.random.default_rng(seed).standard_normal(n))


def johansen_data():
    rng = np.random.default_rng(7)
    w = np.cumsum(rng.standard_normal(120))
    a = w + rng.standard_normal(120)
    b = 0.5 * w + rng.standard_normal(120)
    return Series.annual(1900, a), Series.annual(1900, b)


# statsmodels 0.14.6: adfuller(walk(), maxlag=2, autolag=None, regression=...)
SM_ADF = {"constant": -1.6054629846669217, "constant_and_trend": -2.08616588147113}
# oracles.pp_stats(walk(), 4, "c")
PP_FROZEN = {"z_rho": -6.979327987306368, "z_t": -1.5968398748572696}
# statsmodels coint_johansen(det_order=-1 / 0, k_ar_diff=2); constant-and-trend from oracles.johansen_trace
JOHANSEN_FROZEN = {
    "none": (36.90974407120998, 0.6807908586904462),
    "constant": (44.5714867067129, 5.815758526001022),
    "constant_and_trend": (43.3881672406724, 4.669126443169005),
}


class TestOLS:
    def test_exact(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((30, 3))
        beta = np.array([1.5, -2.0, 0.25])
        res = ols(X @ beta, X)
        np.testing.assert_allclose(res.params, beta, atol=1e-12)
        np.testing.assert_allclose(res.resid, 0.0, atol=1e-12)

    def test_mean_only(self):
        res = ols([1.0, 2.0, 3.0], np.ones(3))
        assert res.params[0] == pytest.approx(2.0, abs=1e-15)
        np.testing.assert_allclose(res.resid, [-1.0, 0.0, 1.0], atol=1e-15)

    def test_duplicated_column_named(self):
        X = np.column_stack([np.arange(10.0), np.ones(10), np.arange(10.0)])
        with pytest.raises(RankDeficiencyError) as exc:
            ols(np.arange(10.0) ** 2, X, ["a", "const", "b"])
        assert "a" in str(exc.value) and "b" in str(exc.value)

    def test_zero_column_named(self):
        with pytest.raises(RankDeficiencyError, match="z"):
            ols(np.arange(5.0), np.column_stack([np.ones(5), np.zeros(5)]), ["c", "z"])

    def test_shape_errors(self):
        with pytest.raises(ValueError):
            ols(np.ones(3), np.ones((4, 1)))
        with pytest.raises(ValueError):
            ols(np.ones(2), np.ones((2, 2)))

    def test_matches_oracle(self):
        rng = np.random.default_rng(1)
        X = np.column_stack([np.ones(50), rng.standard_normal((50, 2))])
        y = X @ [1.0, 2.0, 3.0] + rng.standard_normal(50)
        res = ols(y, X)
        beta, se, _ = oracles.naive_ols(y, X)
        np.testing.assert_allclose(res.params, beta, rtol=1e-10)
        np.testing.assert_allclose(res.bse, se, rtol=1e-10)


class TestADF:
    @pytest.mark.parametrize("trend,code", [("none", "n"), ("constant", "c"), ("constant_and_trend", "ct")])
    @pytest.mark.parametrize("lags", [0, 2, 4])
    def test_matches_oracle(self, trend, code, lags):
        y = walk()
        assert adf_test(y, lags, trend).statistic == pytest.approx(oracles.adf_stat(y, lags, code), abs=1e-8)

    @pytest.mark.parametrize("trend", ["constant", "constant_and_trend"])
    def test_frozen_reference(self, trend):
        assert adf_test(walk(), 2, trend).statistic == pytest.approx(SM_ADF[trend], abs=1e-8)

    def test_statsmodels_live(self):
        stattools = pytest.importorskip("statsmodels.tsa.stattools")
        y = walk(99, 150)
        for trend, code in (("constant", "c"), ("constant_and_trend", "ct"), ("none", "n")):
            ref = stattools.adfuller(y, maxlag=3, autolag=None, regression=code)[0]
            assert adf_test(y, 3, trend).statistic == pytest.approx(ref, abs=1e-8)

    def test_geometric_decay_degenerate(self):
        rep = adf_test(0.5 ** np.arange(30.0), 1, "constant")
        assert rep.degenerate and rep.statistic is None and rep.reject_at is None

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            adf_test(np.arange(11.0), 2)

    def test_critical_values_and_verdict(self):
        rep = adf_test(walk(), 2)
        assert rep.critical_values["t"]["5%"] == pytest.approx(tables.tau_critical_values("constant", rep.nobs)["5%"])
        assert not rep.rejects("5%")
        stationary = adf_test(np.random.default_rng(3).standard_normal(200), 1)
        assert stationary.reject_at == "1%"

    @settings(max_examples=30)
    @given(st.integers(0, 10_000), st.floats(0.01, 100), st.floats(-100, 100))
    def test_scale_and_shift_invariance(self, seed, c, shift):
        y = walk(seed, 80)
        base = adf_test(y, 2).statistic
        assert adf_test(c * y, 2).statistic == pytest.approx(base, abs=1e-10)
        assert adf_test(y + shift, 2).statistic == pytest.approx(base, abs=1e-10)


class TestPP:
    def test_default_bandwidth(self):
        assert default_bandwidth(199) == 4
        assert default_bandwidth(47) == 3
        assert default_bandwidth(100) == 4

    @pytest.mark.parametrize("trend,code", [("none", "n"), ("constant", "c"), ("constant_and_trend", "ct")])
    @pytest.mark.parametrize("q", [0, 3, 8])
    def test_matches_oracle(self, trend, code, q):
        y = walk()
        rep = pp_test(y, trend, q)
        z_rho, z_t = oracles.pp_stats(y, q, code)
        assert rep.statistics["z_rho"] == pytest.approx(z_rho, abs=1e-8)
        assert rep.statistics["z_t"] == pytest.approx(z_t, abs=1e-8)

    def test_frozen(self):
        rep = pp_test(walk(), "constant")
        assert rep.lag_or_bandwidth == 4
        assert rep.statistics["z_rho"] == pytest.approx(PP_FROZEN["z_rho"], abs=1e-8)
        assert rep.statistics["z_t"] == pytest.approx(PP_FROZEN["z_t"], abs=1e-8)

    def test_zero_bandwidth_is_plain_df(self):
        y = walk()
        assert pp_test(y, "constant", 0).statistics["z_t"] == pytest.approx(adf_test(y, 0).statistic, abs=1e-10)

    def test_z_rho_critical_values(self):
        rep = pp_test(walk(), "constant")
        assert set(rep.critical_values) == {"z_t", "z_rho"}
        assert tables.z_rho_critical_values("constant", 100)["5%"] == pytest.approx(-13.7)
        assert tables.z_rho_critical_values("constant", 10_000_000)["1%"] == pytest.approx(-20.7, abs=1e-3)
        assert tables.z_rho_critical_values("constant", 10)["5%"] == pytest.approx(-12.5)

    def test_residual_zero_degenerate(self):
        rep = pp_test(np.zeros(40))
        assert rep.degenerate and rep.statistic is None

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            pp_test(np.arange(14.0))
        with pytest.raises(ValueError):
            pp_test(walk(), bandwidth=-1)

    @settings(max_examples=30)
    @given(st.integers(0, 10_000), st.floats(0.01, 100), st.floats(-100, 100))
    def test_scale_and_shift_invariance(self, seed, c, shift):
        y = walk(seed, 80)
        base = pp_test(y).statistics
        for other in (pp_test(c * y).statistics, pp_test(y + shift).statistics):
            assert other["z_t"] == pytest.approx(base["z_t"], abs=1e-10)
            assert other["z_rho"] == pytest.approx(base["z_rho"], abs=1e-9 * max(1, abs(base["z_rho"])))


class TestDFGLS:
    def test_requires_deterministic_terms(self):
        with pytest.raises(ValueError):
            dfgls_test(walk(), 1, "none")

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            dfgls_test(np.arange(16.0), 2)

    def test_power_ar1(self):
        rng = np.random.default_rng(31)
        e = rng.standard_normal(300)
        y = np.zeros(300)
        for t in range(1, 300):
            y[t] = 0.5 * y[t - 1] + e[t]
        assert dfgls_test(y, 1).reject_at == "1%"

    def test_critical_value_surface(self):
        cv = tables.dfgls_critical_values("constant", 10**9)
        assert cv["5%"] == pytest.approx(-1.94, abs=0.01)
        cvt = tables.dfgls_critical_values("constant_and_trend", 10**9)
        assert cvt["5%"] == pytest.approx(-2.85, abs=0.02)

    @settings(max_examples=30)
    @given(st.integers(0, 10_000), st.floats(0.01, 100))
    def test_scale_invariance(self, seed, c):
        y = walk(seed, 80)
        for trend in ("constant", "constant_and_trend"):
            assert dfgls_test(c * y, 2, trend).statistic == pytest.approx(dfgls_test(y, 2, trend).statistic, abs=1e-10)


class TestResidualAndBattery:
    def test_zero_residual_degenerate(self):
        rep = residual_cointegration_test(np.zeros(30))
        assert rep.degenerate and rep.test_name == "residual-ADF"

    def test_methods(self):
        e = np.random.default_rng(5).standard_normal(60)
        assert residual_cointegration_test(e, 1, "pp").test_name == "residual-PP"
        assert residual_cointegration_test(e, 1, "dfgls").test_name == "residual-DF-GLS"
        with pytest.raises(ValueError):
            residual_cointegration_test(e, 1, "kpss")

    def test_battery_keys(self):
        out = unit_root_battery(walk(), 1, "none")
        assert set(out) == {"ADF", "DF-GLS", "PP"}
        assert out["DF-GLS"].trend is TrendSpec.CONSTANT

    def test_difference_rejects_level_does_not(self):
        hits = 0
        for seed in range(200):
            y = walk(seed, 100)
            hits += (not adf_test(y, 1).rejects("5%")) and adf_test(np.diff(y), 1).rejects("5%")
        assert hits / 200 >= 0.95

    def test_power_ar1_adf(self):
        rng = np.random.default_rng(41)
        hits = 0
        for _ in range(200):
            e = rng.standard_normal(200)
            y = np.zeros(200)
            for t in range(1, 200):
                y[t] = 0.5 * y[t - 1] + e[t]
            hits += adf_test(y, 2).rejects("5%")
        assert hits / 200 >= 0.99

    def test_trend_aliases(self):
        assert TrendSpec.parse("ct") is TrendSpec.CONSTANT_AND_TREND
        assert TrendSpec.parse("nc") is TrendSpec.NONE
        with pytest.raises(ValueError):
            TrendSpec.parse("quadratic")


class TestJohansen:
    @pytest.mark.parametrize("trend", ["none", "constant", "constant_and_trend"])
    def test_frozen(self, trend):
        rep = johansen_trace(johansen_data(), 2, trend)
        np.testing.assert_allclose(rep.trace_statistics, JOHANSEN_FROZEN[trend], rtol=1e-9)

    @pytest.mark.parametrize("trend,det", [("none", "n"), ("constant", "c"), ("constant_and_trend", "ct")])
    @pytest.mark.parametrize("maxlag", [0, 1, 3])
    def test_matches_oracle(self, trend, det, maxlag):
        a, b = johansen_data()
        rep = johansen_trace([a, b], maxlag, trend)
        ref = oracles.johansen_trace(np.column_stack([a.values, b.values]), maxlag, det)
        np.testing.assert_allclose(rep.trace_statistics, ref, rtol=1e-8)

    def test_statsmodels_live(self):
        vecm = pytest.importorskip("statsmodels.tsa.vector_ar.vecm")
        a, b = johansen_data()
        Y = np.column_stack([a.values, b.values])
        for trend, det in (("none", -1), ("constant", 0)):
            ref = vecm.coint_johansen(Y, det, 1).lr1
            np.testing.assert_allclose(johansen_trace([a, b], 1, trend).trace_statistics, ref, rtol=1e-8)

    def test_rank_selection(self):
        rep = johansen_trace(johansen_data(), 2, "none")
        assert rep.selected_rank == 1
        assert rep.critical_values[0]["5%"] == pytest.approx(12.3212)
        assert rep.critical_values[1]["5%"] == pytest.approx(4.1296)

    def test_duplicated_series(self):
        a, _ = johansen_data()
        with pytest.raises(CollinearityError):
            johansen_trace([a, a])

    def test_cumulative_refused(self):
        a, b = johansen_data()
        with pytest.raises(CumbreakError, match="cumulative"):
            johansen_trace([cumulative_sum(a), b])

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            johansen_trace([Series.annual(2000, walk(1, 15)), Series.annual(2000, walk(2, 15))])

    def test_series_count(self):
        a, b = johansen_data()
        with pytest.raises(ValueError):
            johansen_trace([a])

    def test_three_series(self):
        a, b = johansen_data()
        c = Series.annual(1900, walk(3, 120))
        rep = johansen_trace([a, b, c], 1, "constant")
        assert len(rep.trace_statistics) == 3 and 0 <= rep.selected_rank <= 3

    @settings(max_examples=30)
    @given(st.integers(0, 10_000), st.integers(0, 3), st.sampled_from(list(TrendSpec)))
    def test_trace_monotone(self, seed, maxlag, trend):
        rng = np.random.default_rng(seed)
        Y = np.cumsum(rng.standard_normal((80, 2)), axis=0)
        rep = johansen_trace([Series.annual(1900, Y[:, 0]), Series.annual(1900, Y[:, 1])], maxlag, trend)
        t = rep.trace_statistics
        assert all(t[i] >= t[i + 1] - 1e-12 for i in range(len(t) - 1))
        assert all(v >= -1e-12 for v in t)


def test_table_spot_values():
    assert tables.tau_critical_values("constant", 10**12)["5%"] == pytest.approx(-2.86154, abs=1e-9)
    assert tables.johansen_trace_critical_values("constant", 2)["5%"] == pytest.approx(15.4943)
    with pytest.raises(ValueError):
        tables.johansen_trace_critical_values("none", 4)
    assert math.isclose(tables.tau_critical_values("constant", 45)["1%"], -3.585, abs_tol=0.005)
