import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from statsmodels.tsa.stattools import adfuller

from rollcast.diagnostics import (
    acf, adf_test, decompose_additive, durbin_levinson, mackinnon_crit, mackinnon_p, pacf,
    strongest_period, yule_walker,
)


def reference_adf(x, max_lag):
    # statsmodels rounds the default max lag up; pass ours explicitly so both
    # search the same lag range.
    stat, p, lags, nobs, crit, _ = adfuller(x, maxlag=max_lag, regression="c", autolag="AIC")
    return stat, p, lags, nobs, crit


@pytest.fixture(scope="module")
def walk():
    return np.cumsum(np.random.default_rng(7).standard_normal(1000))


class TestAdf:
    @pytest.mark.parametrize("kind", ["noise", "walk", "diff"])
    def test_matches_reference(self, kind, walk):
        x = {"noise": np.random.default_rng(3).standard_normal(1000),
             "walk": walk, "diff": np.diff(walk)}[kind]
        ours = adf_test(x)
        max_lag = int(np.floor(12 * (len(x) / 100) ** 0.25))
        stat, p, lags, nobs, crit = reference_adf(x, max_lag)
        assert ours.used_lags == lags and ours.n_obs == nobs
        assert ours.statistic == pytest.approx(stat, rel=1e-9)
        assert ours.p_value == pytest.approx(p, rel=1e-6, abs=1e-12)
        for level in ("1%", "5%", "10%"):
            assert ours.critical_values[level] == pytest.approx(crit[level], rel=1e-9)

    def test_qualitative(self, walk):
        assert adf_test(np.random.default_rng(3).standard_normal(1000)).p_value < 0.01
        assert adf_test(walk).p_value > 0.10
        assert adf_test(np.diff(walk)).p_value < 0.01

    def test_fixed_lag(self, walk):
        ours = adf_test(walk, max_lag=4, autolag=False)
        stat, *_ = adfuller(walk, maxlag=4, regression="c", autolag=None)
        assert ours.used_lags == 4 and ours.statistic == pytest.approx(stat, rel=1e-10)

    def test_constant_rejected(self):
        with pytest.raises(ValueError, match="constant"):
            adf_test(np.full(100, 3.0))

    def test_too_short(self):
        with pytest.raises(ValueError):
            adf_test(np.arange(12.0) ** 2, max_lag=5)

    def test_critical_values_order(self):
        for n in (20, 100, 8000):
            c = mackinnon_crit(n)
            assert c["1%"] < c["5%"] < c["10%"]
        # asymptotic 1% value at n ~ 8000, as reported for large traffic samples
        assert mackinnon_crit(8000)["1%"] == pytest.approx(-3.431, abs=1e-3)

    @given(st.floats(-60, 10, allow_nan=False))
    def test_p_value_in_unit_interval(self, stat):
        assert 0.0 <= mackinnon_p(stat) <= 1.0

    @given(st.floats(-1e3, 1e3))
    def test_invariant_to_shift(self, c):
        x = np.cumsum(np.random.default_rng(11).standard_normal(300))
        a, b = adf_test(x), adf_test(x + c)
        assert a.used_lags == b.used_lags
        assert a.statistic == pytest.approx(b.statistic, rel=1e-6, abs=1e-8)


class TestAcf:
    def test_lag_zero_and_band(self):
        x = np.random.default_rng(5).standard_normal(2000)
        r = acf(x, 40)
        assert r[0] == 1.0 and r.confidence_band == pytest.approx(2 / np.sqrt(2000))

    @pytest.mark.parametrize("fn", [acf, pacf])
    def test_white_noise_band_coverage(self, fn):
        # single draws scatter around 95%; pool 300 series
        hits = [np.abs(fn(np.random.default_rng(1000 + s).standard_normal(2000), 40).values[1:])
                < 2 / np.sqrt(2000) for s in range(300)]
        assert np.mean(hits) >= 0.95

    def test_sinusoid(self):
        t = np.arange(400)
        assert acf(np.sin(2 * np.pi * t / 4), 8)[4] > 0.9

    def test_matches_reference(self):
        from statsmodels.tsa.stattools import acf as sm_acf
        x = np.random.default_rng(9).standard_normal(500).cumsum()
        np.testing.assert_allclose(acf(x, 30).values, sm_acf(x, nlags=30, fft=False), atol=1e-12)

    def test_errors(self):
        with pytest.raises(ValueError):
            acf(np.ones(50), 5)
        with pytest.raises(ValueError):
            acf(np.arange(5.0), 5)

    @given(arrays(np.float64, st.integers(10, 80), elements=st.floats(-1e3, 1e3)),
           st.floats(0.01, 100), st.floats(-1e3, 1e3))
    def test_bounded_and_affine_invariant(self, x, a, b):
        if np.ptp(x) < 1e-3:
            return
        r = acf(x, 5).values
        assert np.all(np.abs(r) <= 1 + 1e-10)
        np.testing.assert_allclose(acf(a * x + b, 5).values, r, atol=1e-8)


class TestPacf:
    def test_ar1(self):
        rng = np.random.default_rng(21)
        e = rng.standard_normal(5100)
        x = np.empty_like(e)
        x[0] = e[0]
        for t in range(1, len(e)):
            x[t] = 0.8 * x[t - 1] + e[t]
        x = x[100:]
        p = pacf(x, 20)
        assert p[1] == pytest.approx(0.8, abs=0.05)
        assert np.mean(np.abs(p.values[2:]) < p.confidence_band) >= 0.9

    def test_first_equals_acf(self):
        x = np.random.default_rng(23).standard_normal(200).cumsum()
        assert pacf(x, 10)[1] == acf(x, 10)[1]

    def test_matches_reference(self):
        from statsmodels.tsa.stattools import pacf as sm_pacf
        x = np.random.default_rng(24).standard_normal(400).cumsum()
        np.testing.assert_allclose(pacf(x, 25).values, sm_pacf(x, nlags=25, method="ldb"), atol=1e-10)

    def test_requires_short_lag(self):
        with pytest.raises(ValueError):
            pacf(np.random.default_rng(0).standard_normal(20), 10)

    @given(arrays(np.float64, st.integers(30, 120), elements=st.floats(-100, 100)), st.integers(1, 8))
    def test_durbin_levinson_vs_yule_walker(self, x, k):
        if np.ptp(x) < 1e-2:
            return
        r = acf(x, k).values
        if np.linalg.cond(np.array([[r[abs(i - j)] for j in range(k)] for i in range(k)])) > 1e8:
            return
        assert durbin_levinson(r)[k] == pytest.approx(yule_walker(x, k)[-1], abs=1e-8)


class TestDecompose:
    def test_linear_has_no_season(self):
        d = decompose_additive(np.arange(40.0), 4)
        assert np.max(np.abs(d.seasonal)) < 1e-9

    def test_recovers_pattern(self):
        pattern = np.array([0.0, 1.0, 0.0, -1.0])
        d = decompose_additive(10 + np.tile(pattern, 10), 4)
        np.testing.assert_allclose(d.seasonal[:4], pattern, atol=1e-9)
        np.testing.assert_allclose(d.trend[2:-2], 10.0, atol=1e-12)
        assert np.isnan(d.trend[:2]).all() and np.isnan(d.trend[-2:]).all()

    def test_odd_period_matches_reference(self):
        from statsmodels.tsa.seasonal import seasonal_decompose
        x = np.random.default_rng(4).standard_normal(70) + np.tile([3.0, -1.0, 0.0, 2.0, -4.0], 14)
        for period in (5, 6):
            ours = decompose_additive(x, period)
            ref = seasonal_decompose(x, period=period, model="additive")
            np.testing.assert_allclose(ours.trend, ref.trend, atol=1e-12)
            np.testing.assert_allclose(ours.seasonal, ref.seasonal, atol=1e-12)

    def test_errors(self):
        with pytest.raises(ValueError):
            decompose_additive(np.arange(10.0), 1)
        with pytest.raises(ValueError):
            decompose_additive(np.arange(7.0), 4)

    @given(arrays(np.float64, st.integers(24, 90), elements=st.floats(-1e3, 1e3)), st.integers(2, 12))
    def test_additive_and_periodic(self, x, period):
        d = decompose_additive(x, period)
        ok = ~np.isnan(d.trend)
        np.testing.assert_allclose((d.trend + d.seasonal + d.residual)[ok], x[ok], atol=1e-9)
        np.testing.assert_array_equal(d.seasonal[period:], d.seasonal[:-period])
        assert abs(d.seasonal[:period].sum()) < 1e-9 * max(1.0, np.abs(x).max())

    def test_strongest_period(self):
        t = np.arange(24 * 20)
        x = np.sin(2 * np.pi * t / 24) + 0.1 * np.random.default_rng(0).standard_normal(len(t))
        assert strongest_period(x, 30, min_period=12) == 24
