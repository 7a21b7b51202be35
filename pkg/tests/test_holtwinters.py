import numpy as np
import pytest
from hypothesis import given, strategies as st

from rollcast import holtwinters as hw, serialize
from rollcast.holtwinters import HwParams, HwState

unit = st.floats(0, 1)


class TestInitialize:
    def test_constant(self):
        s = hw.initialize(np.full(12, 4.5), 4)
        assert s.level == 4.5 and s.trend == 0 and np.all(s.seasonals == 0)

    def test_pure_season(self):
        s = hw.initialize(np.tile([0.0, 1.0, 0.0, -1.0], 3), 4)
        assert s.trend == 0
        np.testing.assert_allclose(s.seasonals, [0, 1, 0, -1], atol=1e-15)

    def test_linear(self):
        s = hw.initialize(np.arange(8.0), 2)
        assert s.trend == pytest.approx(1.0)
        np.testing.assert_allclose(s.seasonals, 0.0, atol=1e-12)
        # anchored at the last value of the first season
        assert s.level == pytest.approx(1.0) and s.t == 2

    def test_too_short(self):
        with pytest.raises(ValueError):
            hw.initialize(np.arange(7.0), 4)


class TestSmoothStep:
    def test_hand_trace(self):
        state = HwState(10.0, 1.0, [2.0, 0.0, 0.0])
        nxt = hw.smooth_step(state, 14.0, HwParams(0.5, 0.5, 0.5, 3))
        assert nxt.level == pytest.approx(11.5, abs=1e-9)
        assert nxt.trend == pytest.approx(1.25, abs=1e-9)
        assert nxt.seasonals[-1] == pytest.approx(2.5, abs=1e-9)
        assert nxt.t == 1

    def test_no_learning(self):
        state = HwState(3.0, 0.5, [1.0, -2.0, 1.0], t=7)
        params = HwParams(0.0, 0.0, 0.0, 3)
        s = state
        for y in (100.0, -50.0, 7.0):
            s = hw.smooth_step(s, y, params)
            assert s.trend == 0.5
        assert s.t == 10
        # a full cycle of rotations returns the ring to its start
        assert np.array_equal(s.seasonals, state.seasonals)
        assert s.level == 3.0 + 3 * 0.5

    def test_full_tracking(self):
        s = hw.smooth_step(HwState(1.0, 2.0, np.zeros(4)), 42.0, HwParams(1.0, 0.0, 0.0, 4))
        assert s.level == 42.0

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            hw.smooth_step(HwState(1.0, 0.0, np.zeros(2)), np.nan, HwParams(0.5, 0.5, 0.5, 2))

    @given(unit, unit, unit, st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=30))
    def test_compiled_run_matches_steps(self, a, b, g, ys):
        params = HwParams(a, b, g, 3)
        start = HwState(5.0, 0.2, [1.0, -0.5, -0.5])
        s = start
        for y in ys:
            s = hw.smooth_step(s, y, params)
        fast, _ = hw.run(np.array(ys), params, start)
        assert fast.level == pytest.approx(s.level, abs=1e-9)
        assert fast.trend == pytest.approx(s.trend, abs=1e-9)
        np.testing.assert_allclose(fast.seasonals, s.seasonals, atol=1e-9)


class TestForecast:
    def test_flat(self):
        assert hw.forecast(HwState(5.0, 0.0, np.zeros(3)), 4).tolist() == [5.0] * 4

    def test_trend(self):
        assert hw.forecast(HwState(0.0, 1.0, np.zeros(2)), 3).tolist() == [1.0, 2.0, 3.0]

    def test_seasonal_indexing(self):
        # ring s_{t-3}, s_{t-2}, s_{t-1}, s_t; h=1 reuses s_{t-3}, h=4 reuses s_t
        state = HwState(10.0, 0.0, [0.0, 1.0, 0.0, -1.0])
        assert hw.forecast(state, 9).tolist() == [10, 11, 10, 9, 10, 11, 10, 9, 10]

    def test_horizon_must_be_positive(self):
        with pytest.raises(ValueError):
            hw.forecast(HwState(1.0, 0.0, np.zeros(2)), 0)

    @given(st.floats(-100, 100), st.floats(-10, 10),
           st.lists(st.floats(-10, 10), min_size=2, max_size=6), st.floats(0.01, 100))
    def test_linear_in_state(self, level, trend, seas, a):
        base = hw.forecast(HwState(level, trend, seas), 10)
        scaled = hw.forecast(HwState(a * level, a * trend, np.array(seas) * a), 10)
        np.testing.assert_allclose(scaled, a * base, rtol=1e-12, atol=1e-9)


class TestReductions:
    def test_holt_linear(self):
        y = np.random.default_rng(0).standard_normal(40).cumsum()
        a, b = 0.4, 0.2
        s = HwState(y[0], 0.3, np.zeros(5))
        level, trend = y[0], 0.3
        for v in y:
            s = hw.smooth_step(s, v, HwParams(a, b, 0.0, 5))
            new_level = a * v + (1 - a) * (level + trend)
            trend = b * (new_level - level) + (1 - b) * trend
            level = new_level
            assert (s.level, s.trend) == pytest.approx((level, trend), abs=1e-12)
            assert np.all(s.seasonals == 0)

    def test_simple_exponential_smoothing(self):
        y = np.random.default_rng(1).standard_normal(40)
        a = 0.3
        s = HwState(0.0, 0.0, np.zeros(3))
        level = 0.0
        for v in y:
            s = hw.smooth_step(s, v, HwParams(a, 0.0, 0.0, 3))
            level = a * v + (1 - a) * level
            assert s.level == pytest.approx(level, abs=1e-12) and s.trend == 0


class TestFit:
    def test_deterministic_series(self):
        m = 6
        t = np.arange(120.0)
        pattern = np.array([0.0, 2.0, 3.0, 1.0, -2.0, -4.0])
        y = 10 + t + np.tile(pattern, 20)
        fitted = hw.fit(y[:96], m)
        preds = hw.one_step_predictions(y[:96], fitted.params)
        assert np.mean((preds[m:] - y[2 * m:96]) ** 2) < 1e-3
        np.testing.assert_allclose(hw.forecast(fitted.state, 24), y[96:], atol=1e-3)

    def test_white_noise(self):
        # alpha goes to ~0 and the forecast level settles on the sample mean.
        # Individual forecasts keep some seasonal noise: gamma > 0 is needed to
        # wash out a start state estimated from a single season.
        gaps, alphas = [], []
        for seed in range(20):
            y = np.random.default_rng(seed).standard_normal(2000)
            fitted = hw.fit(y, 24)
            alphas.append(fitted.params.alpha)
            gaps.append(abs(hw.forecast(fitted.state, 24).mean() - y.mean()))
        assert max(alphas) < 0.05
        assert np.median(gaps) < 0.2

    def test_constant(self):
        fitted = hw.fit(np.full(40, 3.0), 4)
        assert fitted.sse == 0.0

    def test_sse_is_in_sample_one_step(self):
        y = np.random.default_rng(3).standard_normal(80) + np.tile([1.0, -1.0, 0.0, 0.0], 20)
        fitted = hw.fit(y, 4)
        preds = hw.one_step_predictions(y, fitted.params)
        assert fitted.sse == pytest.approx(np.sum((y[4:] - preds) ** 2), rel=1e-12)

    def test_grid_is_beaten_or_matched(self):
        y = np.random.default_rng(4).standard_normal(80).cumsum()
        fitted = hw.fit(y, 4)
        for a in (0.0, 0.5, 1.0):
            for g in (0.0, 0.5, 1.0):
                _, sse = hw.run(y, HwParams(a, 0.1, g, 4))
                assert fitted.sse <= sse + 1e-9

    def test_too_short(self):
        with pytest.raises(ValueError):
            hw.fit(np.arange(17.0), 4)

    def test_warm_start(self):
        y = np.random.default_rng(5).standard_normal(100) + np.tile([2.0, 0.0, -2.0, 0.0], 25)
        cold = hw.fit(y, 4)
        warm = hw.fit(y, 4, start=cold.params)
        assert warm.sse <= cold.sse + 1e-9

    def test_serialization(self):
        fitted = hw.fit(np.random.default_rng(6).standard_normal(60), 4)
        back = serialize.loads(serialize.dumps(fitted))
        assert back.params == fitted.params and back.sse == fitted.sse
        assert np.array_equal(back.state.seasonals, fitted.state.seasonals)
        assert '"holt_winters_additive"' in serialize.dumps(fitted)


def test_params_validated():
    with pytest.raises(ValueError):
        HwParams(1.1, 0, 0, 4)
    with pytest.raises(ValueError):
        HwParams(0.5, 0.5, 0.5, 1)
    with pytest.raises(ValueError):
        HwState(np.inf, 0.0, [0.0, 0.0])
