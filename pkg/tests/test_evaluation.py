import numpy as np
import pytest
from hypothesis import given, strategies as st

from rollcast import sarimax
from rollcast.evaluation import PredictorSpec, compare, filter_only, mape, rolling_prediction, standard_prediction
from rollcast.sarimax import ModelOrder, SarimaxParams, SeasonalOrder, simulate
from rollcast.series import SplitSpec, TimeSeries, split

RW = PredictorSpec("arima", order=ModelOrder(0, 1, 0), name="rw")
AR1 = PredictorSpec("arima", order=ModelOrder(1, 0, 0), name="ar1")


def shifted_walk(seed, n_train=300, n_test=60, shift=0.5):
    rng = np.random.default_rng(seed)
    y = 100.0 + np.cumsum(rng.normal(0, 0.5, n_train + n_test))
    y[n_train + n_test // 2:] *= 1 + shift
    return y[:n_train], y[n_train:]


class TestMape:
    def test_exact(self):
        assert mape([3.0, 7.0], [3.0, 7.0]) == 0.0
        assert mape([1.1, 1.8], [1.0, 2.0]) == pytest.approx(10.0, abs=1e-12)
        assert mape([5.0], [4.0]) == 25.0

    @given(st.lists(st.floats(0.1, 1e3), min_size=1, max_size=20),
           st.floats(-0.9, 0.9), st.floats(1e-3, 1e3))
    def test_scale_invariant(self, obs, rel, a):
        o = np.array(obs)
        p = o * (1 + rel)
        assert mape(a * p, a * o) == pytest.approx(mape(p, o), rel=1e-9)

    def test_zero_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            mape([1.0, 2.0], [1.0, 0.0])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            mape([1.0], [1.0, 2.0])


class TestPrediction:
    def test_random_walk_standard_is_flat(self):
        train, test = shifted_walk(0)
        trace = standard_prediction(RW, train, test)
        np.testing.assert_allclose(trace.predictions, train[-1], rtol=0, atol=1e-9)

    def test_random_walk_rolling_is_previous_value(self):
        train, test = shifted_walk(1)
        trace = rolling_prediction(RW, train, test)
        np.testing.assert_allclose(trace.predictions, np.r_[train[-1], test[:-1]], atol=1e-9)

    @pytest.mark.parametrize("spec", [AR1, PredictorSpec("holt_winters", hw_period=12, name="hw")])
    def test_single_step_test_set(self, spec):
        y = 50 + simulate(400, ModelOrder(1, 0, 0), params=SarimaxParams(phi=[0.6]),
                          rng=np.random.default_rng(2))
        std = standard_prediction(spec, y[:-1], y[-1:])
        rol = rolling_prediction(spec, y[:-1], y[-1:])
        assert rol.predictions[0] == std.predictions[0]

    def test_first_points_agree(self):
        train, test = shifted_walk(3)
        spec = PredictorSpec("arima", order=ModelOrder(1, 1, 1))
        assert rolling_prediction(spec, train, test).predictions[0] == pytest.approx(
            standard_prediction(spec, train, test).predictions[0], abs=1e-9)

    @pytest.mark.parametrize("spec", [AR1, PredictorSpec("holt_winters", hw_period=12, name="hw")])
    def test_causal(self, spec):
        rng = np.random.default_rng(4)
        y = 50 + simulate(330, ModelOrder(1, 0, 0), params=SarimaxParams(phi=[0.6]), rng=rng)
        train, test = y[:300], y[300:]
        base = rolling_prediction(spec, train, test).predictions
        k = 17
        mutated = test.copy()
        mutated[k:] += rng.normal(0, 20, len(test) - k)
        other = rolling_prediction(spec, train, mutated).predictions
        assert base[: k + 1].tobytes() == other[: k + 1].tobytes()

    def test_filter_only_matches_direct_recursion(self):
        y = 20 + simulate(260, ModelOrder(1, 0, 0), params=SarimaxParams(phi=[0.7]),
                          rng=np.random.default_rng(5))
        train, test = y[:200], y[200:]
        std = standard_prediction(AR1, train, test)
        model = sarimax.fit(train, ModelOrder(1, 0, 0))
        mu, phi = model.params.beta[0], model.params.phi[0]
        expected = mu + phi * (np.r_[train[-1], test[:-1]] - mu)
        got = rolling_prediction(filter_only(AR1), train, test).predictions
        np.testing.assert_allclose(got, expected, rtol=0, atol=1e-8)
        assert std.predictions[0] == pytest.approx(got[0], abs=1e-9)

    def test_refit_changes_only_later_points(self):
        train, test = shifted_walk(6, n_test=20)
        spec = PredictorSpec("arima", order=ModelOrder(1, 1, 0), refit_interval=5)
        a = rolling_prediction(spec, train, test).predictions
        b = rolling_prediction(filter_only(spec), train, test).predictions
        np.testing.assert_array_equal(a[:5], b[:5])
        assert not np.array_equal(a[5:], b[5:])

    def test_sarimax_uses_calendar_features(self):
        n = 24 * 20
        y = np.tile(10 + 5 * np.sin(np.arange(24) / 24 * 2 * np.pi), 20)
        y += np.random.default_rng(7).normal(0, 0.3, n)
        ts = TimeSeries.from_values(y, interval_seconds=3600)
        train, test = split(ts, SplitSpec(n - 24, 24))
        spec = PredictorSpec("sarimax", order=ModelOrder(1, 0, 0), exog=True, refit_interval=None)
        trace = rolling_prediction(spec, train, test)
        assert mape(trace.predictions, test.values) < 10


class TestCompare:
    def test_rows_and_csv(self):
        train, test = shifted_walk(8, n_test=12)
        report = compare([RW, AR1, PredictorSpec("holt_winters", hw_period=12, name="hw")], train, test)
        assert [r.model for r in report.rows] == ["rw", "ar1", "hw"]
        lines = report.to_csv().splitlines()
        assert lines[0] == "model,mape_standard_pct,mape_rolling_pct" and len(lines) == 4
        assert not report.failed

    def test_failure_is_per_row(self):
        train, test = shifted_walk(9, n_test=12)
        report = compare([RW, PredictorSpec("holt_winters", hw_period=200, name="hw")], train, test)
        assert report.rows[0].error is None and np.isfinite(report.rows[0].mape_rolling)
        assert report.rows[1].error and np.isnan(report.rows[1].mape_standard)
        assert [r.model for r in report.failed] == ["hw"]

    def test_rolling_wins_after_level_shift(self):
        wins = 0
        for seed in range(10):
            train, test = shifted_walk(100 + seed)
            row = compare([RW], train, test).rows[0]
            wins += row.mape_rolling < row.mape_standard
        assert wins >= 9

    def test_unknown_model(self):
        with pytest.raises(ValueError):
            PredictorSpec("prophet")
        with pytest.raises(ValueError):
            PredictorSpec("arima", seasonal=SeasonalOrder(1, 0, 0, 12))
        with pytest.raises(ValueError):
            compare([], [1.0], [1.0])
