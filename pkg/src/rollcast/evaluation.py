"""Standard vs. rolling prediction, scored by MAPE.

Standard prediction fits once on the training window and forecasts the whole
test window multi-step ahead. Rolling prediction emits one one-step forecast
per test point, then appends the true observation, re-estimates parameters
every ``refit_interval`` steps and always advances the model state.
"""
from __future__ import annotations

import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import holtwinters as hw
from . import sarimax
from .features import ExogMatrix, extract_features
from .sarimax import ModelOrder, NO_SEASON, SeasonalOrder
from .series import TimeSeries, format_timestamp

log = logging.getLogger(__name__)

MODEL_TYPES = ("arima", "sarima", "sarimax", "holt_winters")


def mape(predicted, observed) -> float:
    """Mean absolute percentage error, in percent."""
    p = np.asarray(predicted, dtype=np.float64)
    o = np.asarray(observed, dtype=np.float64)
    if p.shape != o.shape or p.ndim != 1 or len(o) == 0:
        raise ValueError("predicted and observed must be non-empty vectors of equal length")
    if np.any(o == 0):
        raise ValueError("MAPE is undefined when an observed value is zero")
    return float(np.mean(np.abs((p - o) / o)) * 100.0)


@dataclass(frozen=True)
class PredictorSpec:
    model_type: str
    order: ModelOrder = ModelOrder(1, 1, 1)
    seasonal: SeasonalOrder = NO_SEASON
    exog: bool = False
    mean: bool | None = None
    refit_interval: int | None = 1      # None: never re-estimate, only update state
    hw_period: int | None = None        # defaults to samples per day
    hw_reoptimize: bool = True
    name: str | None = None

    def __post_init__(self):
        if self.model_type not in MODEL_TYPES:
            raise ValueError(f"unknown model type {self.model_type!r}; expected one of {MODEL_TYPES}")
        if self.exog and self.model_type != "sarimax":
            raise ValueError("exogenous features are only supported for sarimax")
        if self.model_type == "arima" and self.seasonal != NO_SEASON:
            raise ValueError("arima takes no seasonal order; use sarima")
        if self.refit_interval is not None and self.refit_interval < 1:
            raise ValueError("refit_interval must be >= 1 (or None for filter-only)")
        if not isinstance(self.order, ModelOrder):
            object.__setattr__(self, "order", ModelOrder(*self.order))
        if not isinstance(self.seasonal, SeasonalOrder):
            object.__setattr__(self, "seasonal", SeasonalOrder(*self.seasonal))

    @property
    def label(self) -> str:
        return self.name or self.model_type


@dataclass(frozen=True, eq=False)
class PredictionTrace:
    model: str
    mode: str
    predictions: np.ndarray
    warnings: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.predictions)

    def to_csv(self, test: TimeSeries) -> str:
        buf = io.StringIO()
        buf.write("timestamp,actual_gbps,predicted_gbps\n")
        for ts, a, p in zip(test.timestamps(), test.values, self.predictions):
            buf.write(f"{format_timestamp(ts)},{a:.9g},{p:.9g}\n")
        return buf.getvalue()


@dataclass(frozen=True, eq=False)
class EvalRow:
    model: str
    mape_standard: float
    mape_rolling: float
    standard: PredictionTrace | None = None
    rolling: PredictionTrace | None = None
    error: str | None = None


@dataclass(frozen=True, eq=False)
class EvalReport:
    rows: tuple[EvalRow, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def failed(self) -> list[EvalRow]:
        return [r for r in self.rows if r.error]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("model,mape_standard_pct,mape_rolling_pct\n")
        for r in self.rows:
            buf.write(f"{r.model},{r.mape_standard:.6f},{r.mape_rolling:.6f}\n")
        return buf.getvalue()


class PredictionError(RuntimeError):
    pass


def _vals(series) -> np.ndarray:
    return np.asarray(getattr(series, "values", series), dtype=np.float64)


def _exog_pair(spec: PredictorSpec, train, test, exog_train, exog_test):
    if not spec.exog:
        return None, None
    if exog_train is None:
        if not isinstance(train, TimeSeries):
            raise ValueError("sarimax with exog needs ExogMatrix inputs or TimeSeries timestamps")
        exog_train = extract_features(train.timestamps())
    if exog_test is None:
        if not isinstance(test, TimeSeries):
            raise ValueError("sarimax with exog needs ExogMatrix inputs or TimeSeries timestamps")
        exog_test = extract_features(test.timestamps())
    return exog_train, exog_test


def _rows(exog) -> np.ndarray | None:
    if exog is None:
        return None
    return np.asarray(exog.rows if isinstance(exog, ExogMatrix) else exog, dtype=np.float64).reshape(len(exog), -1)


def _hw_period(spec: PredictorSpec, train) -> int:
    if spec.hw_period:
        return spec.hw_period
    if isinstance(train, TimeSeries):
        return train.samples_per_day
    raise ValueError("hw_period is required when train is not a TimeSeries")


def _fit_sarimax(spec, y, exog, seed, start=None):
    return sarimax.fit(y, spec.order, spec.seasonal, exog, mean=spec.mean, seed=seed,
                       start_params=start)


def standard_prediction(spec: PredictorSpec, train, test, exog_train=None, exog_test=None,
                        seed: int = 0) -> PredictionTrace:
    y, n_test = _vals(train), len(_vals(test))
    x_tr, x_te = _exog_pair(spec, train, test, exog_train, exog_test)
    try:
        if spec.model_type == "holt_winters":
            fitted = hw.fit(y, _hw_period(spec, train))
            preds = hw.forecast(fitted.state, n_test)
        else:
            model = _fit_sarimax(spec, y, x_tr, seed)
            preds = sarimax.forecast(model, y, n_test, future_exog=x_te, exog=x_tr)
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        raise PredictionError(f"{spec.label}: {exc}") from exc
    return PredictionTrace(spec.label, "standard", np.asarray(preds, dtype=np.float64))


def rolling_prediction(spec: PredictorSpec, train, test, exog_train=None, exog_test=None,
                       seed: int = 0) -> PredictionTrace:
    """One-step-ahead rollout over ``test``; prediction i never sees test[i:]."""
    y_train, y_test = _vals(train), _vals(test)
    x_tr, x_te = _exog_pair(spec, train, test, exog_train, exog_test)
    n = len(y_test)
    preds = np.empty(n)
    warnings: list[str] = []
    interval = spec.refit_interval

    def refit_due(i: int) -> bool:
        return interval is not None and (i + 1) % interval == 0 and i + 1 < n

    if spec.model_type == "holt_winters":
        m = _hw_period(spec, train)
        try:
            fitted = hw.fit(y_train, m)
        except ValueError as exc:
            raise PredictionError(f"{spec.label}: {exc}") from exc
        params, state = fitted.params, fitted.state
        for i in range(n):
            preds[i] = hw.forecast(state, 1)[0]
            if refit_due(i) and spec.hw_reoptimize:
                history = np.concatenate([y_train, y_test[: i + 1]])
                try:
                    refit = hw.fit(history, m, start=params)
                    params, state = refit.params, refit.state
                    continue
                except ValueError as exc:
                    warnings.append(f"step {i}: refit failed ({exc}); keeping previous parameters")
            state = hw.smooth_step(state, y_test[i], params)
        return PredictionTrace(spec.label, "rolling", preds, tuple(warnings))

    xr_tr, xr_te = _rows(x_tr), _rows(x_te)
    try:
        model = _fit_sarimax(spec, y_train, x_tr, seed)
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        raise PredictionError(f"{spec.label}: {exc}") from exc
    online = sarimax.OnlineForecaster(model, y_train, xr_tr)
    for i in range(n):
        row = None if xr_te is None else xr_te[i]
        preds[i] = online.predict(row)
        if refit_due(i):
            history = np.concatenate([y_train, y_test[: i + 1]])
            hx = None if xr_tr is None else np.vstack([xr_tr, xr_te[: i + 1]])
            try:
                new = _fit_sarimax(spec, history, hx, seed, start=model.params)
                if not new.converged:
                    warnings.append(f"step {i}: refit did not converge; using best parameters found")
                model = new
                online = sarimax.OnlineForecaster(model, history, hx)
                continue
            except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
                warnings.append(f"step {i}: refit failed ({exc}); keeping previous parameters")
        online.update(y_test[i], row)
    return PredictionTrace(spec.label, "rolling", preds, tuple(warnings))


def _evaluate_one(args) -> EvalRow:
    spec, train, test, exog_train, exog_test, seed = args
    observed = _vals(test)
    try:
        std = standard_prediction(spec, train, test, exog_train, exog_test, seed)
        rol = rolling_prediction(spec, train, test, exog_train, exog_test, seed)
        return EvalRow(spec.label, mape(std.predictions, observed), mape(rol.predictions, observed), std, rol)
    except (PredictionError, ValueError) as exc:
        log.warning("model %s failed: %s", spec.label, exc)
        return EvalRow(spec.label, float("nan"), float("nan"), error=str(exc))


def compare(models, train, test, exog_train=None, exog_test=None, jobs: int = 1,
            seed: int = 0) -> EvalReport:
    """Both prediction modes for every model; failures are recorded per row."""
    models = list(models)
    if not models:
        raise ValueError("no models to compare")
    tasks = [(spec, train, test, exog_train, exog_test, seed) for spec in models]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_evaluate_one, tasks))
    else:
        rows = [_evaluate_one(t) for t in tasks]
    return EvalReport(tuple(rows))


def filter_only(spec: PredictorSpec) -> PredictorSpec:
    """The same predictor with parameter re-estimation switched off."""
    return replace(spec, refit_interval=None, hw_reoptimize=False)
