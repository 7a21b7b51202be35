"""Additive Holt-Winters (triple exponential smoothing)."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy import optimize

from .series import TimeSeries


@dataclass(frozen=True)
class HwParams:
    alpha: float
    beta: float
    gamma: float
    m: int

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.m < 2:
            raise ValueError("seasonal period m must be >= 2")


@dataclass(frozen=True, eq=False)
class HwState:
    """Level, trend and the last m seasonal terms (oldest first, s_t last)."""

    level: float
    trend: float
    seasonals: np.ndarray
    t: int = 0

    def __post_init__(self):
        s = np.array(self.seasonals, dtype=np.float64)
        s.setflags(write=False)
        object.__setattr__(self, "seasonals", s)
        if not (math.isfinite(self.level) and math.isfinite(self.trend) and np.all(np.isfinite(s))):
            raise ValueError("Holt-Winters state must be finite")

    @property
    def m(self) -> int:
        return len(self.seasonals)


def _values(series) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return np.asarray(series.values, dtype=np.float64)
    return np.asarray(series, dtype=np.float64)


def initialize(series, m: int) -> HwState:
    """Heuristic start state anchored at the end of the first season.

    The trend is the difference of the first two season means over m. Seasonal
    terms are first-season deviations from that season's trend line, centered
    to sum to zero; the level is the trend line's value at the season's end.
    """
    y = _values(series)
    if m < 2:
        raise ValueError("seasonal period m must be >= 2")
    if len(y) < 2 * m:
        raise ValueError(f"need at least two seasons ({2 * m} values), got {len(y)}")
    mean1 = y[:m].mean()
    trend = (y[m: 2 * m].mean() - mean1) / m
    offsets = np.arange(m) - (m - 1) / 2.0
    seasonals = y[:m] - (mean1 + trend * offsets)
    seasonals -= seasonals.mean()
    return HwState(level=mean1 + trend * (m - 1) / 2.0, trend=trend, seasonals=seasonals, t=m)


def smooth_step(state: HwState, y: float, params: HwParams) -> HwState:
    if not math.isfinite(y):
        raise ValueError("observation must be finite")
    a, b, g = params.alpha, params.beta, params.gamma
    s_old = state.seasonals[0]
    level = a * (y - s_old) + (1 - a) * (state.level + state.trend)
    trend = b * (level - state.level) + (1 - b) * state.trend
    season = g * (y - state.level - state.trend) + (1 - g) * s_old
    ring = np.append(state.seasonals[1:], season)
    return HwState(level, trend, ring, state.t + 1)


def forecast(state: HwState, horizon: int, params: HwParams | None = None) -> np.ndarray:
    """l_t + h b_t + s_{t+h-m(k+1)} with k = floor((h-1)/m), for h = 1..horizon."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    m = state.m
    h = np.arange(1, horizon + 1)
    # s_{t+h-m(k+1)} sits at ring position (h-1) mod m (ring holds s_{t-m+1}..s_t).
    return state.level + h * state.trend + state.seasonals[(h - 1) % m]


@njit(cache=True)
def _run(y, level, trend, seas, alpha, beta, gamma):
    """Smooth y from the given state; returns one-step SSE and the terminal state."""
    m = seas.shape[0]
    ring = seas.copy()
    head = 0
    sse = 0.0
    for t in range(y.shape[0]):
        s_old = ring[head]
        pred = level + trend + s_old
        err = y[t] - pred
        sse += err * err
        new_level = alpha * (y[t] - s_old) + (1.0 - alpha) * (level + trend)
        new_trend = beta * (new_level - level) + (1.0 - beta) * trend
        ring[head] = gamma * (y[t] - level - trend) + (1.0 - gamma) * s_old
        level = new_level
        trend = new_trend
        head = (head + 1) % m
    out = np.empty(m)
    for i in range(m):
        out[i] = ring[(head + i) % m]
    return sse, level, trend, out


def run(series, params: HwParams, state: HwState | None = None):
    """Smooth the whole series; returns (terminal state, one-step SSE).

    Without a start state, :func:`initialize` consumes the first season and
    smoothing begins at index m.
    """
    y = _values(series)
    if state is None:
        state = initialize(y, params.m)
        y = y[params.m:]
    sse, level, trend, ring = _run(np.ascontiguousarray(y), state.level, state.trend,
                                   np.asarray(state.seasonals), params.alpha, params.beta, params.gamma)
    return HwState(level, trend, ring, state.t + len(y)), sse


def one_step_predictions(series, params: HwParams) -> np.ndarray:
    """In-sample one-step predictions for indices m..n-1."""
    y = _values(series)
    state = initialize(y, params.m)
    preds = np.empty(len(y) - params.m)
    for i, v in enumerate(y[params.m:]):
        preds[i] = forecast(state, 1)[0]
        state = smooth_step(state, v, params)
    return preds


@dataclass(frozen=True)
class HwFit:
    params: HwParams
    state: HwState
    sse: float

    def __iter__(self):
        return iter((self.params, self.state, self.sse))


def fit(series, m: int, start: HwParams | None = None, grid_step: float = 0.1) -> HwFit:
    """Minimize in-sample one-step SSE over (alpha, beta, gamma) in [0, 1]^3.

    A coarse grid scan (skipped when ``start`` is given) seeds a bounded
    Nelder-Mead refinement.
    """
    y = np.ascontiguousarray(_values(series))
    if len(y) < 2 * m + 10:
        raise ValueError(f"need at least {2 * m + 10} values to fit, got {len(y)}")
    init = initialize(y, m)
    body = y[m:]
    seas0 = np.asarray(init.seasonals)

    def sse(x):
        a, b, g = np.clip(x, 0.0, 1.0)
        return _run(body, init.level, init.trend, seas0, a, b, g)[0]

    if start is None:
        grid = np.round(np.arange(0.0, 1.0 + 1e-9, grid_step), 10)
        best = min((sse(np.array(p)), p) for p in itertools.product(grid, grid, grid))
        x0 = np.array(best[1])
    else:
        x0 = np.array([start.alpha, start.beta, start.gamma])
    res = optimize.minimize(sse, x0, method="Nelder-Mead", bounds=[(0.0, 1.0)] * 3,
                            options={"xatol": 1e-6, "fatol": 1e-10, "maxiter": 2000})
    x = x0 if sse(x0) <= res.fun else res.x
    a, b, g = (float(v) for v in np.clip(x, 0.0, 1.0))
    params = HwParams(a, b, g, m)
    state, total = run(y, params)
    return HwFit(params, state, total)
