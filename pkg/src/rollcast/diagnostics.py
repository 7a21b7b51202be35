"""Stationarity and seasonality diagnostics: ADF test, ACF/PACF, additive decomposition."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg, stats

from .series import TimeSeries

# MacKinnon response-surface coefficients for a single series (N=1) with a
# constant-only regression. p-values: MacKinnon (1994), "Approximate asymptotic
# distribution functions for unit-root and cointegration tests", JBES 12,
# Table 3 (tau_c, N=1). Critical values: MacKinnon (2010), "Critical values
# for cointegration tests", Queen's Economics Dept. WP 1227, Table 2 (tau_c).
_TAU_MAX_C = 2.74
_TAU_MIN_C = -18.83
_TAU_STAR_C = -1.61
_TAU_C_SMALLP = (2.1659, 1.4412, 0.038269)
_TAU_C_LARGEP = (1.7339, 0.93202, -0.12745, -0.010368)
_TAU_C_CRIT = {  # level -> (c0, c1, c2, c3) in 1/T powers
    "1%": (-3.43035, -6.5393, -16.786, -79.433),
    "5%": (-2.86154, -2.8903, -4.234, -40.040),
    "10%": (-2.56677, -1.5384, -2.809, 0.0),
}


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    p_value: float
    used_lags: int
    n_obs: int
    critical_values: dict[str, float]

    @property
    def stationary_at_5pct(self) -> bool:
        return self.statistic < self.critical_values["5%"]


@dataclass(frozen=True, eq=False)
class CorrelationSequence:
    values: np.ndarray
    n_obs: int

    @property
    def lags(self) -> np.ndarray:
        return np.arange(len(self.values))

    @property
    def confidence_band(self) -> float:
        return 2.0 / np.sqrt(self.n_obs)

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True, eq=False)
class Decomposition:
    observed: np.ndarray
    trend: np.ndarray      # nan at the edges
    seasonal: np.ndarray
    residual: np.ndarray   # nan where trend is undefined
    period: int


def _values(series) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return np.asarray(series.values, dtype=np.float64)
    return np.asarray(series, dtype=np.float64)


def mackinnon_p(stat: float) -> float:
    """Approximate asymptotic p-value of a constant-only ADF statistic."""
    if stat > _TAU_MAX_C:
        return 1.0
    if stat < _TAU_MIN_C:
        return 0.0
    coefs = _TAU_C_SMALLP if stat <= _TAU_STAR_C else _TAU_C_LARGEP
    z = sum(c * stat ** i for i, c in enumerate(coefs))
    return float(stats.norm.cdf(z))


def mackinnon_crit(n_obs: int) -> dict[str, float]:
    inv = 1.0 / n_obs
    return {level: float(sum(c * inv ** i for i, c in enumerate(coefs)))
            for level, coefs in _TAU_C_CRIT.items()}


def _ols(y: np.ndarray, X: np.ndarray):
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    return beta, resid


def _adf_design(x: np.ndarray, lags: int, n_rows: int):
    """Rows for regressing dx_t on [x_{t-1}, dx_{t-1..t-lags}, 1] over the last n_rows steps."""
    dx = np.diff(x)
    m = len(dx)
    cols = [x[m - n_rows: m]]
    for j in range(1, lags + 1):
        cols.append(dx[m - n_rows - j: m - j])
    cols.append(np.ones(n_rows))
    return dx[m - n_rows:], np.column_stack(cols)


def adf_test(series, max_lag: int | None = None, autolag: bool = True) -> AdfResult:
    """Augmented Dickey-Fuller test with a constant term.

    With ``autolag`` the lag order minimizes the Gaussian AIC over 0..max_lag,
    every candidate fit on the common sample that max_lag leaves; the chosen
    regression is then refit on its own full sample. ``max_lag`` defaults to
    ``floor(12 * (n/100) ** 0.25)``. Without ``autolag``, exactly ``max_lag``
    lags are used.
    """
    x = _values(series)
    n = len(x)
    if np.ptp(x) == 0.0:
        raise ValueError("ADF regression is degenerate for a constant series")
    if max_lag is None:
        max_lag = int(np.floor(12.0 * (n / 100.0) ** 0.25))
        max_lag = max(0, min(n // 2 - 2, max_lag))
    if n <= max_lag + 10:
        raise ValueError(f"series length {n} too short for max_lag={max_lag}")

    lags = max_lag
    if autolag:
        n_common = n - 1 - max_lag
        best = None
        for k in range(max_lag + 1):
            y, X = _adf_design(x, k, n_common)
            _, resid = _ols(y, X)
            ssr = float(resid @ resid)
            llf = -0.5 * n_common * (np.log(2 * np.pi) + np.log(ssr / n_common) + 1.0)
            aic = 2.0 * X.shape[1] - 2.0 * llf
            if best is None or aic < best[0]:
                best = (aic, k)
        lags = best[1]

    n_rows = n - 1 - lags
    y, X = _adf_design(x, lags, n_rows)
    beta, resid = _ols(y, X)
    dof = n_rows - X.shape[1]
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(X.T @ X)
    stat = float(beta[0] / np.sqrt(cov[0, 0]))
    return AdfResult(statistic=stat, p_value=mackinnon_p(stat), used_lags=lags,
                     n_obs=n_rows, critical_values=mackinnon_crit(n_rows))


def acf(series, n_lags: int) -> CorrelationSequence:
    """Sample autocorrelation with the biased (1/n) autocovariance."""
    x = _values(series)
    n = len(x)
    if n_lags >= n:
        raise ValueError(f"n_lags={n_lags} must be below series length {n}")
    xc = x - x.mean()
    c0 = float(xc @ xc) / n
    if c0 == 0.0:
        raise ValueError("autocorrelation undefined for a zero-variance series")
    out = np.empty(n_lags + 1)
    out[0] = 1.0
    for k in range(1, n_lags + 1):
        out[k] = float(xc[k:] @ xc[:-k]) / n / c0
    return CorrelationSequence(out, n)


def durbin_levinson(rho: np.ndarray) -> np.ndarray:
    """Partial autocorrelations from autocorrelations rho[0..K] (rho[0] == 1)."""
    K = len(rho) - 1
    pacf_vals = np.empty(K + 1)
    pacf_vals[0] = 1.0
    phi = np.zeros(K + 1)
    prev = np.zeros(K + 1)
    v = 1.0
    for k in range(1, K + 1):
        num = rho[k] - sum(prev[j] * rho[k - j] for j in range(1, k))
        a = num / v
        phi[k] = a
        for j in range(1, k):
            phi[j] = prev[j] - a * prev[k - j]
        v *= 1.0 - a * a
        pacf_vals[k] = a
        prev[: k + 1] = phi[: k + 1]
    return pacf_vals


def pacf(series, n_lags: int) -> CorrelationSequence:
    x = _values(series)
    if n_lags >= len(x) / 2:
        raise ValueError(f"n_lags={n_lags} must be below half the series length {len(x)}")
    r = acf(x, n_lags)
    return CorrelationSequence(durbin_levinson(r.values), len(x))


def yule_walker(series, order: int) -> np.ndarray:
    """AR coefficients from the Yule-Walker equations on the biased autocovariance."""
    r = acf(series, order).values
    return linalg.solve_toeplitz(r[:-1], r[1:])


def decompose_additive(series, period: int) -> Decomposition:
    """Classical additive decomposition with a centered moving-average trend."""
    x = _values(series)
    n = len(x)
    if period < 2:
        raise ValueError("period must be >= 2")
    if n < 2 * period:
        raise ValueError(f"series length {n} must be at least two periods ({2 * period})")
    if period % 2:
        w = np.full(period, 1.0 / period)
    else:
        w = np.full(period + 1, 1.0 / period)
        w[0] = w[-1] = 0.5 / period
    half = len(w) // 2
    trend = np.full(n, np.nan)
    trend[half: n - half] = np.convolve(x, w, mode="valid")
    detrended = x - trend
    phase_means = np.array([np.nanmean(detrended[i::period]) for i in range(period)])
    phase_means -= phase_means.mean()
    seasonal = np.resize(phase_means, n)
    residual = x - trend - seasonal
    return Decomposition(x, trend, seasonal, residual, period)


def strongest_period(series, max_period: int, min_period: int = 2) -> int:
    """Lag in [min_period, max_period] with the largest autocorrelation."""
    r = acf(series, max_period).values
    return int(min_period + np.argmax(r[min_period: max_period + 1]))
