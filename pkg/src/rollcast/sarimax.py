"""SARIMAX(p,d,q)(P,D,Q,S): differencing, lag polynomials, exact MLE and forecasting.

The model is a regression with SARIMA errors::

    y_t = beta' x_t + eta_t,
    phi(L) Phi(L^S) (1-L)^d (1-L^S)^D eta_t = theta(L) Theta(L^S) eps_t.

Estimation differences y and x, then maximizes the exact Gaussian likelihood of
the differenced data (conditional on the first d + D*S observations). sigma2
and beta are concentrated out by GLS, so the optimizer only searches the ARMA
coefficients, which are mapped to an unconstrained space through partial
autocorrelations so every candidate is stationary and invertible.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize, signal

from . import statespace as ss
from .features import ExogMatrix
from .series import TimeSeries

MAX_ORDER = 30


class FitTimeout(RuntimeError):
    pass


@dataclass(frozen=True)
class ModelOrder:
    p: int = 0
    d: int = 0
    q: int = 0

    def __post_init__(self):
        if min(self.p, self.d, self.q) < 0:
            raise ValueError("orders must be non-negative")
        if self.p > MAX_ORDER or self.q > MAX_ORDER:
            raise ValueError(f"p and q must be <= {MAX_ORDER}")
        if self.d > 2:
            raise ValueError("d must be <= 2")

    def __iter__(self):
        return iter((self.p, self.d, self.q))


@dataclass(frozen=True)
class SeasonalOrder:
    P: int = 0
    D: int = 0
    Q: int = 0
    S: int = 0

    def __post_init__(self):
        if min(self.P, self.D, self.Q, self.S) < 0:
            raise ValueError("seasonal orders must be non-negative")
        if self.S == 0 and (self.P or self.D or self.Q):
            raise ValueError("seasonal orders require a period S >= 2")
        if self.S == 1:
            raise ValueError("seasonal period must be 0 (none) or >= 2")

    def __iter__(self):
        return iter((self.P, self.D, self.Q, self.S))


NO_SEASON = SeasonalOrder()


@dataclass(frozen=True)
class LagPolynomial:
    """``1 - sum c_i L^i`` (convention "ar") or ``1 + sum c_i L^i`` ("ma")."""

    coefficients: tuple[float, ...] = ()
    convention: str = "ar"

    def __post_init__(self):
        if self.convention not in ("ar", "ma"):
            raise ValueError("convention must be 'ar' or 'ma'")
        coefs = tuple(float(c) for c in self.coefficients)
        if not all(math.isfinite(c) for c in coefs):
            raise ValueError("polynomial coefficients must be finite")
        object.__setattr__(self, "coefficients", coefs)

    @property
    def degree(self) -> int:
        return len(self.coefficients)

    def lag_form(self) -> np.ndarray:
        """Coefficients of L^0..L^k including the leading 1."""
        sign = -1.0 if self.convention == "ar" else 1.0
        return np.concatenate([[1.0], sign * np.asarray(self.coefficients)])

    @classmethod
    def from_lag_form(cls, full, convention: str) -> "LagPolynomial":
        full = np.asarray(full, dtype=np.float64)
        sign = -1.0 if convention == "ar" else 1.0
        return cls(tuple(sign * full[1:]), convention)


def expand_polynomials(nonseasonal: LagPolynomial, seasonal: LagPolynomial, S: int) -> LagPolynomial:
    """Product of a polynomial in L and a polynomial in L^S."""
    if nonseasonal.convention != seasonal.convention:
        raise ValueError("cannot multiply polynomials with different conventions")
    seas = seasonal.lag_form()
    if seasonal.degree and S < 1:
        raise ValueError("seasonal polynomial requires S >= 1")
    spread = np.zeros(seasonal.degree * S + 1)
    spread[:: max(S, 1)] = seas
    prod = np.convolve(nonseasonal.lag_form(), spread)
    return LagPolynomial.from_lag_form(prod, nonseasonal.convention)


def differencing_polynomial(d: int, D: int = 0, S: int = 0) -> np.ndarray:
    """Lag-form coefficients of (1-L)^d (1-L^S)^D."""
    poly = np.array([1.0])
    for _ in range(d):
        poly = np.convolve(poly, [1.0, -1.0])
    if D:
        seas = np.zeros(S + 1)
        seas[0], seas[S] = 1.0, -1.0
        for _ in range(D):
            poly = np.convolve(poly, seas)
    return poly


def _values(series) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return np.asarray(series.values, dtype=np.float64)
    return np.asarray(series, dtype=np.float64)


def difference(series, d: int = 1, D: int = 0, S: int = 0) -> np.ndarray:
    """Apply (1-L)^d (1-L^S)^D; the result has length n - d - D*S."""
    y = _values(series)
    lost = d + D * S
    if len(y) <= lost:
        raise ValueError(f"series length {len(y)} too short for d={d}, D={D}, S={S}")
    out = y
    for _ in range(d):
        out = out[1:] - out[:-1]
    for _ in range(D):
        out = out[S:] - out[:-S]
    return out


def integrate(diffs, initial: float) -> np.ndarray:
    """Inverse of a first difference: cumulative sum from ``initial``, Neumaier-compensated."""
    diffs = np.asarray(diffs, dtype=np.float64)
    out = np.empty(len(diffs) + 1)
    s = float(initial)
    comp = 0.0
    out[0] = s
    for i, x in enumerate(diffs, start=1):
        t = s + x
        if abs(s) >= abs(x):
            comp += (s - t) + x
        else:
            comp += (x - t) + s
        s = t
        out[i] = s + comp
    return out


# --- parameter transforms ------------------------------------------------------

def constrain_stationary(x) -> np.ndarray:
    """Map unconstrained reals to the coefficients of a stationary AR polynomial.

    Each x_k becomes a partial autocorrelation r_k = x_k / sqrt(1 + x_k^2) in
    (-1, 1); the Durbin-Levinson recursion turns these into AR coefficients.
    """
    r = np.asarray(x, dtype=np.float64)
    r = r / np.sqrt(1.0 + r * r)
    phi = np.zeros(0)
    for k, rk in enumerate(r):
        nxt = np.empty(k + 1)
        nxt[:k] = phi - rk * phi[::-1]
        nxt[k] = rk
        phi = nxt
    return phi


def unconstrain_stationary(phi) -> np.ndarray:
    """Inverse of :func:`constrain_stationary`; raises if ``phi`` is not stationary."""
    phi = np.asarray(phi, dtype=np.float64)
    p = len(phi)
    r = np.empty(p)
    cur = phi.copy()
    for k in range(p - 1, -1, -1):
        rk = cur[k]
        if not abs(rk) < 1.0:
            raise ValueError("coefficients are not stationary")
        r[k] = rk
        if k:
            cur = (cur[:k] + rk * cur[:k][::-1]) / (1.0 - rk * rk)
    return r / np.sqrt(1.0 - r * r)


# --- parameters and fitted models --------------------------------------------

def _tup(v) -> tuple[float, ...]:
    return tuple(float(x) for x in np.atleast_1d(np.asarray(v, dtype=np.float64)))


@dataclass(frozen=True)
class SarimaxParams:
    phi: tuple[float, ...] = ()
    theta: tuple[float, ...] = ()
    seasonal_phi: tuple[float, ...] = ()
    seasonal_theta: tuple[float, ...] = ()
    beta: tuple[float, ...] = ()
    sigma2: float = 1.0

    def __post_init__(self):
        for name in ("phi", "theta", "seasonal_phi", "seasonal_theta", "beta"):
            object.__setattr__(self, name, _tup(getattr(self, name)) if len(getattr(self, name)) else ())
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")
        object.__setattr__(self, "sigma2", float(self.sigma2))

    def ar_polynomial(self, S: int) -> LagPolynomial:
        return expand_polynomials(LagPolynomial(self.phi, "ar"),
                                  LagPolynomial(self.seasonal_phi, "ar"), S)

    def ma_polynomial(self, S: int) -> LagPolynomial:
        return expand_polynomials(LagPolynomial(self.theta, "ma"),
                                  LagPolynomial(self.seasonal_theta, "ma"), S)

    def state_space(self, S: int) -> ss.StateSpaceModel:
        return ss.build_arma_ssm(self.ar_polynomial(S).coefficients,
                                 self.ma_polynomial(S).coefficients, self.sigma2)


@dataclass(frozen=True)
class FittedModel:
    order: ModelOrder
    seasonal: SeasonalOrder
    params: SarimaxParams
    loglik: float
    aic: float
    n_obs_effective: int
    converged: bool
    exog_names: tuple[str, ...] = ()
    deterministic: str | None = None   # "const", "drift" or None
    message: str = ""

    @property
    def n_params(self) -> int:
        return n_params(self.order, self.seasonal, len(self.params.beta))

    @property
    def regressor_names(self) -> tuple[str, ...]:
        det = (self.deterministic,) if self.deterministic else ()
        return det + self.exog_names

    def state_space(self) -> ss.StateSpaceModel:
        return self.params.state_space(self.seasonal.S)


def n_params(order: ModelOrder, seasonal: SeasonalOrder, n_regressors: int) -> int:
    return order.p + order.q + seasonal.P + seasonal.Q + n_regressors + 1


def aic_of(loglik: float, k: int) -> float:
    return 2.0 * k - 2.0 * loglik


# --- design matrices -------------------------------------------------------------

def _deterministic_kind(order: ModelOrder, seasonal: SeasonalOrder, mean: bool | None) -> str | None:
    integrated = order.d + seasonal.D > 0
    if mean is None:
        mean = not integrated
    if not mean:
        return None
    return "drift" if integrated else "const"


def _deterministic_column(kind: str, start: int, n: int, order: ModelOrder,
                          seasonal: SeasonalOrder) -> np.ndarray:
    t = np.arange(start, start + n, dtype=np.float64)
    if kind == "const":
        return np.ones(n)
    # t^k / (k! S^D) differences to exactly 1 under (1-L)^d (1-L^S)^D, k = d + D.
    k = order.d + seasonal.D
    return t ** k / (math.factorial(k) * max(seasonal.S, 1) ** seasonal.D)


def _exog_rows(exog, n: int, names: tuple[str, ...] | None = None) -> tuple[np.ndarray, tuple[str, ...]]:
    if exog is None:
        return np.zeros((n, 0)), ()
    if isinstance(exog, ExogMatrix):
        rows, cols = np.asarray(exog.rows), exog.column_names
    else:
        rows = np.asarray(exog, dtype=np.float64)
        if rows.ndim == 1:
            rows = rows[:, None]
        cols = tuple(f"x{i}" for i in range(rows.shape[1]))
    if rows.shape[0] != n:
        raise ValueError(f"exogenous matrix has {rows.shape[0]} rows, expected {n}")
    if names is not None and isinstance(exog, ExogMatrix) and tuple(cols) != tuple(names):
        raise ValueError(f"exogenous columns {cols} do not match fitted columns {names}")
    if names is not None and rows.shape[1] != len(names):
        raise ValueError(f"exogenous matrix has {rows.shape[1]} columns, expected {len(names)}")
    return rows, tuple(cols)


def _regressors(model: FittedModel, start: int, n: int, exog) -> np.ndarray:
    rows, _ = _exog_rows(exog, n, model.exog_names)
    if model.deterministic:
        det = _deterministic_column(model.deterministic, start, n, model.order, model.seasonal)
        rows = np.column_stack([det, rows]) if rows.shape[1] else det[:, None]
    return rows


# --- estimation ------------------------------------------------------------------

def _ols(y, X):
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    return beta, y - X @ beta


def _lagged(x: np.ndarray, lags: Sequence[int], start: int) -> np.ndarray:
    n = len(x)
    return np.column_stack([x[start - L: n - L] for L in lags]) if lags else np.zeros((n - start, 0))


def hannan_rissanen(w, order: ModelOrder, seasonal: SeasonalOrder) -> tuple[np.ndarray, ...]:
    """Rough (phi, theta, seasonal_phi, seasonal_theta) from two OLS passes.

    Cross terms of the multiplicative seasonal structure are ignored; the
    result only seeds the likelihood optimizer.
    """
    p, q = order.p, order.q
    P, Q, S = seasonal.P, seasonal.Q, seasonal.S
    w = np.asarray(w, dtype=np.float64)
    w = w - w.mean()
    n = len(w)
    ar_lags = list(range(1, p + 1)) + [S * i for i in range(1, P + 1)]
    ma_lags = list(range(1, q + 1)) + [S * i for i in range(1, Q + 1)]
    if ma_lags:
        m = min(max(ar_lags + ma_lags) + 10, max(n // 4, 1))
        Xl = _lagged(w, list(range(1, m + 1)), m)
        _, e_tail = _ols(w[m:], Xl)
        e = np.concatenate([np.zeros(m), e_tail])
    else:
        m = 0
        e = np.zeros(n)
    start = m + max(ar_lags + ma_lags + [0])
    if n - start <= len(ar_lags) + len(ma_lags) + 2:
        return np.zeros(p), np.zeros(q), np.zeros(P), np.zeros(Q)
    X = np.hstack([_lagged(w, ar_lags, start), _lagged(e, ma_lags, start)])
    coef, _ = _ols(w[start:], X)
    a, b = coef[: len(ar_lags)], coef[len(ar_lags):]
    return a[:p], b[:q], a[p:], b[q:]


def _safe_unconstrain(coefs, ma: bool) -> np.ndarray:
    c = np.asarray(coefs, dtype=np.float64)
    if not len(c):
        return c
    c = -c if ma else c
    for _ in range(8):
        try:
            x = unconstrain_stationary(c)
            if np.all(np.isfinite(x)) and np.max(np.abs(x)) < 20:
                return x
        except ValueError:
            pass
        c = 0.5 * c
    return np.zeros(len(c))


class _Layout:
    def __init__(self, order: ModelOrder, seasonal: SeasonalOrder):
        self.sizes = (order.p, order.q, seasonal.P, seasonal.Q)
        self.S = seasonal.S

    @property
    def k(self) -> int:
        return sum(self.sizes)

    def split(self, x):
        out, i = [], 0
        for s in self.sizes:
            out.append(x[i: i + s])
            i += s
        return out

    def to_coefs(self, x):
        a, b, A, B = self.split(np.asarray(x, dtype=np.float64))
        return (constrain_stationary(a), -constrain_stationary(b),
                constrain_stationary(A), -constrain_stationary(B))

    def to_unconstrained(self, phi, theta, sphi, stheta) -> np.ndarray:
        return np.concatenate([_safe_unconstrain(phi, False), _safe_unconstrain(theta, True),
                               _safe_unconstrain(sphi, False), _safe_unconstrain(stheta, True)])

    def ssm(self, x) -> ss.StateSpaceModel:
        phi, theta, sphi, stheta = self.to_coefs(x)
        ar = expand_polynomials(LagPolynomial(phi, "ar"), LagPolynomial(sphi, "ar"), self.S)
        ma = expand_polynomials(LagPolynomial(theta, "ma"), LagPolynomial(stheta, "ma"), self.S)
        return ss.build_arma_ssm(ar.coefficients, ma.coefficients, 1.0)


_BAD = 1e300


def fit(series, order: ModelOrder, seasonal: SeasonalOrder = NO_SEASON, exog=None, *,
        mean: bool | None = None, start_params: SarimaxParams | None = None, seed: int = 0,
        maxiter: int | None = None, restarts: int = 3, deadline: float | None = None) -> FittedModel:
    """Maximum-likelihood SARIMAX fit.

    ``mean`` adds a constant to the differenced model: a mean when
    d = D = 0 (the default there) or a polynomial drift otherwise (off by
    default). ``deadline`` is a ``time.monotonic()`` instant after which the
    fit raises :class:`FitTimeout`. Optimizer non-convergence is reported
    through ``converged=False``, not raised.
    """
    order = order if isinstance(order, ModelOrder) else ModelOrder(*order)
    seasonal = seasonal if isinstance(seasonal, SeasonalOrder) else SeasonalOrder(*seasonal)
    y = _values(series)
    n = len(y)
    lost = order.d + seasonal.D * seasonal.S
    need = 10 + order.p + order.q + seasonal.P * seasonal.S + seasonal.Q * seasonal.S
    if n - lost < need:
        raise ValueError(f"series too short: {n - lost} observations after differencing, need {need}")
    X, names = _exog_rows(exog, n)
    det = _deterministic_kind(order, seasonal, mean)
    if det:
        X = np.column_stack([_deterministic_column(det, 0, n, order, seasonal), X])
    all_names = ((det,) if det else ()) + names

    w = difference(y, order.d, seasonal.D, seasonal.S)
    Xd = np.column_stack([difference(X[:, j], order.d, seasonal.D, seasonal.S)
                          for j in range(X.shape[1])]) if X.shape[1] else np.zeros((len(w), 0))
    for j, name in enumerate(all_names):
        if not np.any(Xd[:, j]):
            raise ValueError(f"exogenous column {name!r} is all zero after differencing")

    layout = _Layout(order, seasonal)

    n_eff = len(w)

    def objective(x):
        # per-observation scale keeps gradients O(1), so the first quasi-Newton
        # step stays inside the box
        if deadline is not None and time.monotonic() > deadline:
            raise FitTimeout("fit exceeded its time budget")
        ll, _, _ = ss.profile_loglik(layout.ssm(x), w, Xd)
        return -ll / n_eff if math.isfinite(ll) else _BAD

    if layout.k == 0:
        x_best = np.zeros(0)
        converged, message = True, "no ARMA parameters"
    else:
        if start_params is not None:
            x0 = layout.to_unconstrained(start_params.phi, start_params.theta,
                                         start_params.seasonal_phi, start_params.seasonal_theta)
        else:
            resid = _ols(w, Xd)[1] if Xd.shape[1] else w
            x0 = layout.to_unconstrained(*hannan_rissanen(resid, order, seasonal))
        x_best, converged, message = _minimize(objective, x0, seed, maxiter, restarts)

    ll, sigma2, beta = ss.profile_loglik(layout.ssm(x_best), w, Xd)
    if not math.isfinite(ll):
        raise FloatingPointError("likelihood is not finite at the optimum")
    phi, theta, sphi, stheta = layout.to_coefs(x_best)
    params = SarimaxParams(phi, theta, sphi, stheta, beta, sigma2)
    k = n_params(order, seasonal, X.shape[1])
    return FittedModel(order, seasonal, params, ll, aic_of(ll, k), len(w), bool(converged),
                       names, det, message)


# The exact likelihood carries rounding noise of ~1e-9 per observation near
# the stationarity boundary; a 1e-8 difference step would amplify it too much.
_FD_STEP = 1e-6
# Box on the unconstrained scale: partial autocorrelations stay within
# +-0.99944, so fits that drift to a unit root stop at the boundary instead
# of wandering along a flat ridge.
_X_BOUND = 30.0


def _minimize(objective, x0, seed, maxiter, restarts):
    """Quasi-Newton search; seeded Nelder-Mead restarts if it does not converge."""
    k = len(x0)
    bounds = [(-_X_BOUND, _X_BOUND)] * k
    x0 = np.clip(x0, -_X_BOUND, _X_BOUND)
    res = optimize.minimize(objective, x0, method="L-BFGS-B", bounds=bounds,
                            options={"maxiter": maxiter or 100 * max(k, 5), "ftol": 1e-13, "gtol": 1e-8,
                                     "eps": _FD_STEP})
    best_x, best_f = res.x, res.fun
    success = _stationary_point(res)
    rng = np.random.default_rng(seed)
    nm_opts = {"maxiter": maxiter or 300 * k, "xatol": 1e-7, "fatol": 1e-12, "adaptive": k > 3}
    tries = 0
    while tries < restarts and (not success or best_f >= _BAD):
        tries += 1
        base = best_x if best_f < _BAD else np.zeros(k)
        scale = 0.1 * (1.0 + np.abs(base))
        simplex = np.vstack([base] + [base + scale * rng.standard_normal(k) for _ in range(k)])
        simplex = np.clip(simplex, -_X_BOUND, _X_BOUND)
        res = optimize.minimize(objective, base, method="Nelder-Mead", bounds=bounds,
                                options={**nm_opts, "initial_simplex": simplex})
        if res.fun <= best_f:
            best_x, best_f = res.x, res.fun
        success = bool(res.success)
    message = "converged" if success else f"not converged after {tries} restarts: {res.message}"
    return best_x, success and best_f < _BAD, message


def _stationary_point(res) -> bool:
    """Projected gradient is small, whatever the optimizer's own verdict.

    L-BFGS-B can stop on a stalled line search with a large gradient, and can
    flag an optimum flat to rounding as abnormal.
    """
    jac = getattr(res, "jac", None)
    if jac is None or not np.all(np.isfinite(jac)) or not res.fun < _BAD:
        return False
    g = np.array(jac, dtype=np.float64)
    x = res.x
    g[(x >= _X_BOUND) & (g < 0)] = 0.0   # pushing outward at an active bound
    g[(x <= -_X_BOUND) & (g > 0)] = 0.0
    return float(np.max(np.abs(g), initial=0.0)) < 1e-5


# --- forecasting -----------------------------------------------------------------

def _check_exog_presence(model: FittedModel, exog, future_exog):
    if model.exog_names:
        if future_exog is None or exog is None:
            raise ValueError("model was fit with exogenous regressors; history and future exog are required")
    elif future_exog is not None or exog is not None:
        raise ValueError("model was fit without exogenous regressors")


def forecast(model: FittedModel, history, horizon: int, future_exog=None, exog=None) -> np.ndarray:
    """Point forecasts y_{n+1..n+horizon} on the original scale.

    ``exog`` holds the regressors for ``history``; ``future_exog`` those for
    the forecast steps.
    """
    mean, _ = forecast_with_variance(model, history, horizon, future_exog, exog)
    return mean


def forecast_with_variance(model: FittedModel, history, horizon: int, future_exog=None, exog=None):
    """Forecast means and the variance of the differenced-scale errors."""
    _check_exog_presence(model, exog, future_exog)
    y = _values(history)
    n = len(y)
    if horizon <= 0:
        return np.zeros(0), np.zeros(0)
    Xh = _regressors(model, 0, n, exog)
    Xf = _regressors(model, n, horizon, future_exog)
    beta = np.asarray(model.params.beta)
    eta = y - (Xh @ beta if len(beta) else 0.0)
    o, s = model.order, model.seasonal
    u = difference(eta, o.d, s.D, s.S)
    ssm = model.state_space()
    state = ss.kalman_filter(ssm, u)
    pairs = ss.kalman_forecast(ssm, state, horizon)
    u_fc = np.array([m for m, _ in pairs])
    var = np.array([v for _, v in pairs])
    eta_fc = _undifference(eta, u_fc, differencing_polynomial(o.d, s.D, s.S))
    return eta_fc + (Xf @ beta if len(beta) else 0.0), var


def _undifference(history: np.ndarray, diffs: np.ndarray, poly: np.ndarray) -> np.ndarray:
    k = len(poly) - 1
    buf = list(history[-k:]) if k else []
    out = np.empty(len(diffs))
    for i, w in enumerate(diffs):
        val = w - sum(poly[j] * buf[-j] for j in range(1, k + 1))
        out[i] = val
        if k:
            buf.append(val)
    return out


class OnlineForecaster:
    """One-step-ahead SARIMAX predictor that absorbs observations with fixed parameters."""

    def __init__(self, model: FittedModel, history, exog=None):
        y = _values(history)
        self.model = model
        self._ssm = model.state_space()
        o, s = model.order, model.seasonal
        self._poly = differencing_polynomial(o.d, s.D, s.S)
        self._beta = np.asarray(model.params.beta)
        X = _regressors(model, 0, len(y), exog)
        eta = y - (X @ self._beta if len(self._beta) else 0.0)
        self._eta = list(eta)
        self._n = len(y)
        self.state = ss.kalman_filter(self._ssm, difference(eta, o.d, s.D, s.S))

    def _xb(self, exog_row) -> float:
        if not len(self._beta):
            return 0.0
        row = None if exog_row is None else np.asarray(exog_row, dtype=np.float64).reshape(1, -1)
        X = _regressors(self.model, self._n, 1, row)
        return float(X[0] @ self._beta)

    def predict(self, exog_row=None) -> float:
        if self.model.exog_names and exog_row is None:
            raise ValueError("exogenous row required")
        a = self._ssm.transition @ self.state.state_mean
        k = len(self._poly) - 1
        eta_pred = a[0] - sum(self._poly[j] * self._eta[-j] for j in range(1, k + 1))
        return float(eta_pred + self._xb(exog_row))

    def update(self, y: float, exog_row=None) -> None:
        eta = float(y) - self._xb(exog_row)
        k = len(self._poly) - 1
        u = eta + sum(self._poly[j] * self._eta[-j] for j in range(1, k + 1))
        self.state = ss.kalman_update(self._ssm, self.state, u)
        self._eta.append(eta)
        self._n += 1


# --- simulation ------------------------------------------------------------------

def simulate(n: int, order: ModelOrder = ModelOrder(), seasonal: SeasonalOrder = NO_SEASON,
             params: SarimaxParams = SarimaxParams(), rng: np.random.Generator | None = None,
             burn: int = 500, initial: float = 0.0) -> np.ndarray:
    """Draw a SARIMA path of length ``n`` (differenced levels start at ``initial``)."""
    rng = rng if rng is not None else np.random.default_rng()
    ar = params.ar_polynomial(seasonal.S).lag_form()
    ma = params.ma_polynomial(seasonal.S).lag_form()
    lost = order.d + seasonal.D * seasonal.S
    m = n - lost
    eps = rng.standard_normal(m + burn) * math.sqrt(params.sigma2)
    w = signal.lfilter(ma, ar, eps)[burn:]
    poly = differencing_polynomial(order.d, seasonal.D, seasonal.S)
    if lost == 0:
        return w
    return np.concatenate([np.full(lost, initial), _undifference(np.full(lost, initial), w, poly)])
