"""Kalman filter for ARMA processes in Harvey's state-space form.

For an ARMA process with AR coefficients phi_1..phi_p and MA coefficients
theta_1..theta_q the state has dimension r = max(p, q + 1) and

    alpha_{t+1} = T alpha_t + R eps_{t+1},    y_t = Z alpha_t,

where T carries phi in its first column and an identity block on the
superdiagonal, Z = e_1 and R = (1, theta_1, ..., theta_{r-1})'. There is no
measurement noise. The filter is initialized at the stationary distribution,
which solves the discrete Lyapunov equation P = T P T' + R R' sigma2.

The numerical core runs with sigma2 = 1 and rescales afterwards; this lets the
same pass also deliver the likelihood concentrated over sigma2 (and over any
regression coefficients, see :func:`profile_loglik`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class StateSpaceModel:
    ar: np.ndarray              # phi_1..phi_p, y_t = sum phi_i y_{t-i} + ...
    ma: np.ndarray              # theta_1..theta_q, ... + eps_t + sum theta_j eps_{t-j}
    innovation_variance: float

    def __post_init__(self):
        ar = np.atleast_1d(np.asarray(self.ar, dtype=np.float64))
        ma = np.atleast_1d(np.asarray(self.ma, dtype=np.float64))
        if not (np.all(np.isfinite(ar)) and np.all(np.isfinite(ma))):
            raise ValueError("lag polynomial coefficients must be finite")
        if not (self.innovation_variance > 0 and math.isfinite(self.innovation_variance)):
            raise ValueError("innovation variance must be positive and finite")
        object.__setattr__(self, "ar", ar)
        object.__setattr__(self, "ma", ma)

    @property
    def state_dim(self) -> int:
        return max(len(self.ar), len(self.ma) + 1)

    @property
    def transition_column(self) -> np.ndarray:
        col = np.zeros(self.state_dim)
        col[: len(self.ar)] = self.ar
        return col

    @property
    def transition(self) -> np.ndarray:
        r = self.state_dim
        T = np.zeros((r, r))
        T[:, 0] = self.transition_column
        T[: r - 1, 1:] += np.eye(r - 1)
        return T

    @property
    def design(self) -> np.ndarray:
        Z = np.zeros(self.state_dim)
        Z[0] = 1.0
        return Z

    @property
    def state_loading(self) -> np.ndarray:
        R = np.zeros(self.state_dim)
        R[0] = 1.0
        R[1: len(self.ma) + 1] = self.ma
        return R

    def is_stationary(self) -> bool:
        if not np.any(self.ar):
            return True
        return float(np.max(np.abs(np.linalg.eigvals(self.transition)))) < 1.0

    def stationary_cov(self, unit: bool = False) -> np.ndarray:
        """Unconditional state covariance; ``unit`` scales it to sigma2 = 1."""
        if not self.is_stationary():
            raise ValueError("stationary initialization requires all AR roots outside the unit circle")
        R = self.state_loading
        P = _lyapunov_doubling(self.transition, np.outer(R, R))
        return P if unit else P * self.innovation_variance

    def autocovariances(self, n_lags: int) -> np.ndarray:
        """Implied gamma_0..gamma_{n_lags} of the observed process."""
        T = self.transition
        P = self.stationary_cov()
        Z = self.design
        out = np.empty(n_lags + 1)
        M = P.copy()
        for k in range(n_lags + 1):
            out[k] = Z @ M @ Z
            M = T @ M
        return out


def _lyapunov_doubling(T: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Solve P = T P T' + Q by squaring: P = sum_k T^k Q T'^k.

    Schur-based solvers are accurate too, but their output jitters by ~1e-8
    under tiny parameter changes near a unit root, which wrecks numerical
    gradients of the likelihood. This iteration is smooth in T.
    """
    A, P = T.copy(), Q.copy()
    for _ in range(128):
        inc = A @ P @ A.T
        P = P + inc
        if np.abs(inc).max() <= 1e-17 * np.abs(P).max():
            break
        A = A @ A
    return 0.5 * (P + P.T)


def build_arma_ssm(ar_coefs=(), ma_coefs=(), sigma2: float = 1.0) -> StateSpaceModel:
    """State-space form of ``(1 - sum ar L^i) y = (1 + sum ma L^j) eps``."""
    return StateSpaceModel(np.asarray(ar_coefs, dtype=np.float64),
                           np.asarray(ma_coefs, dtype=np.float64), float(sigma2))


@dataclass(frozen=True, eq=False)
class FilterState:
    """Filtered moments alpha_{t|t}, P_{t|t} after ``t`` observations.

    Public functions keep ``state_cov`` in data units. :func:`run_filter`
    works at sigma2 = 1 and its states may carry one mean column per data column.
    """

    state_mean: np.ndarray
    state_cov: np.ndarray
    loglik_accum: float
    t: int


@njit(cache=True)
def _predict_cov(phi, RR, Pf):
    # T Pf T' + RR' exploiting the companion structure of T.
    r = phi.shape[0]
    M = np.empty((r, r))
    for i in range(r):
        for j in range(r):
            v = phi[i] * Pf[0, j]
            if i + 1 < r:
                v += Pf[i + 1, j]
            M[i, j] = v
    P = np.empty((r, r))
    for i in range(r):
        for j in range(r):
            v = M[i, 0] * phi[j]
            if j + 1 < r:
                v += M[i, j + 1]
            P[i, j] = v + RR[i, j]
    for i in range(r):
        for j in range(i + 1, r):
            s = 0.5 * (P[i, j] + P[j, i])
            P[i, j] = s
            P[j, i] = s
    return P


@njit(cache=True)
def _filter(phi, R, P0, Y, a0):
    """Kalman filter over the columns of Y (n x m) with shared gains, sigma2 = 1.

    Returns innovations v (n x m), innovation variances F (n), the filtered
    state/covariance after the last step, and an ok flag.
    """
    n, m = Y.shape
    r = phi.shape[0]
    RR = np.outer(R, R)
    v = np.empty((n, m))
    F = np.empty(n)
    a = a0.copy()
    P = P0.copy()
    af = np.empty((r, m))
    Pf = np.empty((r, r))
    k = np.empty(r)
    for t in range(n):
        f = P[0, 0]
        if not (f > 0.0) or not np.isfinite(f):
            return v, F, af, Pf, False
        for i in range(r):
            k[i] = P[i, 0] / f
        # Joseph form with H = 0 and Z = e1 reduces to P - P[:,0] P[0,:] / f.
        for i in range(r):
            for j in range(r):
                Pf[i, j] = P[i, j] - k[i] * P[0, j]
        for i in range(r):
            for j in range(i + 1, r):
                s = 0.5 * (Pf[i, j] + Pf[j, i])
                Pf[i, j] = s
                Pf[j, i] = s
        F[t] = f
        for c in range(m):
            e = Y[t, c] - a[0, c]
            v[t, c] = e
            for i in range(r):
                af[i, c] = a[i, c] + k[i] * e
        # a_{t+1} = T af
        for c in range(m):
            for i in range(r):
                nxt = phi[i] * af[0, c]
                if i + 1 < r:
                    nxt += af[i + 1, c]
                a[i, c] = nxt
        P = _predict_cov(phi, RR, Pf)
    return v, F, af, Pf, True


def _as_matrix(data) -> np.ndarray:
    Y = np.asarray(data, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    return np.ascontiguousarray(Y)


def run_filter(model: StateSpaceModel, data, initial: FilterState | None = None):
    """Filter ``data`` (a vector or n x m matrix of columns sharing the model).

    Returns ``(v, F, terminal)`` with innovations, unit-scale innovation
    variances (multiply by sigma2 for actual variances) and the terminal
    :class:`FilterState` (unit-scale covariance), or ``None`` if the
    recursion broke down.
    """
    Y = _as_matrix(data)
    if Y.shape[0] == 0 or not np.all(np.isfinite(Y)):
        raise ValueError("data must be non-empty and finite")
    phi = model.transition_column
    R = model.state_loading
    if initial is None:
        P0 = model.stationary_cov(unit=True)
        a0 = np.zeros((len(phi), Y.shape[1]))
    else:
        T = model.transition
        a0 = T @ initial.state_mean
        P0 = _predict_cov(phi, np.outer(R, R), initial.state_cov)
    if not np.all(np.isfinite(P0)):
        return None, None, None
    v, F, af, Pf, ok = _filter(phi, R, P0, Y, np.ascontiguousarray(a0))
    if not ok:
        return None, None, None
    t0 = initial.t if initial is not None else 0
    return v, F, FilterState(af, Pf, float("nan"), t0 + Y.shape[0])


def kalman_loglik(model: StateSpaceModel, data) -> float:
    """Exact Gaussian log-likelihood of ``data`` under ``model``.

    Returns ``-inf`` if the filter breaks down numerically.
    """
    y = np.asarray(data, dtype=np.float64).ravel()
    v, F, _ = run_filter(model, y)
    if v is None:
        return -math.inf
    s2 = model.innovation_variance
    n = len(y)
    return float(-0.5 * (n * (LOG_2PI + math.log(s2)) + np.log(F).sum()
                         + (v[:, 0] ** 2 / F).sum() / s2))


def kalman_filter(model: StateSpaceModel, data) -> FilterState:
    """Filter ``data`` and return the terminal state with the accumulated log-likelihood."""
    y = np.asarray(data, dtype=np.float64).ravel()
    v, F, term = run_filter(model, y)
    if v is None:
        raise FloatingPointError("Kalman filter broke down")
    s2 = model.innovation_variance
    ll = float(-0.5 * (len(y) * (LOG_2PI + math.log(s2)) + np.log(F).sum()
                       + (v[:, 0] ** 2 / F).sum() / s2))
    return FilterState(term.state_mean[:, 0], term.state_cov * s2, ll, term.t)


def one_step_predictions(model: StateSpaceModel, data) -> np.ndarray:
    """Prediction of each y_t from y_0..y_{t-1} (the filter's own one-step means)."""
    y = np.asarray(data, dtype=np.float64).ravel()
    v, _, _ = run_filter(model, y)
    if v is None:
        raise FloatingPointError("Kalman filter broke down")
    return y - v[:, 0]


def kalman_update(model: StateSpaceModel, state: FilterState, y: float) -> FilterState:
    """Absorb one observation into a filtered state (covariance in sigma2 units)."""
    T = model.transition
    R = model.state_loading
    s2 = model.innovation_variance
    a = T @ state.state_mean
    P = T @ state.state_cov @ T.T + s2 * np.outer(R, R)
    f = P[0, 0]
    e = y - a[0]
    k = P[:, 0] / f
    Pf = P - np.outer(k, P[0, :])
    Pf = 0.5 * (Pf + Pf.T)
    ll = -0.5 * (LOG_2PI + math.log(f) + e * e / f)
    return FilterState(a + k * e, Pf, state.loglik_accum + ll, state.t + 1)


def advance(model: StateSpaceModel, state: FilterState, steps: int) -> FilterState:
    """Propagate a filtered state ``steps`` periods ahead without observations."""
    T = model.transition
    RR = model.innovation_variance * np.outer(model.state_loading, model.state_loading)
    a, P = state.state_mean, state.state_cov
    for _ in range(steps):
        a = T @ a
        P = T @ P @ T.T + RR
    return FilterState(a, 0.5 * (P + P.T), state.loglik_accum, state.t + steps)


def kalman_forecast(model: StateSpaceModel, terminal: FilterState, horizon: int):
    """h-step-ahead predictive (mean, variance) pairs for h = 1..horizon.

    ``terminal.state_cov`` must be in data units (as produced by
    :func:`kalman_filter`).
    """
    T = model.transition
    RR = model.innovation_variance * np.outer(model.state_loading, model.state_loading)
    a, P = terminal.state_mean, terminal.state_cov
    out = []
    for _ in range(horizon):
        a = T @ a
        P = T @ P @ T.T + RR
        out.append((float(a[0]), float(P[0, 0])))
    return out


def profile_loglik(model: StateSpaceModel, y, X=None):
    """Log-likelihood concentrated over sigma2 and regression coefficients.

    Models ``y = X beta + u`` with ``u`` following ``model`` (its sigma2 is
    ignored). beta is the GLS estimate, obtained by filtering y and every
    column of X through the same gains. Returns ``(loglik, sigma2, beta)`` or
    ``(-inf, nan, None)`` on breakdown.
    """
    y = np.asarray(y, dtype=np.float64).ravel()
    n = len(y)
    cols = [y[:, None]]
    if X is not None and X.shape[1]:
        cols.append(np.asarray(X, dtype=np.float64))
    Y = np.hstack(cols)
    try:
        v, F, _ = run_filter(model, Y)
    except (ValueError, np.linalg.LinAlgError):
        return -math.inf, math.nan, None
    if v is None:
        return -math.inf, math.nan, None
    w = v / np.sqrt(F)[:, None]
    vy = w[:, 0]
    if Y.shape[1] > 1:
        vx = w[:, 1:]
        beta, *_ = np.linalg.lstsq(vx, vy, rcond=None)
        resid = vy - vx @ beta
    else:
        beta = np.zeros(0)
        resid = vy
    ssr = float(resid @ resid)
    if not (ssr > 0 and math.isfinite(ssr)):
        return -math.inf, math.nan, None
    sigma2 = ssr / n
    ll = -0.5 * (n * (LOG_2PI + math.log(sigma2) + 1.0) + float(np.log(F).sum()))
    return ll, sigma2, beta
