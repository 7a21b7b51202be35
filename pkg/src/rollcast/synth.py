"""Seeded synthetic traffic telemetry: daily SARIMA noise around a diurnal profile."""
from __future__ import annotations

import math
from datetime import datetime, timedelta, timezone

import numpy as np

from .sarimax import ModelOrder, SarimaxParams, SeasonalOrder, simulate
from .series import RawRecord, SECONDS_PER_DAY


def traffic_profile(n: int, samples_per_day: int, base_gbps: float = 5.0,
                    amplitude_gbps: float = 2.0, weekend_dip: float = 0.15,
                    start_weekday: int = 0) -> np.ndarray:
    """Deterministic diurnal shape (Gbps): evening peak, early-morning trough, weekend dip."""
    t = np.arange(n)
    phase = 2 * math.pi * (t % samples_per_day) / samples_per_day
    day = (t // samples_per_day + start_weekday) % 7
    shape = -np.cos(phase - 0.6) + 0.35 * np.sin(2 * phase)
    weekend = np.where(day >= 5, 1.0 - weekend_dip, 1.0)
    return (base_gbps + amplitude_gbps * shape) * weekend


def synthetic_gbps(n: int, samples_per_day: int, rng: np.random.Generator,
                   noise_gbps: float = 0.25, phi: float = 0.6, seasonal_phi: float = 0.3,
                   level_shift: float = 0.0, shift_at: int | None = None,
                   start_weekday: int = 0) -> np.ndarray:
    """Profile plus SARIMA(1,0,0)(1,0,0,samples_per_day) noise, optionally level-shifted.

    ``level_shift`` multiplies every value from index ``shift_at`` on by
    ``1 + level_shift``.
    """
    noise = simulate(n, ModelOrder(1, 0, 0), SeasonalOrder(1, 0, 0, samples_per_day),
                     SarimaxParams(phi=[phi], seasonal_phi=[seasonal_phi], sigma2=1.0), rng=rng)
    scale = noise_gbps * math.sqrt((1 - phi**2) * (1 - seasonal_phi**2))
    y = traffic_profile(n, samples_per_day, start_weekday=start_weekday) + scale * noise
    y = np.maximum(y, 0.05)
    if level_shift and shift_at is not None:
        y[shift_at:] *= 1.0 + level_shift
    return y


def synthetic_records(days: int = 29, interval_seconds: int = 3600, seed: int = 0,
                      partial_day_samples: int = 0, missing_fraction: float = 0.0,
                      level_shift: float = 0.0, shift_day: float | None = None,
                      start: datetime | None = None) -> list[RawRecord]:
    """Raw bps records; missing values are dropped grid slots or null values."""
    rng = np.random.default_rng(seed)
    per_day = SECONDS_PER_DAY // interval_seconds
    n = days * per_day + partial_day_samples
    start = start or datetime(2021, 3, 1, tzinfo=timezone.utc)
    shift_at = None if shift_day is None else int(shift_day * per_day)
    gbps = synthetic_gbps(n, per_day, rng, level_shift=level_shift, shift_at=shift_at,
                          start_weekday=start.weekday())
    missing = rng.random(n) < missing_fraction
    missing[0] = missing[-1] = False
    out = []
    step = timedelta(seconds=interval_seconds)
    for i in range(n):
        if missing[i] and i % 2:
            continue  # absent record -> gap on the grid
        value = None if missing[i] else round(float(gbps[i]) * 1e9, 3)
        out.append(RawRecord(start + i * step, value))
    return out
