"""Traffic time-series data model: ingestion, cleaning, rescaling and splitting.

Raw telemetry arrives as (timestamp, bps) records. The pipeline is

    records -> ingest_raw -> trim_incomplete_days -> impute_mean -> rescale_to_gbps

after which the series is a gap-free :class:`TimeSeries` in Gbps on a uniform grid.
All timestamps are timezone-aware UTC (GMT).
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SECONDS_PER_DAY = 86400
GIGA = 1e-9


class ValidationError(ValueError):
    """Input telemetry violates a structural requirement."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _utc(ts: datetime) -> datetime:
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def parse_timestamp(text: str) -> datetime:
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    return _utc(datetime.fromisoformat(text))


def format_timestamp(ts: datetime) -> str:
    return _utc(ts).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class RawRecord:
    timestamp: datetime
    value: float | None
    line: int | None = field(default=None, compare=False)   # source line, for error messages

    def __post_init__(self):
        object.__setattr__(self, "timestamp", _utc(self.timestamp))
        v = self.value
        if v is not None:
            v = float(v)
            if not math.isfinite(v) or v < 0:
                raise ValidationError(f"value at {format_timestamp(self.timestamp)} must be finite and >= 0, got {v}")
            object.__setattr__(self, "value", v)


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RawSeries:
    """Values on a uniform grid; ``nan`` marks a missing entry.

    ``unit`` is ``"bps"`` until rescaled. ``imputed`` counts entries filled by
    :func:`impute_mean`.
    """

    start: datetime
    interval_seconds: int
    values: np.ndarray
    unit: str = "bps"
    imputed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "start", _utc(self.start))
        object.__setattr__(self, "values", _readonly(self.values))
        _check_interval(self.interval_seconds)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def samples_per_day(self) -> int:
        return SECONDS_PER_DAY // self.interval_seconds

    @property
    def n_missing(self) -> int:
        return int(np.isnan(self.values).sum())

    def timestamps(self) -> list[datetime]:
        step = timedelta(seconds=self.interval_seconds)
        return [self.start + i * step for i in range(len(self.values))]


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Gap-free, uniformly sampled series. The ``y_t`` every model consumes."""

    start: datetime
    interval_seconds: int
    values: np.ndarray
    unit: str = "Gbps"
    imputed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "start", _utc(self.start))
        object.__setattr__(self, "values", _readonly(self.values))
        _check_interval(self.interval_seconds)
        if self.values.ndim != 1 or len(self.values) < 1:
            raise ValidationError("time series must be one-dimensional with at least one value")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("time series values must all be finite")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def samples_per_day(self) -> int:
        return SECONDS_PER_DAY // self.interval_seconds

    def timestamp_at(self, i: int) -> datetime:
        return self.start + timedelta(seconds=self.interval_seconds * i)

    def timestamps(self, extra: int = 0) -> list[datetime]:
        """Grid instants for every value, plus ``extra`` future steps."""
        return [self.timestamp_at(i) for i in range(len(self.values) + extra)]

    def with_values(self, values, start_index: int = 0) -> "TimeSeries":
        return replace(self, start=self.timestamp_at(start_index), values=values)

    @classmethod
    def from_values(cls, values, interval_seconds: int = 300,
                    start: datetime | None = None, unit: str = "Gbps") -> "TimeSeries":
        if start is None:
            start = datetime(2021, 1, 1, tzinfo=timezone.utc)
        return cls(start=start, interval_seconds=interval_seconds, values=values, unit=unit)


def _check_interval(interval_seconds: int) -> None:
    if interval_seconds <= 0 or SECONDS_PER_DAY % interval_seconds:
        raise ValidationError(f"interval_seconds must be a positive divisor of 86400, got {interval_seconds}")


@dataclass(frozen=True)
class SplitSpec:
    train_len: int
    test_len: int

    def __post_init__(self):
        if self.train_len < 1 or self.test_len < 1:
            raise ValidationError("train_len and test_len must both be >= 1")

    @classmethod
    def from_days(cls, train_days: int, test_days: int, samples_per_day: int) -> "SplitSpec":
        return cls(train_days * samples_per_day, test_days * samples_per_day)


# --- pipeline --------------------------------------------------------------

def ingest_raw(records: Sequence[RawRecord], interval_seconds: int = 300) -> RawSeries:
    """Project records onto a uniform grid anchored at the first timestamp.

    Grid gaps become ``nan``. A record more than one second off the grid is
    rejected, as are duplicate and out-of-order timestamps.
    """
    _check_interval(interval_seconds)
    if not records:
        raise ValidationError("no records to ingest")
    start = records[0].timestamp
    slots: list[int] = []
    prev: datetime | None = None
    for i, rec in enumerate(records, start=1):
        ts, line = rec.timestamp, rec.line or i
        if prev is not None:
            if ts == prev:
                raise ValidationError(f"duplicate timestamp {format_timestamp(ts)}", line)
            if ts < prev:
                raise ValidationError(
                    f"timestamps not increasing: {format_timestamp(ts)} after {format_timestamp(prev)}", line)
        offset = (ts - start).total_seconds()
        slot = round(offset / interval_seconds)
        if abs(offset - slot * interval_seconds) > 1.0:
            raise ValidationError(
                f"timestamp {format_timestamp(ts)} is off the {interval_seconds}s grid", line)
        if slots and slot == slots[-1]:
            raise ValidationError(f"duplicate grid slot at {format_timestamp(ts)}", line)
        slots.append(slot)
        prev = ts
    values = np.full(slots[-1] + 1, np.nan)
    for slot, rec in zip(slots, records):
        if rec.value is not None:
            values[slot] = rec.value
    return RawSeries(start=start, interval_seconds=interval_seconds, values=values)


def trim_incomplete_days(series: RawSeries | TimeSeries):
    """Drop the trailing partial day. Days are counted from midnight GMT."""
    start = series.start
    midnight = start.replace(hour=0, minute=0, second=0, microsecond=0)
    if start != midnight:
        raise ValidationError(f"series must start at midnight GMT, starts at {format_timestamp(start)}")
    per_day = series.samples_per_day
    full_days = len(series.values) // per_day
    if full_days < 1:
        raise ValidationError(f"series has {len(series.values)} samples, fewer than one day ({per_day})")
    return replace(series, values=series.values[: full_days * per_day])


def impute_mean(series: RawSeries) -> RawSeries:
    """Fill missing entries with the global mean of the observed entries."""
    values = np.array(series.values)
    missing = np.isnan(values)
    if missing.all():
        raise ValidationError("every entry is missing; cannot impute")
    if missing.any():
        values[missing] = values[~missing].mean()
    return replace(series, values=values, imputed=series.imputed + int(missing.sum()))


def rescale_to_gbps(series: RawSeries) -> TimeSeries:
    if np.isnan(series.values).any():
        raise ValidationError("rescale requires a series without missing entries")
    return TimeSeries(start=series.start, interval_seconds=series.interval_seconds,
                      values=series.values * GIGA, unit="Gbps", imputed=series.imputed)


def split(series: TimeSeries, spec: SplitSpec) -> tuple[TimeSeries, TimeSeries]:
    n = len(series)
    if spec.train_len + spec.test_len > n:
        raise ValidationError(
            f"split {spec.train_len}+{spec.test_len} exceeds series length {n}")
    train = series.with_values(series.values[: spec.train_len])
    test = series.with_values(series.values[spec.train_len: spec.train_len + spec.test_len],
                              start_index=spec.train_len)
    return train, test


def preprocess(records: Sequence[RawRecord], interval_seconds: int = 300,
               trim: bool = True) -> TimeSeries:
    raw = ingest_raw(records, interval_seconds)
    if trim:
        raw = trim_incomplete_days(raw)
    return rescale_to_gbps(impute_mean(raw))


# --- file formats ------------------------------------------------------------

def _record_from_obj(obj: dict, line: int) -> RawRecord:
    try:
        ts = parse_timestamp(str(obj["timestamp"]))
    except KeyError:
        raise ValidationError("record has no 'timestamp' field", line) from None
    except ValueError as exc:
        raise ValidationError(f"bad timestamp: {exc}", line) from None
    value = obj.get("value")
    if value is not None and not isinstance(value, (int, float)):
        try:
            value = float(value) if str(value).strip() else None
        except ValueError:
            raise ValidationError(f"bad value {value!r}", line) from None
    try:
        return RawRecord(ts, value, line)
    except ValidationError as exc:
        raise ValidationError(str(exc), line) from None


def parse_records(text: str, fmt: str | None = None) -> list[RawRecord]:
    """Parse JSON (array or newline-delimited) or ``timestamp,value`` CSV."""
    stripped = text.lstrip()
    if fmt is None:
        fmt = "json" if stripped.startswith(("[", "{")) else "csv"
    if fmt == "json":
        if stripped.startswith("["):
            try:
                objs = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"invalid JSON: {exc.msg}", exc.lineno) from None
            return [_record_from_obj(o, i) for i, o in enumerate(objs, start=1)]
        out = []
        for i, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"invalid JSON: {exc.msg}", i) from None
            out.append(_record_from_obj(obj, i))
        return out
    reader = csv.reader(io.StringIO(text))
    header = [h.strip() for h in next(reader, [])]
    if header[:2] != ["timestamp", "value"]:
        raise ValidationError(f"CSV header must be 'timestamp,value', got {','.join(header)!r}", 1)
    out = []
    for i, row in enumerate(reader, start=2):
        if not row:
            continue
        out.append(_record_from_obj({"timestamp": row[0], "value": row[1] if len(row) > 1 else None}, i))
    return out


def read_records(path: str | Path) -> list[RawRecord]:
    path = Path(path)
    fmt = "csv" if path.suffix.lower() == ".csv" else None
    return parse_records(path.read_text(), fmt)


def write_records(records: Iterable[RawRecord], path: str | Path) -> None:
    """Write records as a JSON array (the raw telemetry format)."""
    objs = [{"timestamp": format_timestamp(r.timestamp), "value": r.value} for r in records]
    Path(path).write_text(json.dumps(objs, indent=0) + "\n")


def to_canonical_csv(series: TimeSeries) -> str:
    buf = io.StringIO()
    buf.write("timestamp,value_gbps\n")
    for ts, v in zip(series.timestamps(), series.values):
        buf.write(f"{format_timestamp(ts)},{v:.9g}\n")
    return buf.getvalue()


def write_canonical_csv(series: TimeSeries, path: str | Path) -> None:
    Path(path).write_text(to_canonical_csv(series))


def read_canonical_csv(path: str | Path) -> TimeSeries:
    rows = list(csv.reader(Path(path).read_text().splitlines()))
    if not rows or [h.strip() for h in rows[0][:2]] != ["timestamp", "value_gbps"]:
        raise ValidationError("canonical CSV header must be 'timestamp,value_gbps'", 1)
    rows = [r for r in rows[1:] if r]
    if not rows:
        raise ValidationError("canonical CSV has no data rows", 2)
    stamps = [parse_timestamp(r[0]) for r in rows]
    if len(stamps) > 1:
        interval = int(round((stamps[1] - stamps[0]).total_seconds()))
    else:
        interval = 300
    return TimeSeries(start=stamps[0], interval_seconds=interval,
                      values=[float(r[1]) for r in rows])


def load_series(path: str | Path, interval_seconds: int = 300, trim: bool = True) -> TimeSeries:
    """Load a canonical CSV directly, or run raw telemetry through :func:`preprocess`."""
    path = Path(path)
    with path.open() as fh:
        head = fh.readline()
    if head.strip().startswith("timestamp,value_gbps"):
        return read_canonical_csv(path)
    return preprocess(read_records(path), interval_seconds, trim=trim)
