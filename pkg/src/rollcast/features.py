"""Calendar indicator features used as SARIMAX exogenous regressors."""
from __future__ import annotations

import io
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Sequence

import numpy as np

# Eight contiguous, left-closed 3-hour buckets. "midnight" is the dropped reference.
DAY_PARTS = (
    "midnight", "late_night", "early_morning", "morning",
    "afternoon", "late_afternoon", "evening", "night",
)
REFERENCE_PART = "midnight"
FEATURE_NAMES = tuple(p for p in DAY_PARTS if p != REFERENCE_PART) + ("weekend",)


@dataclass(frozen=True, eq=False)
class ExogMatrix:
    column_names: tuple[str, ...]
    rows: np.ndarray  # (n, n_features)

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.float64).reshape(-1, len(self.column_names))
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "column_names", tuple(self.column_names))

    def __len__(self) -> int:
        return self.rows.shape[0]

    @property
    def n_features(self) -> int:
        return len(self.column_names)

    def slice(self, start: int, stop: int | None = None) -> "ExogMatrix":
        return ExogMatrix(self.column_names, self.rows[start:stop])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.column_names) + "\n")
        for row in self.rows:
            buf.write(",".join(f"{v:g}" for v in row) + "\n")
        return buf.getvalue()


def day_part(ts: datetime) -> str:
    if ts.tzinfo is not None:
        ts = ts.astimezone(timezone.utc)
    return DAY_PARTS[ts.hour // 3]


def extract_features(timestamps: Sequence[datetime]) -> ExogMatrix:
    """One-hot day-part indicators (midnight dropped) plus a weekend flag, in GMT."""
    rows = np.zeros((len(timestamps), len(FEATURE_NAMES)))
    index = {name: j for j, name in enumerate(FEATURE_NAMES)}
    for i, ts in enumerate(timestamps):
        if ts.tzinfo is not None:
            ts = ts.astimezone(timezone.utc)
        part = DAY_PARTS[ts.hour // 3]
        if part != REFERENCE_PART:
            rows[i, index[part]] = 1.0
        if ts.weekday() >= 5:
            rows[i, index["weekend"]] = 1.0
    return ExogMatrix(FEATURE_NAMES, rows)
