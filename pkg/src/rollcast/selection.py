"""AIC-ranked grid search over (p, d, q) orders."""
from __future__ import annotations

import io
import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import sarimax
from .sarimax import ModelOrder, NO_SEASON, SeasonalOrder

CONVERGED = "converged"
NOT_CONVERGED = "not_converged"
TIMEOUT = "timeout"
FAILED = "failed"


@dataclass(frozen=True)
class GridSpec:
    p_values: tuple[int, ...]
    q_values: tuple[int, ...]
    d: int = 0
    seasonal: SeasonalOrder = NO_SEASON
    exog: bool = False
    mean: bool | None = None
    timeout_per_candidate: float = 60.0

    def __post_init__(self):
        if not self.p_values or not self.q_values:
            raise ValueError("p_values and q_values must be non-empty")
        object.__setattr__(self, "p_values", tuple(sorted(set(int(p) for p in self.p_values))))
        object.__setattr__(self, "q_values", tuple(sorted(set(int(q) for q in self.q_values))))

    def orders(self) -> list[ModelOrder]:
        return [ModelOrder(p, self.d, q) for p, q in itertools.product(self.p_values, self.q_values)]


@dataclass(frozen=True)
class Candidate:
    order: ModelOrder
    seasonal: SeasonalOrder
    aic: float
    loglik: float
    status: str
    seconds: float
    message: str = ""

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


class GridSearchError(RuntimeError):
    def __init__(self, candidates):
        self.candidates = candidates
        detail = "; ".join(f"{tuple(c.order)}: {c.status} {c.message}" for c in candidates)
        super().__init__(f"every grid candidate failed: {detail}")


def _rank_key(c: Candidate):
    p, _, q = c.order
    return (not c.converged, c.aic if c.aic == c.aic else np.inf, p + q, p, q)


@dataclass(frozen=True)
class RankedCandidates:
    rows: tuple[Candidate, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def top(self, n: int) -> "RankedCandidates":
        return RankedCandidates(self.rows[:n])

    def to_csv(self, include_seconds: bool = True) -> str:
        buf = io.StringIO()
        cols = "p,d,q,P,D,Q,S,aic,loglik,status"
        buf.write(cols + (",seconds\n" if include_seconds else "\n"))
        for c in self.rows:
            line = ",".join(str(v) for v in (*c.order, *c.seasonal))
            line += f",{c.aic:.6f},{c.loglik:.6f},{c.status}"
            if include_seconds:
                line += f",{c.seconds:.3f}"
            buf.write(line + "\n")
        return buf.getvalue()


def rank(candidates) -> RankedCandidates:
    """Converged rows by ascending AIC (ties: smaller p+q, then p); the rest below."""
    return RankedCandidates(tuple(sorted(candidates, key=_rank_key)))


def best(ranked: RankedCandidates) -> ModelOrder:
    ok = [c for c in ranked.rows if c.converged]
    if not ok:
        raise ValueError("no converged candidate to choose from")
    return min(ok, key=_rank_key).order


def _evaluate(args) -> Candidate:
    y, order, seasonal, exog, mean, timeout, seed = args
    t0 = time.monotonic()
    try:
        fitted = sarimax.fit(y, order, seasonal, exog, mean=mean, seed=seed,
                             deadline=t0 + timeout if timeout else None)
    except sarimax.FitTimeout:
        return Candidate(order, seasonal, np.nan, np.nan, TIMEOUT, time.monotonic() - t0,
                         f"exceeded {timeout:g}s")
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        return Candidate(order, seasonal, np.nan, np.nan, FAILED, time.monotonic() - t0, str(exc))
    status = CONVERGED if fitted.converged else NOT_CONVERGED
    return Candidate(order, seasonal, fitted.aic, fitted.loglik, status,
                     time.monotonic() - t0, fitted.message)


def grid_search(series, spec: GridSpec, exog=None, jobs: int = 1, seed: int = 0) -> RankedCandidates:
    """Fit every order in the grid and rank by AIC.

    Candidates run in a process pool when ``jobs > 1``; the ranking does not
    depend on completion order. Timeouts and failures stay in the table with
    their status.
    """
    y = np.asarray(getattr(series, "values", series), dtype=np.float64)
    if spec.exog and exog is None:
        raise ValueError("grid spec requests exogenous regressors but none were given")
    x = exog if spec.exog else None
    tasks = [(y, o, spec.seasonal, x, spec.mean, spec.timeout_per_candidate, seed) for o in spec.orders()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate, tasks))
    else:
        results = [_evaluate(t) for t in tasks]
    if all(r.status in (FAILED, TIMEOUT) for r in results):
        raise GridSearchError(results)
    return rank(results)
