"""Command-line pipeline: synth, ingest, preprocess, diagnose, gridsearch, fit, forecast, evaluate.

Configuration is one JSON document. Precedence, lowest to highest: built-in
defaults, ``--config`` file, command-line flags. Every subcommand writes into
``--out`` together with a ``manifest.json``.

Exit codes: 0 success, 2 validation error, 3 partial failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import platform
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, diagnostics, evaluation, holtwinters, sarimax, selection, serialize, synth
from .evaluation import PredictorSpec
from .features import extract_features
from .sarimax import ModelOrder, SeasonalOrder
from .series import (SplitSpec, TimeSeries, ValidationError, format_timestamp, impute_mean,
                     ingest_raw, load_series, read_records, rescale_to_gbps, split,
                     trim_incomplete_days, write_canonical_csv, write_records)

log = logging.getLogger("rollcast")

EXIT_OK, EXIT_INVALID, EXIT_PARTIAL = 0, 2, 3


@dataclass
class RunConfig:
    input: str | None = None
    out: str = "run"
    interval_seconds: int = 3600
    trim: bool = True
    train_days: int = 21
    test_days: int = 8
    models: list = field(default_factory=lambda: ["arima", "sarima", "sarimax", "holt_winters"])
    order: list = field(default_factory=lambda: [2, 1, 1])
    seasonal_order: list = field(default_factory=lambda: [1, 0, 1, 24])
    features: bool = True
    mean: bool | None = None
    hw_period: int | None = None
    hw_reoptimize: bool = True
    refit_interval: int = 1
    filter_only: bool = False
    grid_p: list = field(default_factory=lambda: list(range(0, 25)))
    grid_q: list = field(default_factory=lambda: list(range(0, 25)))
    grid_d: int = 1
    grid_seasonal: list | None = None
    timeout_per_candidate: float = 60.0
    top: int = 10
    horizon: int = 24
    model_path: str | None = None
    n_lags: int = 48
    adf_max_lag: int | None = None
    decomposition_period: int | None = None
    seed: int = 0
    jobs: int = 1
    synth_days: int = 29
    synth_partial_day_samples: int = 7
    synth_missing_fraction: float = 0.01
    synth_level_shift: float = 0.0
    synth_shift_day: float | None = None

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**doc)

    def predictor_specs(self) -> list[PredictorSpec]:
        order = ModelOrder(*self.order)
        seas = SeasonalOrder(*self.seasonal_order)
        refit = None if self.filter_only else self.refit_interval
        specs = []
        for name in self.models:
            kw = dict(model_type=name, order=order, refit_interval=refit, mean=self.mean, name=name)
            if name in ("sarima", "sarimax"):
                kw["seasonal"] = seas
            if name == "sarimax":
                kw["exog"] = self.features
            if name == "holt_winters":
                kw.update(hw_period=self.hw_period,
                          hw_reoptimize=self.hw_reoptimize and not self.filter_only)
            specs.append(PredictorSpec(**kw))
        return specs


# --- helpers -------------------------------------------------------------------------

def _versions() -> dict:
    import numba
    import scipy
    return {"rollcast": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__, "numba": numba.__version__}


def _write_manifest(out: Path, command: str, cfg: RunConfig, started: float, statuses=None) -> None:
    doc = {
        "command": command,
        "config": asdict(cfg),
        "seed": cfg.seed,
        "versions": _versions(),
        "started_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "wall_clock_seconds": round(time.perf_counter() - started, 3),
    }
    if statuses is not None:
        doc["statuses"] = statuses
    (out / "manifest.json").write_text(json.dumps(doc, indent=2) + "\n")


def _require_input(cfg: RunConfig) -> Path:
    if not cfg.input:
        raise ValidationError("no input file given (--input or config 'input')")
    path = Path(cfg.input)
    if not path.exists():
        raise ValidationError(f"input file {path} does not exist")
    return path


def _load(cfg: RunConfig) -> TimeSeries:
    return load_series(_require_input(cfg), cfg.interval_seconds, trim=cfg.trim)


def _train_test(cfg: RunConfig, series: TimeSeries):
    spec = SplitSpec.from_days(cfg.train_days, cfg.test_days, series.samples_per_day)
    return split(series, spec)


def _fit_spec(spec: PredictorSpec, train: TimeSeries, seed: int):
    if spec.model_type == "holt_winters":
        return holtwinters.fit(train.values, spec.hw_period or train.samples_per_day)
    exog = extract_features(train.timestamps()) if spec.exog else None
    return sarimax.fit(train.values, spec.order, spec.seasonal, exog, mean=spec.mean, seed=seed)


# --- subcommands ---------------------------------------------------------------------

def cmd_synth(cfg: RunConfig, out: Path, statuses: dict) -> int:
    records = synth.synthetic_records(
        days=cfg.synth_days, interval_seconds=cfg.interval_seconds, seed=cfg.seed,
        partial_day_samples=cfg.synth_partial_day_samples,
        missing_fraction=cfg.synth_missing_fraction, level_shift=cfg.synth_level_shift,
        shift_day=cfg.synth_shift_day)
    write_records(records, out / "synthetic.json")
    print(f"wrote {len(records)} records to {out / 'synthetic.json'}")
    return EXIT_OK


def _ingest(cfg: RunConfig, out: Path, statuses: dict, trim: bool) -> int:
    raw = ingest_raw(read_records(_require_input(cfg)), cfg.interval_seconds)
    if trim:
        raw = trim_incomplete_days(raw)
    filled = impute_mean(raw)
    series = rescale_to_gbps(filled)
    write_canonical_csv(series, out / "series.csv")
    print(f"imputed {filled.imputed} missing values with the global mean", file=sys.stderr)
    statuses["imputation"] = f"global mean, {filled.imputed} values"
    print(f"wrote {len(series)} values to {out / 'series.csv'}")
    return EXIT_OK


def cmd_ingest(cfg: RunConfig, out: Path, statuses: dict) -> int:
    return _ingest(cfg, out, statuses, trim=False)


def cmd_preprocess(cfg: RunConfig, out: Path, statuses: dict) -> int:
    return _ingest(cfg, out, statuses, trim=cfg.trim)


def cmd_diagnose(cfg: RunConfig, out: Path, statuses: dict) -> int:
    series = _load(cfg)
    y = series.values
    period = cfg.decomposition_period or series.samples_per_day
    adf_level = diagnostics.adf_test(y, cfg.adf_max_lag)
    adf_diff = diagnostics.adf_test(np.diff(y), cfg.adf_max_lag)
    r = diagnostics.acf(y, cfg.n_lags)
    pr = diagnostics.pacf(y, cfg.n_lags)
    dec = diagnostics.decompose_additive(y, period)

    def adf_doc(res):
        return {"statistic": res.statistic, "p_value": res.p_value, "used_lags": res.used_lags,
                "n_obs": res.n_obs, "critical_values": res.critical_values}

    doc = {
        "n_obs": len(y),
        "adf": adf_doc(adf_level),
        "adf_first_difference": adf_doc(adf_diff),
        "acf": r.values.tolist(),
        "pacf": pr.values.tolist(),
        "confidence_band": r.confidence_band,
        "decomposition_period": period,
        "strongest_period": diagnostics.strongest_period(y, min(len(y) - 1, 2 * series.samples_per_day)),
    }
    (out / "diagnostics.json").write_text(json.dumps(doc, indent=2) + "\n")
    lines = ["timestamp,original,trend,seasonal,residual"]
    for ts, o, t, s, e in zip(series.timestamps(), dec.observed, dec.trend, dec.seasonal, dec.residual):
        lines.append(f"{format_timestamp(ts)},{o:.9g},{t:.9g},{s:.9g},{e:.9g}")
    (out / "decomposition.csv").write_text("\n".join(lines) + "\n")
    print(f"ADF statistic {adf_level.statistic:.6f} (p={adf_level.p_value:.4f}); "
          f"first difference {adf_diff.statistic:.6f} (p={adf_diff.p_value:.4f})")
    return EXIT_OK


def cmd_gridsearch(cfg: RunConfig, out: Path, statuses: dict) -> int:
    series = _load(cfg)
    train, _ = _train_test(cfg, series)
    seas = SeasonalOrder(*cfg.grid_seasonal) if cfg.grid_seasonal else SeasonalOrder()
    spec = selection.GridSpec(tuple(cfg.grid_p), tuple(cfg.grid_q), cfg.grid_d, seas,
                              mean=cfg.mean, timeout_per_candidate=cfg.timeout_per_candidate)
    ranked = selection.grid_search(train.values, spec, jobs=cfg.jobs, seed=cfg.seed)
    (out / "gridsearch.csv").write_text(ranked.to_csv())
    print(ranked.top(cfg.top).to_csv(include_seconds=False), end="")
    bad = [c for c in ranked if not c.converged]
    return EXIT_PARTIAL if bad else EXIT_OK


def cmd_fit(cfg: RunConfig, out: Path, statuses: dict) -> int:
    series = _load(cfg)
    train, _ = _train_test(cfg, series)
    for spec in cfg.predictor_specs():
        try:
            model = _fit_spec(spec, train, cfg.seed)
        except (ValueError, FloatingPointError) as exc:
            statuses[spec.label] = f"failed: {exc}"
            continue
        serialize.save(model, out / f"model_{spec.label}.json")
        converged = getattr(model, "converged", True)
        statuses[spec.label] = "ok" if converged else "not_converged"
        print(f"{spec.label}: wrote {out / f'model_{spec.label}.json'}")
    return EXIT_OK if all(v == "ok" for v in statuses.values()) else EXIT_PARTIAL


def cmd_forecast(cfg: RunConfig, out: Path, statuses: dict) -> int:
    series = _load(cfg)
    train, _ = _train_test(cfg, series)
    paths = [Path(cfg.model_path)] if cfg.model_path else sorted(out.glob("model_*.json"))
    if not paths:
        raise ValidationError("no model files found; run 'fit' first or pass model_path")
    future = train.timestamps(extra=cfg.horizon)[len(train):]
    for path in paths:
        model = serialize.load(path)
        if isinstance(model, sarimax.FittedModel):
            if model.exog_names:
                exog = extract_features(train.timestamps())
                fut = extract_features(future)
                preds = sarimax.forecast(model, train.values, cfg.horizon, fut, exog)
            else:
                preds = sarimax.forecast(model, train.values, cfg.horizon)
        else:
            preds = holtwinters.forecast(model.state, cfg.horizon)
        name = path.stem.removeprefix("model_")
        lines = ["timestamp,predicted_gbps"] + [f"{format_timestamp(t)},{p:.9g}" for t, p in zip(future, preds)]
        (out / f"forecast_{name}.csv").write_text("\n".join(lines) + "\n")
        print(f"{name}: wrote {out / f'forecast_{name}.csv'}")
    return EXIT_OK


def cmd_evaluate(cfg: RunConfig, out: Path, statuses: dict) -> int:
    series = _load(cfg)
    train, test = _train_test(cfg, series)
    report = evaluation.compare(cfg.predictor_specs(), train, test, jobs=cfg.jobs, seed=cfg.seed)
    (out / "report.csv").write_text(report.to_csv())
    for row in report.rows:
        if row.error:
            statuses[row.model] = f"failed: {row.error}"
            continue
        for trace in (row.standard, row.rolling):
            (out / f"trace_{row.model}_{trace.mode}.csv").write_text(trace.to_csv(test))
        statuses[row.model] = "ok" if not row.rolling.warnings else f"ok with {len(row.rolling.warnings)} warnings"
    print(report.to_csv(), end="")
    return EXIT_PARTIAL if report.failed else EXIT_OK


COMMANDS = {
    "synth": cmd_synth, "ingest": cmd_ingest, "preprocess": cmd_preprocess,
    "diagnose": cmd_diagnose, "gridsearch": cmd_gridsearch, "fit": cmd_fit,
    "forecast": cmd_forecast, "evaluate": cmd_evaluate,
}

# flag -> config key
_FLAG_KEYS = {"input": "input", "out": "out", "seed": "seed", "jobs": "jobs", "top": "top",
              "refit_interval": "refit_interval", "filter_only": "filter_only",
              "horizon": "horizon", "model": "model_path"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rollcast", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("input", nargs="?", help="input telemetry (JSON/CSV) or canonical series CSV")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--jobs", type=int)
        p.add_argument("--top", type=int)
        p.add_argument("--refit-interval", type=int)
        p.add_argument("--filter-only", action="store_true", default=None)
        p.add_argument("--horizon", type=int)
        p.add_argument("--model", help="model JSON for 'forecast'")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    doc: dict = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config is not valid JSON: {exc.msg}", exc.lineno) from None
        if not isinstance(doc, dict):
            raise ValidationError("config must be a JSON object")
    cfg = RunConfig.from_dict(doc)
    for flag, key in _FLAG_KEYS.items():
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg, key, value)
    return cfg


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        cfg = load_config(args)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        statuses: dict = {}
        code = COMMANDS[args.command](cfg, out, statuses)
    except (ValidationError, selection.GridSearchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _write_manifest(out, args.command, cfg, started, statuses or None)
    return code


if __name__ == "__main__":
    sys.exit(main())
