"""JSON envelopes for fitted models.

Floats are written with Python's shortest round-trip repr, so loading a
document restores every parameter bit-for-bit.
"""
from __future__ import annotations

import json
from pathlib import Path

from . import __version__
from .holtwinters import HwFit, HwParams, HwState
from .sarimax import FittedModel, ModelOrder, SarimaxParams, SeasonalOrder

SARIMAX_TYPE = "sarimax"
HW_TYPE = "holt_winters_additive"


def sarimax_to_dict(model: FittedModel) -> dict:
    p = model.params
    return {
        "model_type": SARIMAX_TYPE,
        "version": __version__,
        "order": list(model.order),
        "seasonal_order": list(model.seasonal),
        "params": {
            "phi": list(p.phi), "theta": list(p.theta),
            "seasonal_phi": list(p.seasonal_phi), "seasonal_theta": list(p.seasonal_theta),
            "beta": list(p.beta), "sigma2": p.sigma2,
        },
        "regressors": list(model.regressor_names),
        "exog_names": list(model.exog_names),
        "deterministic": model.deterministic,
        "loglik": model.loglik,
        "aic": model.aic,
        "n_obs_effective": model.n_obs_effective,
        "converged": model.converged,
        "message": model.message,
    }


def sarimax_from_dict(doc: dict) -> FittedModel:
    p = doc["params"]
    params = SarimaxParams(p["phi"], p["theta"], p["seasonal_phi"], p["seasonal_theta"],
                           p["beta"], p["sigma2"])
    return FittedModel(ModelOrder(*doc["order"]), SeasonalOrder(*doc["seasonal_order"]), params,
                       doc["loglik"], doc["aic"], doc["n_obs_effective"], doc["converged"],
                       tuple(doc.get("exog_names", ())), doc.get("deterministic"),
                       doc.get("message", ""))


def hw_to_dict(fitted: HwFit) -> dict:
    p, s = fitted.params, fitted.state
    return {
        "model_type": HW_TYPE,
        "version": __version__,
        "params": {"alpha": p.alpha, "beta": p.beta, "gamma": p.gamma, "m": p.m},
        "state": {"level": s.level, "trend": s.trend, "seasonals": [float(v) for v in s.seasonals], "t": s.t},
        "sse": fitted.sse,
    }


def hw_from_dict(doc: dict) -> HwFit:
    p, s = doc["params"], doc["state"]
    return HwFit(HwParams(p["alpha"], p["beta"], p["gamma"], p["m"]),
                 HwState(s["level"], s["trend"], s["seasonals"], s["t"]), doc["sse"])


def to_dict(model) -> dict:
    if isinstance(model, FittedModel):
        return sarimax_to_dict(model)
    if isinstance(model, HwFit):
        return hw_to_dict(model)
    raise TypeError(f"cannot serialize {type(model).__name__}")


def from_dict(doc: dict):
    kind = doc.get("model_type")
    if kind == SARIMAX_TYPE:
        return sarimax_from_dict(doc)
    if kind == HW_TYPE:
        return hw_from_dict(doc)
    raise ValueError(f"unknown model_type {kind!r}")


def dumps(model) -> str:
    return json.dumps(to_dict(model), indent=2) + "\n"


def loads(text: str):
    return from_dict(json.loads(text))


def save(model, path: str | Path) -> None:
    Path(path).write_text(dumps(model))


def load(path: str | Path):
    return loads(Path(path).read_text())
