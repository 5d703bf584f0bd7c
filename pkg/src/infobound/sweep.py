"""Parameter sweeps driven by an INI file.

Grammar::

    [sweep]
    model = gaussian | poisson | nuisance_gaussian
    param = <parameter of the model section to vary>
    start = <float>
    stop = <float>
    count = <int >= 2>
    scale = linear | log          (default linear)
    quantities = <comma-separated names>

    [<model>]
    <fixed parameter> = <float>   (omitted ones take the defaults below)

Only the ``[sweep]`` section and the section named by ``model`` are allowed.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bounds, estimate, info
from .core import ConfigurationError, GaussianLinear, GaussianPrior, NegExpPrior, PoissonLinear, QuadConfig
from .figures import MI_TOL, MMSE_TOL, ConsistencyError, Table, axis
from .nuisance import NuisanceGaussianParams, mi_with_nuisance, mi_without_nuisance, mmse_with_without_nuisance


class SweepConfigError(ConfigurationError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


MODEL_DEFAULTS = {
    "gaussian": {"mean": 0.0, "sigma_x2": 1.0, "a": 1.0, "b": 0.0, "sigma_n2": 1.0},
    "poisson": {"xbar": 1.0, "a": 1.0, "b": 0.0},
    "nuisance_gaussian": {"a": 1.0, "b": 1.0, "alpha": 0.0, "sigma_xu2": 1.0, "sigma_u2": 1.0,
                          "u_bar": 0.0, "sigma_n2": 1.0},
}

# parameters that may be swept but are derived from the fixed ones
DERIVED_PARAMS = {
    "gaussian": ("snr",),
    "poisson": ("a_xbar",),
    "nuisance_gaussian": ("chi", "eta", "snr_u"),
}

SCALAR_QUANTITIES = ("mi_exact", "mi_second_order", "mmse", "mi_lower_bound", "fi")
NUISANCE_QUANTITIES = ("mi_plus", "mi_minus", "mmse_plus", "mmse_minus")
QUANTITIES = {
    "gaussian": SCALAR_QUANTITIES,
    "poisson": SCALAR_QUANTITIES,
    "nuisance_gaussian": NUISANCE_QUANTITIES,
}

POSITIVE = {"sigma_x2", "sigma_n2", "sigma_u2", "xbar"}
SWEEP_KEYS = {"model", "param", "start", "stop", "count", "scale", "quantities"}


@dataclass(frozen=True)
class SweepConfig:
    model: str
    param: str
    start: float
    stop: float
    count: int
    scale: str
    quantities: tuple[str, ...]
    fixed: dict

    def values(self) -> np.ndarray:
        try:
            return axis(self.start, self.stop, self.count, self.scale)
        except ConfigurationError as exc:
            raise SweepConfigError("start" if self.scale == "log" else "count", str(exc)) from None


def _float(section, key: str) -> float:
    raw = section[key]
    try:
        v = float(raw)
    except ValueError:
        raise SweepConfigError(key, f"not a number: {raw!r}") from None
    if not math.isfinite(v):
        raise SweepConfigError(key, f"not finite: {raw!r}")
    return v


def parse_config(text: str) -> SweepConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise SweepConfigError("<file>", str(exc).splitlines()[0]) from None
    if "sweep" not in cp:
        raise SweepConfigError("sweep", "missing [sweep] section")
    sw = cp["sweep"]
    for key in sw:
        if key not in SWEEP_KEYS:
            raise SweepConfigError(key, "unknown key in [sweep]")
    for key in ("model", "param", "start", "stop", "count", "quantities"):
        if key not in sw:
            raise SweepConfigError(key, "required key missing from [sweep]")

    model = sw["model"].strip()
    if model not in MODEL_DEFAULTS:
        raise SweepConfigError("model", f"unknown model {model!r}; expected one of {sorted(MODEL_DEFAULTS)}")
    for name in cp.sections():
        if name not in ("sweep", model):
            raise SweepConfigError(name, "unexpected section")

    fixed = dict(MODEL_DEFAULTS[model])
    if model in cp:
        for key in cp[model]:
            if key not in fixed:
                raise SweepConfigError(key, f"unknown parameter for {model}")
            fixed[key] = _float(cp[model], key)
    for key in POSITIVE & fixed.keys():
        if fixed[key] <= 0:
            raise SweepConfigError(key, "must be positive")

    param = sw["param"].strip()
    if param not in fixed and param not in DERIVED_PARAMS[model]:
        raise SweepConfigError("param", f"{param!r} is not a parameter of {model}")

    try:
        count = int(sw["count"])
    except ValueError:
        raise SweepConfigError("count", f"not an integer: {sw['count']!r}") from None
    if count < 2:
        raise SweepConfigError("count", "must be at least 2")
    scale = sw.get("scale", "linear").strip()
    if scale not in ("linear", "log"):
        raise SweepConfigError("scale", f"expected linear or log, got {scale!r}")
    start, stop = _float(sw, "start"), _float(sw, "stop")
    if scale == "log" and (start <= 0 or stop <= 0):
        raise SweepConfigError("start" if start <= 0 else "stop", "log scale needs positive bounds")

    quantities = tuple(q.strip() for q in sw["quantities"].split(",") if q.strip())
    if not quantities:
        raise SweepConfigError("quantities", "empty list")
    for q in quantities:
        if q not in QUANTITIES[model]:
            raise SweepConfigError("quantities", f"{q!r} not available for {model}; "
                                                 f"expected some of {list(QUANTITIES[model])}")
    return SweepConfig(model, param, start, stop, count, scale, quantities, fixed)


# ---------------------------------------------------------------------------


def _scalar_model(model: str, params: dict):
    if model == "gaussian":
        for key in POSITIVE & params.keys():
            if params[key] <= 0:
                raise SweepConfigError(key, "must be positive")
        return (GaussianPrior(params["mean"], params["sigma_x2"]),
                GaussianLinear(params["a"], params["b"], params["sigma_n2"]))
    if params["xbar"] <= 0:
        raise SweepConfigError("xbar", "must be positive")
    if params["a"] <= 0:
        raise SweepConfigError("a", "Poisson gain must be positive")
    if params["b"] < 0:
        raise SweepConfigError("b", "Poisson bias must be nonnegative")
    return NegExpPrior(params["xbar"]), PoissonLinear(params["a"], params["b"])


def _point_params(cfg: SweepConfig, v: float) -> dict:
    params = dict(cfg.fixed)
    p = cfg.param
    if p == "snr":
        if v < 0:
            raise SweepConfigError("snr", "must be nonnegative")
        params["a"] = math.sqrt(v * params["sigma_n2"] / params["sigma_x2"])
    elif p == "a_xbar":
        params["a"] = v / params["xbar"]
    elif p == "chi":
        params["sigma_xu2"] = v * params["sigma_n2"] / params["a"] ** 2
    elif p == "eta":
        params["alpha"] = v * params["b"] / params["a"]
    elif p == "snr_u":
        params["sigma_u2"] = v * params["sigma_n2"] / params["b"] ** 2
    else:
        params[p] = v
    return params


def _scalar_quantities(prior, channel, wanted, qcfg) -> dict:
    out = {}
    cache: dict[str, float] = {}

    def get(name: str, fn: Callable[[], float]) -> float:
        if name not in cache:
            cache[name] = fn()
        return cache[name]

    for q in wanted:
        if q == "mi_exact":
            out[q] = get(q, lambda: info.mutual_information_exact(prior, channel, qcfg))
        elif q == "mi_second_order":
            out[q] = info.mi_second_order(prior, channel, qcfg)
        elif q == "mmse":
            out[q] = get(q, lambda: estimate.mmse(prior, channel, qcfg))
        elif q == "mi_lower_bound":
            m = get("mmse", lambda: estimate.mmse(prior, channel, qcfg))
            out[q] = info.differential_entropy(prior, qcfg) - bounds.equivocation_from_mmse(m)
        elif q == "fi":
            out[q] = info.fisher_information(channel, float(prior.mean), qcfg)
    return out


def _nuisance_quantities(params: dict, wanted) -> dict:
    try:
        p = NuisanceGaussianParams(a=params["a"], b=params["b"], alpha=params["alpha"],
                                   var_xu=params["sigma_xu2"], var_u=params["sigma_u2"],
                                   u_bar=params["u_bar"], noise_var=params["sigma_n2"])
    except ValueError as exc:
        raise SweepConfigError("nuisance_gaussian", str(exc)) from None
    pair = mmse_with_without_nuisance(p)
    table = {"mi_plus": mi_with_nuisance(p), "mi_minus": mi_without_nuisance(p),
             "mmse_plus": pair.mmse_plus, "mmse_minus": pair.mmse_minus}
    return {q: table[q] for q in wanted}


def _check_row(values: dict, where: str) -> None:
    if "mi_exact" in values and "mi_lower_bound" in values:
        if values["mi_lower_bound"] > values["mi_exact"] + MI_TOL:
            raise ConsistencyError(f"lower bound exceeds exact MI at {where}")
    if "mmse_plus" in values and "mmse_minus" in values:
        if values["mmse_plus"] < values["mmse_minus"] - MMSE_TOL:
            raise ConsistencyError(f"mmse_plus below mmse_minus at {where}")


def run_sweep(cfg: SweepConfig, qcfg: QuadConfig = QuadConfig()) -> Table:
    rows = []
    for v in cfg.values():
        v = float(v)
        params = _point_params(cfg, v)
        if cfg.model == "nuisance_gaussian":
            values = _nuisance_quantities(params, cfg.quantities)
        else:
            prior, channel = _scalar_model(cfg.model, params)
            values = _scalar_quantities(prior, channel, cfg.quantities, qcfg)
        _check_row(values, f"{cfg.param}={v!r}")
        rows.append([v] + [values[q] for q in cfg.quantities])
    fixed = ", ".join(f"{k}={v!r}" for k, v in sorted(cfg.fixed.items()) if k != cfg.param)
    meta = [f"model {cfg.model}; {cfg.param} {cfg.scale} over [{cfg.start!r}, {cfg.stop!r}], {cfg.count} points",
            f"fixed: {fixed}"]
    return Table([cfg.param, *cfg.quantities], rows, meta)
