"""Data series behind the four figures, plus the CSV writer shared with ``sweep``."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, fields, replace
from typing import Iterable, Sequence

import numpy as np

from . import bounds, info
from .core import ConfigurationError, NegExpPrior, PoissonLinear, QuadConfig
from .nuisance import NuisanceGaussianParams, mi_with_nuisance, mi_without_nuisance, mmse_with_without_nuisance

MI_TOL = 1e-6
MMSE_TOL = 1e-12


class ConsistencyError(RuntimeError):
    """A computed row violates an inequality it must satisfy."""


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    return "%.17g" % v


def write_csv(stream: io.TextIOBase, header: Sequence[str], rows: Iterable[Sequence], meta: Sequence[str] = ()) -> None:
    for line in meta:
        stream.write(f"# {line}\n")
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(fmt(v) for v in row) + "\n")


def axis(start: float, stop: float, count: int, scale: str) -> np.ndarray:
    if count < 2:
        raise ConfigurationError("count must be at least 2")
    if scale == "log":
        if start <= 0 or stop <= 0:
            raise ConfigurationError("log axis needs positive start and stop")
        return np.geomspace(start, stop, count)
    if scale == "linear":
        return np.linspace(start, stop, count)
    raise ConfigurationError(f"unknown scale {scale!r}")


# ---------------------------------------------------------------------------
# figure specs: every field is overridable from the command line


@dataclass
class Fig1:
    start: float = 0.5
    stop: float = 200.0
    count: int = 60
    b: tuple[float, ...] = (0.0, 50.0, 100.0)


@dataclass
class Fig2:
    start: float = 0.0
    stop: float = 200.0
    count: int = 60
    a_xbar: tuple[float, ...] = (5.0, 20.0, 80.0)


@dataclass
class Fig3:
    start: float = 0.0
    stop: float = 10.0
    count: int = 60
    alpha: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0, 4.0, 8.0)
    s_u: float = 5.0
    s_xu: float = 1.0
    b_over_a: float = 1.0


@dataclass
class Fig4:
    start: float = 0.01
    stop: float = 100.0
    count: int = 80
    eta: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0)
    snr_u: tuple[float, ...] = (10.0, 100.0)


FIGURES = {1: Fig1, 2: Fig2, 3: Fig3, 4: Fig4}


def apply_overrides(spec, overrides: dict[str, str]):
    """Return a copy of ``spec`` with string overrides parsed to each field's type."""
    known = {f.name: f for f in fields(spec)}
    changes = {}
    for key, raw in overrides.items():
        if key not in known:
            raise ConfigurationError(f"unknown override {key!r}; expected one of {sorted(known)}")
        current = getattr(spec, key)
        try:
            if isinstance(current, tuple):
                value = tuple(float(v) for v in raw.split(",") if v.strip())
                if not value:
                    raise ValueError("empty list")
            elif isinstance(current, int):
                value = int(raw)
            else:
                value = float(raw)
        except ValueError as exc:
            raise ConfigurationError(f"bad value for {key!r}: {raw!r} ({exc})") from None
        if isinstance(value, float) and not math.isfinite(value):
            raise ConfigurationError(f"bad value for {key!r}: {raw!r}")
        changes[key] = value
    out = replace(spec, **changes)
    if out.count < 2:
        raise ConfigurationError("count must be at least 2")
    return out


@dataclass
class Table:
    header: list[str]
    rows: list[list]
    meta: list[str] = field(default_factory=list)


def _poisson_row_check(mi: float, lb: float, where: str) -> None:
    if lb > mi + MI_TOL:
        raise ConsistencyError(f"lower bound {lb!r} exceeds exact MI {mi!r} at {where}")


def _poisson_point(s: float, b: float, cfg: QuadConfig) -> tuple[float, float]:
    if s <= 0 or b < 0:
        raise ConfigurationError(f"need a*xbar > 0 and b >= 0, got {s!r}, {b!r}")
    p, c = NegExpPrior(1.0), PoissonLinear(s, b)
    return info.mutual_information_exact(p, c, cfg), bounds.mi_lower_bound(p, c, cfg)


def fig1(spec: Fig1 = Fig1(), cfg: QuadConfig = QuadConfig()) -> Table:
    xs = axis(spec.start, spec.stop, spec.count, "log")
    rows = []
    for b in spec.b:
        for s in xs:
            mi, lb = _poisson_point(float(s), b, cfg)
            _poisson_row_check(mi, lb, f"a_xbar={s!r}, b={b!r}")
            rows.append([float(s), b, mi, lb])
    meta = ["MI of the Poisson channel with negative-exponential prior and its MMSE-based lower bound",
            f"a_xbar log-spaced over [{fmt(spec.start)}, {fmt(spec.stop)}], {spec.count} points",
            "b values: " + ", ".join(fmt(b) for b in spec.b)]
    return Table(["a_xbar", "b", "mi_exact", "mi_lower_bound"], rows, meta)


def fig2(spec: Fig2 = Fig2(), cfg: QuadConfig = QuadConfig()) -> Table:
    bs = axis(spec.start, spec.stop, spec.count, "linear")
    rows = []
    for s in spec.a_xbar:
        for b in bs:
            mi, lb = _poisson_point(s, float(b), cfg)
            _poisson_row_check(mi, lb, f"a_xbar={s!r}, b={b!r}")
            rows.append([float(b), s, mi, lb])
    meta = ["MI of the Poisson channel vs bias at fixed normalized gain",
            f"b linear over [{fmt(spec.start)}, {fmt(spec.stop)}], {spec.count} points",
            "a_xbar values: " + ", ".join(fmt(s) for s in spec.a_xbar)]
    return Table(["b", "a_xbar", "mi_exact", "mi_lower_bound"], rows, meta)


def nuisance_mi_pair(alpha: float, b_over_a: float, s_u: float, s_xu: float) -> tuple[float, float]:
    """(I+, I-) in the normalization a = noise_var = 1.

    With alpha = 0 and s_xu = 0 the input is degenerate; both values tend to 0.
    """
    if s_xu == 0 and alpha == 0:
        return 0.0, 0.0
    p = NuisanceGaussianParams(a=1.0, b=b_over_a, alpha=alpha, var_xu=s_xu, var_u=s_u)
    return mi_with_nuisance(p), mi_without_nuisance(p)


def fig3(spec: Fig3 = Fig3(), cfg: QuadConfig = QuadConfig()) -> Table:
    if spec.s_u <= 0 or spec.s_xu < 0 or spec.start < 0:
        raise ConfigurationError("s_u must be positive; s_xu and start nonnegative")
    sweep = axis(spec.start, spec.stop, spec.count, "linear")
    rows = []
    for variant in ("b_over_a", "s_xu"):
        for alpha in spec.alpha:
            for v in sweep:
                v = float(v)
                if variant == "b_over_a":
                    plus, minus = nuisance_mi_pair(alpha, v, spec.s_u, spec.s_xu)
                else:
                    plus, minus = nuisance_mi_pair(alpha, spec.b_over_a, spec.s_u, v)
                if alpha == 0 and plus > minus + MMSE_TOL:
                    raise ConsistencyError(f"I+ {plus!r} exceeds I- {minus!r} with alpha = 0")
                rows.append([variant, v, alpha, plus, minus])
    meta = ["MI with (plus) and without (minus) a correlated Gaussian nuisance; a = noise variance = 1",
            f"variant b_over_a sweeps b/a over [{fmt(spec.start)}, {fmt(spec.stop)}] at s_xu = {fmt(spec.s_xu)}",
            f"variant s_xu sweeps a^2 var(X|U)/noise_var over the same range at b/a = {fmt(spec.b_over_a)}",
            f"s_u = {fmt(spec.s_u)}; default s_xu and b/a are choices of this tool, not published values"]
    return Table(["variant", "sweep_var", "alpha", "mi_plus", "mi_minus"], rows, meta)


def fig4(spec: Fig4 = Fig4(), cfg: QuadConfig = QuadConfig()) -> Table:
    chis = axis(spec.start, spec.stop, spec.count, "log")
    rows = []
    for snr_u in spec.snr_u:
        if snr_u <= 0:
            raise ConfigurationError("snr_u must be positive")
        for eta in spec.eta:
            for chi in chis:
                plus, minus = mmse_with_without_nuisance(
                    NuisanceGaussianParams.normalized(float(chi), eta, snr_u))
                if plus < minus - MMSE_TOL:
                    raise ConsistencyError(f"mmse_plus {plus!r} below mmse_minus {minus!r} at chi={chi!r}")
                rows.append([float(chi), eta, snr_u, plus, minus])
    meta = ["MMSE with (plus) and without (minus) nuisance, in units of noise_var / a^2",
            f"chi log-spaced over [{fmt(spec.start)}, {fmt(spec.stop)}], {spec.count} points",
            "eta values: " + ", ".join(fmt(e) for e in spec.eta),
            "snr_u values: " + ", ".join(fmt(s) for s in spec.snr_u)]
    return Table(["chi", "eta", "snr_u", "mmse_plus", "mmse_minus"], rows, meta)


BUILDERS = {1: fig1, 2: fig2, 3: fig3, 4: fig4}


def build(n: int, overrides: dict[str, str] | None = None, cfg: QuadConfig = QuadConfig()) -> Table:
    if n not in FIGURES:
        raise ConfigurationError(f"no figure {n!r}")
    spec = apply_overrides(FIGURES[n](), overrides or {})
    return BUILDERS[n](spec, cfg)
