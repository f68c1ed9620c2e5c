"""JSON run configuration for the command-line tools.

Every field has a default matching the fitted device, so ``{}`` is a valid
configuration. Unknown keys are rejected rather than silently ignored.

Layout::

    {
      "device": {"omega_r": 7756.4, "kappa_r": 14.5, "phi_over_pi": 1.55,
                 "g_total": -5.1, "g": 93.4, "package_loss_db": 0.28,
                 "transmon": {"dressed_omega_01": 6086.0, "e_c": 201.0, ...}},
      "squid":  {"e_j_max_ghz": 19.3, "e_c": 201.0, "flux": 0.291},
      "yield":  {"sigma_rel": 0.015, "tolerance_rel": 0.3, "trials": 100000, ...},
      "grids":  {"s21": {"start": 7740, "stop": 7780, "points": 801}, ...},
      "output": {"include_package_loss": false},
      "fit":    {"phi_bounds_over_pi": [1, 2], "g_total_bounds": null, ...}
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .device import (
    FITTED_DRESSED_QUBIT,
    AllPassModel,
    SquidSpec,
    TransmonSpec,
    bare_qubit_frequency,
)
from .exceptions import DomainError
from .yieldmc import YieldConfig

__all__ = ["ConfigError", "Grid", "RunConfig", "load_config", "parse_config"]


class ConfigError(DomainError):
    """Malformed or inconsistent configuration document."""


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if int(self.points) < 2 or not self.stop > self.start:
            raise ConfigError(f"grid needs stop > start and points >= 2, got {self}")

    def values(self):
        return np.linspace(float(self.start), float(self.stop), int(self.points))


@dataclass(frozen=True)
class Grids:
    s21: Grid = Grid(7740.0, 7780.0, 801)
    fluxmap_flux: Grid = Grid(-0.45, 0.45, 91)
    fluxmap_freq: Grid = Grid(7730.0, 7790.0, 241)
    fig1b_db: Grid = Grid(-30.0, 0.0, 121)
    chikappa: Grid = Grid(0.0, 0.5, 101)


@dataclass(frozen=True)
class Fig2Settings:
    n_values: tuple = tuple(range(1, 31))
    tolerances: tuple = (0.1, 0.2, 0.3)
    histogram_positions: tuple = (1.0, 2.0, 4.0, 8.0)
    histogram_bins: int = 100


@dataclass(frozen=True)
class FitSettings:
    phi_bounds_over_pi: tuple = (1.0, 2.0)
    g_total_bounds: tuple | None = None
    init: tuple | None = None
    n_grid: int = 5
    max_evals: int = 10_000


@dataclass(frozen=True)
class RunConfig:
    model: AllPassModel = field(default_factory=AllPassModel)
    squid: SquidSpec = field(default_factory=SquidSpec)
    yield_cfg: YieldConfig = field(default_factory=YieldConfig)
    fig2: Fig2Settings = field(default_factory=Fig2Settings)
    grids: Grids = field(default_factory=Grids)
    fit: FitSettings = field(default_factory=FitSettings)
    include_package_loss: bool = False

    def with_seed(self, seed):
        return replace(self, yield_cfg=replace(self.yield_cfg, seed=int(seed)))


def _take(section, allowed, where):
    if not isinstance(section, dict):
        raise ConfigError(f"section '{where}' must be a JSON object")
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in '{where}': {', '.join(unknown)}")
    return section


def _transmon(d):
    keys = ("omega_01", "dressed_omega_01", "e_c", "n_levels_qubit", "n_levels_res",
            "counter_rotating")
    d = _take(d, keys, "device.transmon")
    if "omega_01" in d and "dressed_omega_01" in d:
        raise ConfigError("give either device.transmon.omega_01 or dressed_omega_01, not both")
    return d


def _device(d):
    keys = ("omega_r", "kappa_r", "phi_over_pi", "g_total", "g", "package_loss_db", "transmon")
    d = dict(_take(d, keys, "device"))
    t = dict(_transmon(d.pop("transmon", {})))
    base = AllPassModel()
    omega_r = float(d.get("omega_r", base.omega_r))
    g = float(d.get("g", base.g))
    if "omega_01" in t:
        omega_01 = float(t.pop("omega_01"))
    else:
        dressed = float(t.pop("dressed_omega_01", FITTED_DRESSED_QUBIT))
        omega_01 = bare_qubit_frequency(dressed, omega_r, g)
    transmon = TransmonSpec(
        omega_01=omega_01,
        e_c=float(t.get("e_c", TransmonSpec.e_c)),
        n_levels_qubit=int(t.get("n_levels_qubit", TransmonSpec.n_levels_qubit)),
        n_levels_res=int(t.get("n_levels_res", TransmonSpec.n_levels_res)),
        counter_rotating=bool(t.get("counter_rotating", TransmonSpec.counter_rotating)),
    )
    return AllPassModel(
        omega_r=omega_r,
        kappa_r=float(d.get("kappa_r", base.kappa_r)),
        phi=math.pi * float(d.get("phi_over_pi", base.phi / math.pi)),
        g_total=float(d.get("g_total", base.g_total)),
        g=g,
        transmon=transmon,
        package_loss_db=float(d.get("package_loss_db", base.package_loss_db)),
    )


def _squid(d):
    d = _take(d, ("e_j_max_ghz", "e_c", "flux"), "squid")
    base = SquidSpec()
    return SquidSpec(e_j_max=float(d.get("e_j_max_ghz", base.e_j_max)),
                     e_c=float(d.get("e_c", base.e_c)),
                     flux=float(d.get("flux", base.flux)))


def _yield(d):
    yc_keys = [f.name for f in fields(YieldConfig)]
    f2_keys = [f.name for f in fields(Fig2Settings)]
    d = _take(d, yc_keys + f2_keys, "yield")
    yc = YieldConfig(**{k: (int(v) if isinstance(YieldConfig.__dataclass_fields__[k].default, int)
                            else float(v)) for k, v in d.items() if k in yc_keys})
    f2 = Fig2Settings(**{k: (int(v) if k == "histogram_bins" else tuple(v))
                         for k, v in d.items() if k in f2_keys})
    if f2.histogram_bins < 1 or not f2.n_values or not f2.tolerances:
        raise ConfigError("fig2 settings need bins >= 1 and non-empty n_values / tolerances")
    if min(f2.n_values) < 1:
        raise ConfigError("yield.n_values must be positive")
    if not all(0 < t < 1 for t in f2.tolerances):
        raise ConfigError("yield.tolerances must lie in (0, 1)")
    return yc, replace(f2, n_values=tuple(int(n) for n in f2.n_values),
                       tolerances=tuple(float(t) for t in f2.tolerances),
                       histogram_positions=tuple(float(p) for p in f2.histogram_positions))


def _grids(d):
    names = [f.name for f in fields(Grids)]
    d = _take(d, names, "grids")
    out = {}
    for name, g in d.items():
        g = _take(g, ("start", "stop", "points"), f"grids.{name}")
        default = getattr(Grids, name)
        out[name] = Grid(float(g.get("start", default.start)), float(g.get("stop", default.stop)),
                         int(g.get("points", default.points)))
    return Grids(**out)


def _fit(d):
    d = _take(d, [f.name for f in fields(FitSettings)], "fit")
    out = {}
    for k, v in d.items():
        out[k] = int(v) if k in ("n_grid", "max_evals") else (None if v is None else
                                                                tuple(map(float, v)))
    fs = FitSettings(**out)
    if fs.n_grid < 1 or fs.max_evals < 1:
        raise ConfigError("fit.n_grid and fit.max_evals must be >= 1")
    return fs


def parse_config(doc):
    """Build a validated :class:`RunConfig` from a decoded JSON object."""
    doc = _take(doc, ("device", "squid", "yield", "grids", "output", "fit"), "<root>")
    output = _take(doc.get("output", {}), ("include_package_loss",), "output")
    try:
        yc, f2 = _yield(doc.get("yield", {}))
        return RunConfig(
            model=_device(doc.get("device", {})),
            squid=_squid(doc.get("squid", {})),
            yield_cfg=yc,
            fig2=f2,
            grids=_grids(doc.get("grids", {})),
            fit=_fit(doc.get("fit", {})),
            include_package_loss=bool(output.get("include_package_loss", False)),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def load_config(path=None):
    """Read a JSON config file; ``None`` gives the defaults."""
    if path is None:
        return RunConfig()
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(doc)
