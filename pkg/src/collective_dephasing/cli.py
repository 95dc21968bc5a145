"""Command-line runner: flat key=value scenario files in, CSV tables out.

Usage::

    collective-dephasing preset fig3 --out results/
    collective-dephasing run scenario.cfg --out results/ --rel-tol 1e-9

A scenario file holds one ``key = value`` pair per line; ``#`` starts a
comment.  List-valued keys take comma-separated items, where an item is a
number or a generator:

``lin:a:b:n``
    ``n`` evenly spaced values from ``a`` to ``b`` inclusive.
``log:p:q:k``
    ``10^p`` to ``10^q`` with ``k`` values per decade (rounded for integer
    lists, duplicates dropped).
``range:a:b``
    every integer from ``a`` to ``b`` inclusive.

Each run writes ``<name>.csv`` (plus any auxiliary tables) and a
``<name>.meta`` sidecar that lists every resolved parameter in the same
format, so it can be fed back as a scenario file to reproduce the run.

Exit codes: 0 success, 2 usage or parse error, 3 domain violation,
4 numerical accuracy failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import __version__
from .cloud import CloudGeometry
from .dephasing import gamma_continuum_corrected, gamma_stationary, oracle_ensemble
from .errors import AccuracyError, DomainError
from .metrology import (
    Mode,
    best_time,
    best_time_pair,
    classify_threshold,
    fisher_optimal,
    gamma_evaluator,
    sweep_fisher,
    t_best_zeno,
)
from .numerics import QuadratureSpec
from .reservoir import SpectralDensity, ThermalState

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NUMERICAL = 4

COMPUTATIONS = (
    "gamma_curve",
    "stationary_scan",
    "fisher_sweep",
    "best_time_scan",
    "best_time_surface",
    "threshold",
    "oracle",
)


class ConfigError(ValueError):
    """Malformed scenario file; maps to the usage exit code."""


# ---------------------------------------------------------------------------
# scenario configuration


@dataclass
class ScenarioConfig:
    """Every knob of a run.  ``w_bar`` is the unit of frequency (``w_bar = 1``)."""

    computation: str
    name: str = ""
    s: list[float] = field(default_factory=lambda: [4.0])
    coupling_combo: list[float] = field(default_factory=lambda: [0.12])
    theta: list[float] = field(default_factory=lambda: [0.0])
    n_list: list[int] = field(default_factory=lambda: [1000])
    t_max: float = 100.0
    t_min: float = 0.0
    t_values: list[float] = field(default_factory=list)
    points_per_decade: int = 400
    w_s_over_wbar: float = 1.0
    mode: list[str] = field(default_factory=lambda: [Mode.GHZ.value])
    selection: str = "first_local"
    method: str = "auto"
    dimension: str = "3D"
    temperature_class: str = "zero"
    n_seeds: int = 1000
    seed: int = 0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_panels: int = 20000
    threads: int = 1

    def __post_init__(self):
        if not self.name:
            self.name = self.computation

    @property
    def quad(self) -> QuadratureSpec:
        return QuadratureSpec(rel_tol=self.rel_tol, abs_tol=self.abs_tol, max_panels=self.max_panels)

    @property
    def lower_time(self) -> float:
        """Lower end of log-spaced time grids; defaults to ``1e-4 t_max``."""
        return self.t_min if self.t_min > 0 else 1e-4 * self.t_max

    def spectral_density(self, i: int = 0) -> SpectralDensity:
        return SpectralDensity.from_coupling_combo(self.s[i], self.coupling_combo[i], w_bar=1.0,
                                                   w_s=self.w_s_over_wbar)

    def validate(self):
        """Raise :class:`DomainError` naming the first violated invariant."""
        def need(ok, msg):
            if not ok:
                raise DomainError(msg)

        need(self.name and all(c.isalnum() or c in "_-." for c in self.name),
             "name must be nonempty and use only letters, digits, '_', '-', '.'")
        need(len(self.s) > 0, "s must be nonempty")
        need(all(v > -1 for v in self.s), "s > -1 is required")
        need(self.computation == "threshold" or len(self.coupling_combo) == len(self.s),
             "s and coupling_combo must have the same number of entries")
        need(all(v >= 0 for v in self.coupling_combo), "coupling_combo >= 0 is required")
        need(len(self.theta) > 0 and all(v >= 0 for v in self.theta), "theta >= 0 is required")
        need(len(self.n_list) > 0 and all(n >= 1 for n in self.n_list), "n_list entries must be >= 1")
        need(self.t_max > 0 and math.isfinite(self.t_max), "t_max > 0 is required")
        need(self.t_min >= 0 and (self.t_min == 0 or self.t_min < self.t_max), "0 <= t_min < t_max is required")
        need(all(t >= 0 and math.isfinite(t) for t in self.t_values), "t_values must be finite and >= 0")
        need(self.points_per_decade >= 1, "points_per_decade >= 1 is required")
        need(self.w_s_over_wbar > 0, "w_s_over_wbar > 0 is required")
        need(all(m in {x.value for x in Mode} for m in self.mode),
             f"mode entries must be one of {', '.join(x.value for x in Mode)}")
        need(self.selection in ("first_local", "global"), "selection must be first_local or global")
        need(self.method in ("auto", "quadrature", "closed_form"), "method must be auto, quadrature or closed_form")
        need(self.dimension in ("1D", "3D"), "dimension must be 1D or 3D")
        need(self.temperature_class in ("zero", "finite"), "temperature_class must be zero or finite")
        need(self.n_seeds >= 2, "n_seeds >= 2 is required")
        need(self.seed >= 0, "seed >= 0 is required")
        need(self.threads >= 1, "threads >= 1 is required")
        self.quad  # QuadratureSpec validates the tolerances
        if self.computation in ("gamma_curve", "stationary_scan", "fisher_sweep", "best_time_surface", "oracle"):
            need(len(self.s) == 1, f"{self.computation} takes a single s")
        if self.computation in ("best_time_scan", "fisher_sweep"):
            need(len(self.theta) == 1, f"{self.computation} takes a single theta")
        if self.computation == "oracle":
            need(len(self.n_list) == 1 and len(self.theta) == 1, "oracle takes a single N and theta")
            need(math.isfinite(self.w_s_over_wbar), "oracle needs a finite w_s_over_wbar")
        needs_single = self.computation == "best_time_scan" or (
            self.computation == "fisher_sweep" and Mode.ONE_BY_ONE.value in self.mode)
        if needs_single:
            need(math.isfinite(self.w_s_over_wbar), "single-qubit quantities need a finite w_s_over_wbar")
        return self


_FIELDS = {f.name for f in dataclasses.fields(ScenarioConfig)}
_INT_LIST_FIELDS = {"n_list"}
_FLOAT_LIST_FIELDS = {"s", "coupling_combo", "theta", "t_values"}
_STR_LIST_FIELDS = {"mode"}
_INT_FIELDS = {"points_per_decade", "n_seeds", "seed", "max_panels", "threads"}
_FLOAT_FIELDS = {"t_max", "t_min", "w_s_over_wbar", "rel_tol", "abs_tol"}
# accepted in files for provenance but not used to configure the run
_IGNORED_KEYS = {"version"}


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"could not parse {text!r} as a number") from None


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        value = _parse_float(text)
        if not value.is_integer():
            raise ConfigError(f"expected an integer, got {text!r}") from None
        return int(value)


def _expand_item(item: str, integer: bool) -> list:
    parts = item.split(":")
    kind = parts[0]
    if kind == "lin":
        if len(parts) != 4:
            raise ConfigError(f"lin generator needs lin:a:b:n, got {item!r}")
        vals = [float(f"{v:.12g}") for v in np.linspace(_parse_float(parts[1]), _parse_float(parts[2]), _parse_int(parts[3]))]
    elif kind == "log":
        if len(parts) != 4:
            raise ConfigError(f"log generator needs log:p:q:k, got {item!r}")
        p, q, k = _parse_float(parts[1]), _parse_float(parts[2]), _parse_int(parts[3])
        if k < 1 or q < p:
            raise ConfigError(f"log generator needs q >= p and k >= 1, got {item!r}")
        vals = list(np.logspace(p, q, int(round((q - p) * k)) + 1))
    elif kind == "range":
        if len(parts) != 3:
            raise ConfigError(f"range generator needs range:a:b, got {item!r}")
        vals = list(range(_parse_int(parts[1]), _parse_int(parts[2]) + 1))
    elif len(parts) == 1:
        return [_parse_int(item) if integer else _parse_float(item)]
    else:
        raise ConfigError(f"unknown list generator {kind!r}")
    if integer:
        return [int(round(v)) for v in vals]
    return [float(v) for v in vals]


def _parse_list(text: str, integer: bool) -> list:
    out = []
    for item in (x.strip() for x in text.split(",")):
        if not item:
            continue
        out.extend(_expand_item(item, integer))
    if integer:
        # unique and ascending
        out = sorted(set(out))
    return out


def parse_config(text: str, source: str = "<config>") -> ScenarioConfig:
    """Parse scenario text; raises :class:`ConfigError` with a line diagnostic."""
    values: dict = {}
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (x.strip() for x in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r} (first set on line {seen[key]})")
        seen[key] = lineno
        if key in _IGNORED_KEYS:
            continue
        if key not in _FIELDS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            if key in _INT_LIST_FIELDS:
                values[key] = _parse_list(value, integer=True)
            elif key in _FLOAT_LIST_FIELDS:
                values[key] = _parse_list(value, integer=False)
            elif key in _STR_LIST_FIELDS:
                values[key] = [x.strip() for x in value.split(",") if x.strip()]
            elif key in _INT_FIELDS:
                values[key] = _parse_int(value)
            elif key in _FLOAT_FIELDS:
                values[key] = _parse_float(value)
            else:
                values[key] = value
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: field {key!r}: {exc}") from None
    if "computation" not in values:
        raise ConfigError(f"{source}: missing required key 'computation'")
    if values["computation"] not in COMPUTATIONS:
        raise ConfigError(f"{source}:{seen['computation']}: computation must be one of "
                          f"{', '.join(COMPUTATIONS)}; got {values['computation']!r}")
    return ScenarioConfig(**values)


def _fmt(value) -> str:
    """Shortest round-trip text for a CSV cell or config value."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            raise AccuracyError(f"non-finite value {value!r} in output")
        return repr(value)
    return str(value)


def format_config(cfg: ScenarioConfig) -> str:
    """Render ``cfg`` (fully resolved) in the scenario-file format."""
    lines = [f"version = {__version__}"]
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, list):
            text = ", ".join(_fmt(v) for v in value)
        elif isinstance(value, float) and math.isinf(value):
            text = "inf"
        else:
            text = _fmt(value)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# computations


@dataclass
class Table:
    stem: str
    header: list[str]
    rows: list[list]


def _label(x: float) -> str:
    return f"{x:g}"


def _time_grid(cfg: ScenarioConfig) -> np.ndarray:
    if cfg.t_values:
        return np.asarray(cfg.t_values, dtype=float)
    lo, hi = cfg.lower_time, cfg.t_max
    n = max(2, int(math.ceil(cfg.points_per_decade * math.log10(hi / lo))) + 1)
    return np.logspace(math.log10(lo), math.log10(hi), n)


def _pmap(cfg: ScenarioConfig, fn: Callable, items: Sequence) -> list:
    """Ordered map, threaded when ``cfg.threads > 1``."""
    if cfg.threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        return list(pool.map(fn, items))


def _run_gamma_curve(cfg: ScenarioConfig) -> list[Table]:
    sd = cfg.spectral_density()
    t = _time_grid(cfg)
    columns, labels = [], []
    for n in cfg.n_list:
        for th in cfg.theta:
            columns.append((n, th))
            labels.append(f"gamma_T{_label(th)}" if len(cfg.n_list) == 1 else f"gamma_N{n}_T{_label(th)}")

    def column(key):
        n, th = key
        gam = gamma_evaluator(sd, CloudGeometry(n), ThermalState(th), Mode.GHZ, cfg.quad, cfg.method)
        return [gam(float(x)) for x in t]

    data = _pmap(cfg, column, columns)
    rows = [[t[i]] + [col[i] for col in data] for i in range(t.size)]
    return [Table(cfg.name, ["w_t"] + labels, rows)]


def _run_stationary_scan(cfg: ScenarioConfig) -> list[Table]:
    sd = cfg.spectral_density()

    def row(th):
        return [th] + [gamma_stationary(sd, CloudGeometry(n), ThermalState(th), cfg.quad) for n in cfg.n_list]

    rows = _pmap(cfg, row, cfg.theta)
    return [Table(cfg.name, ["theta"] + [f"gamma_stat_N{n}" for n in cfg.n_list], rows)]


def _run_fisher_sweep(cfg: ScenarioConfig) -> list[Table]:
    sd = cfg.spectral_density()
    ts = ThermalState(cfg.theta[0])
    t = _time_grid(cfg)
    tables = _pmap(cfg, lambda m: sweep_fisher(sd, CloudGeometry(cfg.n_list[0]), ts, Mode(m), t,
                                               cfg.n_list, cfg.quad, cfg.method), cfg.mode)
    header, cols = ["w_t"], []
    maxima = []
    for m, tab in zip(cfg.mode, tables):
        for i, n in enumerate(tab.n):
            header.append(f"F_{m}_N{n}")
            cols.append(tab.fisher[i])
            j = int(np.argmax(tab.is_global_max[i]))
            maxima.append([m, int(n), tab.t[j], tab.fisher[i, j]])
    rows = [[t[k]] + [c[k] for c in cols] for k in range(t.size)]
    return [Table(cfg.name, header, rows),
            Table(f"{cfg.name}_maxima", ["mode", "N", "t_best_grid", "F_max"], maxima)]


def _run_best_time_scan(cfg: ScenarioConfig) -> list[Table]:
    """Ratio ``F_N(t_best) / F_1(t_max)`` versus ``N`` for paired ``(s, combo)``.

    The ratio and ``t_best_numeric`` follow ``cfg.selection``; the
    ``*_global`` columns always use the global maximiser.  Best-time columns
    refer to the first ``(s, combo)`` pair.
    """
    ts = ThermalState(cfg.theta[0])
    sds = [cfg.spectral_density(i) for i in range(len(cfg.s))]

    def row(n):
        g = CloudGeometry(n)
        ratios, ratios_global, bests = [], [], []
        for sd in sds:
            first, glob = best_time_pair(sd, g, ts, Mode.GHZ, cfg.t_max, cfg.quad, t_min=cfg.t_min or None,
                                         points_per_decade=cfg.points_per_decade, method=cfg.method)
            chosen = first if cfg.selection == "first_local" else glob
            f1 = fisher_optimal(sd, g, ts, cfg.t_max, Mode.ONE_BY_ONE, cfg.quad, cfg.method).fisher
            ratios.append(chosen.fisher / f1)
            ratios_global.append(glob.fisher / f1)
            bests.append((chosen.t, glob.t))
        return [n] + ratios + [bests[0][0], t_best_zeno(sds[0], g, ts)] + ratios_global + [bests[0][1]]

    rows = _pmap(cfg, row, cfg.n_list)
    labels = [_label(s) for s in cfg.s]
    header = (["N"] + [f"ratio_s{x}" for x in labels] + ["t_best_numeric", "t_best_zeno"]
              + [f"ratio_global_s{x}" for x in labels] + ["t_best_global"])
    return [Table(cfg.name, header, rows)]


def _run_best_time_surface(cfg: ScenarioConfig) -> list[Table]:
    sd = cfg.spectral_density()
    cells = [(th, n) for th in cfg.theta for n in cfg.n_list]

    def row(cell):
        th, n = cell
        g, ts = CloudGeometry(n), ThermalState(th)
        b = best_time(sd, g, ts, Mode.GHZ, cfg.t_max, cfg.quad, t_min=cfg.t_min or None,
                      points_per_decade=cfg.points_per_decade, method=cfg.method, selection=cfg.selection)
        return [th, n, b.t, b.fisher, t_best_zeno(sd, g, ts)]

    rows = _pmap(cfg, row, cells)
    return [Table(cfg.name, ["theta", "N", "t_best", "F_best", "t_best_zeno"], rows)]


def _run_threshold(cfg: ScenarioConfig) -> list[Table]:
    rows = []
    for s in cfg.s:
        r = classify_threshold(s, cfg.dimension, cfg.temperature_class)
        rows.append([r.s, r.dimension, r.temperature_class, r.all_time_suppression, r.zeno_suppression])
    return [Table(cfg.name, ["s", "dimension", "temperature_class", "all_time", "zeno"], rows)]


def _run_oracle(cfg: ScenarioConfig) -> list[Table]:
    sd = cfg.spectral_density()
    g, ts = CloudGeometry(cfg.n_list[0]), ThermalState(cfg.theta[0])
    t = _time_grid(cfg)
    ens = oracle_ensemble(sd, g, ts, t, cfg.n_seeds, cfg.seed, cfg.quad)
    gam = gamma_evaluator(sd, g, ts, Mode.GHZ, cfg.quad, cfg.method)
    rows = [[x, gam(float(x)), gamma_continuum_corrected(sd, g, ts, float(x), cfg.quad), m, e]
            for x, m, e in zip(t, ens.mean, ens.sem)]
    return [Table(cfg.name, ["w_t", "gamma_continuum", "gamma_corrected", "oracle_mean", "oracle_sem"], rows)]


_RUNNERS = {
    "gamma_curve": _run_gamma_curve,
    "stationary_scan": _run_stationary_scan,
    "fisher_sweep": _run_fisher_sweep,
    "best_time_scan": _run_best_time_scan,
    "best_time_surface": _run_best_time_surface,
    "threshold": _run_threshold,
    "oracle": _run_oracle,
}


def render_csv(table: Table) -> str:
    lines = [",".join(table.header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in table.rows)
    return "\n".join(lines) + "\n"


def run_config(cfg: ScenarioConfig, out_dir: str) -> list[str]:
    """Execute ``cfg`` and write its tables and sidecar; returns written paths."""
    cfg.validate()
    tables = _RUNNERS[cfg.computation](cfg)
    rendered = [(t.stem, render_csv(t)) for t in tables]  # formats (and checks) before writing
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for stem, text in rendered:
        paths.append(_write(os.path.join(out_dir, f"{stem}.csv"), text))
    paths.append(_write(os.path.join(out_dir, f"{cfg.name}.meta"), format_config(cfg)))
    return paths


def _write(path: str, text: str) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


# ---------------------------------------------------------------------------
# figure presets

PRESETS: dict[str, list[str]] = {
    "fig1": [
        """computation = gamma_curve
name = fig1
s = 4
coupling_combo = 0.12
theta = 0, 0.5, 1
n_list = 1000
t_min = 0.01
t_max = 100
""",
        """computation = stationary_scan
name = fig1_inset
s = 4
coupling_combo = 0.12
theta = lin:0:1:21
n_list = 100, 1000
""",
    ],
    "fig2": [
        """computation = fisher_sweep
name = fig2
s = 4
coupling_combo = 0.12
theta = 0
n_list = 1000, 10000, 100000, 1000000
mode = ghz_collective, one_by_one
t_min = 0.01
t_max = 100
""",
    ],
    "fig3": [
        """computation = best_time_scan
name = fig3
s = 4, 2
coupling_combo = 0.12, 0.02
theta = 0
n_list = log:1:6:20, range:245:265
t_max = 100
selection = first_local
""",
    ],
    "fig4": [
        """computation = fisher_sweep
name = fig4
s = 2
coupling_combo = 0.12
theta = 0
n_list = 1000, 10000, 100000, 1000000
mode = ghz_collective, one_by_one
t_min = 0.001
t_max = 3.5
""",
    ],
    "fig5": [
        """computation = best_time_surface
name = fig5
s = 4
coupling_combo = 0.12
theta = lin:0:1:6
n_list = log:2:6:2
t_min = 0.02
t_max = 20
selection = first_local
""",
    ],
}


def preset_configs(name: str) -> list[ScenarioConfig]:
    return [parse_config(text, f"preset {name}") for text in PRESETS[name]]


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="collective-dephasing",
        description="Collective dephasing and Ramsey phase-estimation tables.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--rel-tol", type=float, help="quadrature relative tolerance")
        p.add_argument("--abs-tol", type=float, help="quadrature absolute tolerance")
        p.add_argument("--threads", type=int, help="worker threads for independent grid cells")
        p.add_argument("--seed", type=int, help="random seed for sampled clouds")

    p = sub.add_parser("preset", help="reproduce a figure's data")
    p.add_argument("name", choices=sorted(PRESETS))
    common(p)
    p = sub.add_parser("run", help="run a scenario file")
    p.add_argument("config", help="path to a key=value scenario file")
    common(p)
    return parser


def _apply_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    for flag, key in (("rel_tol", "rel_tol"), ("abs_tol", "abs_tol"), ("threads", "threads"), ("seed", "seed")):
        value = getattr(args, flag)
        if value is not None:
            setattr(cfg, key, value)
    return cfg


def main(argv: Iterable[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(None if argv is None else list(argv))
    try:
        if args.command == "preset":
            configs = preset_configs(args.name)
        else:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read {args.config}: {exc.strerror}") from None
            configs = [parse_config(text, args.config)]
        for cfg in configs:
            for path in run_config(_apply_overrides(cfg, args), args.out):
                print(path)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except AccuracyError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
