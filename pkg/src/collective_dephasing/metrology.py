"""Ramsey phase estimation with dephased probes.

Two measurement scenarios are compared:

* ``ONE_BY_ONE``: N uncorrelated qubits, each dephasing with the single-qubit
  factor gamma_1, measured separately;
* ``GHZ``: an N-qubit GHZ state dephasing collectively with gamma_N and read
  out as a whole.

At the optimal detuning the Fisher information is ``N t^2 exp(-2 gamma_1)``
and ``N^2 t^2 exp(-2 gamma_N)`` respectively.  Its extrema in time satisfy
``t dgamma/dt = 1``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cloud import CloudGeometry
from .dephasing import (
    effective_cutoff,
    gamma_closed_form_T0,
    gamma_collective,
    gamma_single_closed_form_T0,
    gamma_single_qubit,
)
from .errors import DomainError, SingularProbabilityError
from .numerics import QuadratureSpec, gamma_fn
from .reservoir import SpectralDensity, ThermalState

__all__ = [
    "Mode",
    "MetrologyScenario",
    "FisherPoint",
    "FisherTable",
    "ThresholdReport",
    "ground_state_probability",
    "fisher_binary",
    "optimal_detuning",
    "fisher_optimal",
    "cramer_rao_bound",
    "gamma_evaluator",
    "best_time",
    "best_time_pair",
    "extremum_times",
    "t_best_zeno",
    "classify_threshold",
    "sweep_fisher",
    "n_scaling_exponent",
    "POINTS_PER_DECADE",
]

POINTS_PER_DECADE = 400
# Default lower end of the root-bracketing grid, relative to t_max.
T_MIN_RATIO = 1e-4
_FD_STEP = 1e-4


class Mode(str, enum.Enum):
    ONE_BY_ONE = "one_by_one"
    GHZ = "ghz_collective"


@dataclass(frozen=True)
class MetrologyScenario:
    mode: Mode
    phi: float
    t_max: float
    n_branch: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not self.t_max > 0:
            raise DomainError(f"t_max must be > 0, got {self.t_max}")


@dataclass(frozen=True)
class FisherPoint:
    t: float
    fisher: float
    gamma: float
    is_global_max: bool = False


@dataclass(frozen=True)
class FisherTable:
    """Fisher information on a (N, t) grid; rows are atom numbers."""

    t: np.ndarray
    n: np.ndarray
    fisher: np.ndarray
    gamma: np.ndarray
    is_global_max: np.ndarray

    def points(self, i: int) -> list[FisherPoint]:
        return [FisherPoint(float(t), float(f), float(g), bool(m))
                for t, f, g, m in zip(self.t, self.fisher[i], self.gamma[i], self.is_global_max[i])]


@dataclass(frozen=True)
class ThresholdReport:
    s: float
    dimension: str
    temperature_class: str
    all_time_suppression: bool
    zeno_suppression: bool


# ---------------------------------------------------------------------------
# measurement statistics


def ground_state_probability(gamma: float, delta: float, phi: float, t: float, n_qubits: int = 1) -> float:
    """Probability of finding every qubit in the ground state."""
    if not gamma >= 0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    return 0.5 * (1.0 - math.exp(-gamma) * math.cos(n_qubits * phi * t + delta))


def fisher_binary(p: float, dp_dphi: float) -> float:
    """Fisher information of a two-outcome measurement with ``P(0) = p``."""
    if not 0.0 < p < 1.0:
        raise SingularProbabilityError(f"Fisher information is singular at p={p}")
    return dp_dphi ** 2 * (1.0 / p + 1.0 / (1.0 - p))


def optimal_detuning(delta: float, t: float, n_qubits: int = 1, n_branch: int = 0) -> float:
    """Detuning with ``N phi t + delta = (2n + 1) pi / 2``."""
    if not t > 0:
        raise DomainError("optimal detuning is undefined at t <= 0")
    return ((2 * n_branch + 1) * math.pi / 2 - delta) / (n_qubits * t)


def cramer_rao_bound(f: FisherPoint) -> float:
    """Single-shot variance bound ``1 / F``; ``inf`` when ``F = 0``."""
    if f.fisher < 0:
        raise DomainError(f"Fisher information must be >= 0, got {f.fisher}")
    if f.fisher == 0:
        return math.inf
    return 1.0 / f.fisher


# ---------------------------------------------------------------------------
# Fisher information at optimal detuning


def gamma_evaluator(sd: SpectralDensity, g: CloudGeometry, ts: ThermalState, mode: Mode,
                    spec: QuadratureSpec | None = None, method: str = "auto") -> Callable[[float], float]:
    """Return ``t -> gamma(t)`` for the given scenario.

    ``method`` is ``"quadrature"``, ``"closed_form"`` (zero temperature only)
    or ``"auto"``, which picks the closed form whenever it applies.
    """
    mode = Mode(mode)
    if method not in ("auto", "quadrature", "closed_form"):
        raise ValueError(f"unknown method {method!r}")
    closed = method == "closed_form" or (method == "auto" and ts.is_zero)
    if closed and not ts.is_zero:
        raise DomainError("closed form is only available at zero temperature")
    if mode is Mode.GHZ:
        if closed:
            return lambda t: gamma_closed_form_T0(sd, g, t)
        return lambda t: gamma_collective(sd, g, ts, t, spec)
    if closed:
        return lambda t: gamma_single_closed_form_T0(sd, t)
    return lambda t: gamma_single_qubit(sd, ts, t, spec)


def _fisher_value(n: int, mode: Mode, t: float, gamma: float) -> float:
    scale = n * n if mode is Mode.GHZ else n
    return scale * t * t * math.exp(-2.0 * gamma)


def fisher_optimal(sd: SpectralDensity, g: CloudGeometry, ts: ThermalState, t: float,
                   mode: Mode = Mode.GHZ, spec: QuadratureSpec | None = None,
                   method: str = "auto") -> FisherPoint:
    """Fisher information at the optimal detuning."""
    if not t >= 0:
        raise DomainError(f"time must be >= 0, got t={t}")
    mode = Mode(mode)
    gam = gamma_evaluator(sd, g, ts, mode, spec, method)(t)
    return FisherPoint(t=t, fisher=_fisher_value(g.n_atoms, mode, t, gam), gamma=gam)


def _log_grid(t_lo: float, t_hi: float, per_decade: int) -> np.ndarray:
    n = max(2, int(math.ceil(per_decade * math.log10(t_hi / t_lo))) + 1)
    return np.logspace(math.log10(t_lo), math.log10(t_hi), n)


def _bisect(h, lo: float, hi: float, h_lo: float, xtol: float = 1e-13, max_iter: int = 200) -> float:
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        h_mid = h(mid)
        if h_mid == 0.0:
            return mid
        if (h_mid > 0) == (h_lo > 0):
            lo, h_lo = mid, h_mid
        else:
            hi = mid
        if hi - lo <= xtol * hi:
            break
    return 0.5 * (lo + hi)


def _extrema(sd, g, ts, mode, t_max, spec, t_min, points_per_decade, method):
    if not t_max > 0:
        raise DomainError(f"t_max must be > 0, got {t_max}")
    gam = gamma_evaluator(sd, g, ts, mode, spec, method)
    t_lo = T_MIN_RATIO * t_max if t_min is None else t_min
    if not 0 < t_lo < t_max:
        raise DomainError(f"need 0 < t_min < t_max, got t_min={t_lo}")

    def h(t):
        dt = _FD_STEP * t
        return t * (gam(t + dt) - gam(t - dt)) / (2 * dt) - 1.0

    grid = _log_grid(t_lo, t_max, points_per_decade)
    hv = np.array([h(t) for t in grid])
    out = []
    for i in np.nonzero(np.sign(hv[:-1]) * np.sign(hv[1:]) <= 0)[0]:
        if hv[i] == 0.0:
            root = float(grid[i])
        elif hv[i + 1] == 0.0:
            continue  # picked up as the left end of the next bracket
        else:
            root = _bisect(h, float(grid[i]), float(grid[i + 1]), float(hv[i]))
        gr = gam(root)
        # F' has the sign of 1 - t dgamma/dt, so a maximum is where h turns positive
        is_max = hv[i + 1] > 0 or (hv[i] == 0.0 and i > 0 and hv[i - 1] < 0)
        out.append((FisherPoint(root, _fisher_value(g.n_atoms, mode, root, gr), gr), bool(is_max)))
    return gam, out


def extremum_times(sd: SpectralDensity, g: CloudGeometry, ts: ThermalState, mode: Mode, t_max: float,
                   spec: QuadratureSpec | None = None, *, t_min: float | None = None,
                   points_per_decade: int = POINTS_PER_DECADE, method: str = "auto",
                   maxima_only: bool = False) -> list[FisherPoint]:
    """All roots of ``t dgamma/dt = 1`` in ``[t_min, t_max]``, as Fisher points.

    Roots are bracketed on a log-spaced grid and refined by bisection; the
    derivative is a central difference with step ``1e-4 t``.  With
    ``maxima_only`` only the local maxima of the Fisher information are kept.
    """
    _, found = _extrema(sd, g, ts, Mode(mode), t_max, spec, t_min, points_per_decade, method)
    return [p for p, is_max in found if is_max or not maxima_only]


def best_time_pair(sd: SpectralDensity, g: CloudGeometry, ts: ThermalState, mode: Mode, t_max: float,
                   spec: QuadratureSpec | None = None, *, t_min: float | None = None,
                   points_per_decade: int = POINTS_PER_DECADE,
                   method: str = "auto") -> tuple[FisherPoint, FisherPoint]:
    """Both best-time conventions from one root search: ``(first_local, global)``.

    See :func:`best_time` for the two conventions.
    """
    mode = Mode(mode)
    gam, found = _extrema(sd, g, ts, mode, t_max, spec, t_min, points_per_decade, method)
    gmax = gam(t_max)
    candidates = [p for p, _ in found]
    candidates.append(FisherPoint(t_max, _fisher_value(g.n_atoms, mode, t_max, gmax), gmax))
    best = candidates[0]
    for c in candidates[1:]:
        if c.fisher > best.fisher or (c.fisher == best.fisher and c.t < best.t):
            best = c
    best = FisherPoint(best.t, best.fisher, best.gamma, is_global_max=True)
    maxima = [p for p, is_max in found if is_max]
    if not maxima:
        return best, best
    b = maxima[0]
    return FisherPoint(b.t, b.fisher, b.gamma, is_global_max=b.t == best.t), best


def best_time(sd: SpectralDensity, g: CloudGeometry, ts: ThermalState, mode: Mode, t_max: float,
              spec: QuadratureSpec | None = None, *, t_min: float | None = None,
              points_per_decade: int = POINTS_PER_DECADE, method: str = "auto",
              selection: str = "global") -> FisherPoint:
    """Best interrogation time on ``(0, t_max]``.

    ``selection="global"`` returns the maximiser of the optimal-detuning Fisher
    information among the roots of ``t dgamma/dt = 1`` and ``t_max`` itself;
    ties go to the smaller time.  ``selection="first_local"`` returns the
    earliest local maximum (the first solution of ``t dgamma/dt = 1`` where
    ``F`` peaks) and falls back to the global choice when there is none.
    """
    if selection not in ("global", "first_local"):
        raise ValueError(f"unknown selection {selection!r}")
    first, best = best_time_pair(sd, g, ts, mode, t_max, spec, t_min=t_min,
                                 points_per_decade=points_per_decade, method=method)
    return first if selection == "first_local" else best


def t_best_zeno(sd: SpectralDensity, g: CloudGeometry, ts: ThermalState) -> float:
    """Best time from the short-time ansatz ``gamma ~ f t^2``, i.e. ``(2 f)^(-1/2)``.

    Zero temperature keeps ``1 - cos wt ~ (wt)^2 / 2``; finite temperature
    additionally uses ``coth(w / 2 theta) ~ 2 theta / w`` (leading thermal
    term, valid for large ``N``).
    """
    n2 = g.n_atoms ** 2
    w_eff = effective_cutoff(sd, g)
    s = sd.s
    if ts.is_zero:
        two_f = 0.5 * sd.alpha_s * n2 * w_eff ** (s + 3) * gamma_fn(0.5 * (s + 3))
    else:
        two_f = sd.alpha_s * ts.theta * n2 * w_eff ** (s + 2) * gamma_fn(0.5 * (s + 2))
    if two_f == 0.0:
        return math.inf
    return two_f ** -0.5


# ---------------------------------------------------------------------------
# thresholds

# (all-time, Zeno) thresholds on s, strict inequalities
_THRESHOLDS = {
    ("3D", "zero"): (5.0, 3.0),
    ("3D", "finite"): (6.0, 4.0),
    ("1D", "zero"): (3.0, 1.0),
    ("1D", "finite"): (4.0, 1.0),
}


def classify_threshold(s: float, dimension: str = "3D", temperature_class: str = "zero") -> ThresholdReport:
    """Whether collective dephasing vanishes as ``N -> inf``.

    ``all_time_suppression`` refers to the stationary value, ``zeno_suppression``
    to the short-time regime.  A value of ``s`` exactly at a threshold does not
    suppress.
    """
    if not s > -1:
        raise DomainError(f"spectral exponent must satisfy s > -1, got s={s}")
    key = (dimension.upper(), temperature_class.lower())
    if key not in _THRESHOLDS:
        raise DomainError(f"unknown dimension/temperature class {dimension!r}/{temperature_class!r}")
    all_time, zeno = _THRESHOLDS[key]
    return ThresholdReport(s=s, dimension=key[0], temperature_class=key[1],
                           all_time_suppression=s > all_time, zeno_suppression=s > zeno)


def n_scaling_exponent(s: float, temperature_class: str = "zero", regime: str = "stationary") -> float:
    """Exponent ``p`` in ``gamma_N ~ N^p`` for a 3D cloud with ``w_s -> inf``."""
    shift = {("zero", "stationary"): 1, ("zero", "zeno"): 3,
             ("finite", "stationary"): 0, ("finite", "zeno"): 2}[(temperature_class, regime)]
    return 2.0 - (s + shift) / 3.0


# ---------------------------------------------------------------------------
# sweeps


def sweep_fisher(sd: SpectralDensity, g_template: CloudGeometry, ts: ThermalState, mode: Mode,
                 t_grid: Sequence[float], n_grid: Sequence[int],
                 spec: QuadratureSpec | None = None, method: str = "auto") -> FisherTable:
    """Tabulate the optimal-detuning Fisher information on ``n_grid x t_grid``.

    ``is_global_max`` marks, per row, the grid time with the largest value.
    """
    t = np.asarray(t_grid, dtype=float)
    n = np.asarray(n_grid, dtype=int)
    if t.size == 0 or n.size == 0:
        raise DomainError("grids must be nonempty")
    if np.any(np.diff(t) <= 0) or np.any(np.diff(n) <= 0):
        raise DomainError("grids must be strictly ascending")
    mode = Mode(mode)
    fisher = np.empty((n.size, t.size))
    gamma = np.empty_like(fisher)
    for i, n_atoms in enumerate(n):
        g = g_template.with_n(int(n_atoms))
        gam = gamma_evaluator(sd, g, ts, mode, spec, method)
        for j, tj in enumerate(t):
            gamma[i, j] = gam(float(tj))
            fisher[i, j] = _fisher_value(int(n_atoms), mode, float(tj), gamma[i, j])
    flags = np.zeros(fisher.shape, dtype=bool)
    flags[np.arange(n.size), np.argmax(fisher, axis=1)] = True
    return FisherTable(t=t, n=n, fisher=fisher, gamma=gamma, is_global_max=flags)
