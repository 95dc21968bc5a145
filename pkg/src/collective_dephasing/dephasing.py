"""Collective and single-qubit dephasing factors.

The collective dephasing factor of an ``N``-atom GHZ state in a Gaussian cloud
is

    gamma_N(t) = N^2 int_0^inf J(w) (1 - cos wt) coth(w / 2 theta)
                 exp(-w^2 sigma^2 N^(2/3) / c^2) dw

with ``J(w) = alpha_s w^s exp(-w^2/w_s^2)``.  Both Gaussians multiply, so the
integrand carries a single Gaussian of width ``w_eff`` with
``1/w_eff^2 = N^(2/3)/w_bar^2 + 1/w_s^2`` (see :func:`effective_cutoff`).
At zero temperature the integral has the closed form

    gamma_N(t) = (alpha_s/2) N^2 w_eff^(s+1) Gamma((s+1)/2)
                 [1 - exp(-z) M(-s/2, 1/2, z)],     z = w_eff^2 t^2 / 4,

which for ``w_s -> inf`` is the familiar
``(alpha_s/2) N^(2-(s+1)/3) w_bar^(s+1) Gamma((s+1)/2) [...]``.

Temperature ``theta`` is a frequency (``k_B T / hbar``) in the same units as
``w``; with ``w_bar = 1`` it is measured in ``hbar w_bar / k_B``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cloud import AtomPositions, CloudGeometry, sample_positions, structure_factor_discrete_angular
from .errors import DomainError
from .numerics import QuadratureSpec, gamma_fn, integrate_semi_infinite, kummer_m_scaled
from .reservoir import SpectralDensity, ThermalState, thermal_weight

__all__ = [
    "DephasingResult",
    "OracleGamma",
    "OracleEnsemble",
    "effective_cutoff",
    "gamma_collective",
    "gamma_closed_form_T0",
    "gamma_single_qubit",
    "gamma_single_closed_form_T0",
    "gamma_stationary",
    "gamma_single_stationary",
    "delta_shift",
    "dephasing",
    "gamma_discrete_oracle",
    "gamma_continuum_corrected",
    "oracle_ensemble",
    "dgamma_dt_collective",
]


@dataclass(frozen=True)
class DephasingResult:
    gamma: float
    delta: float
    t: float


@dataclass(frozen=True)
class OracleGamma:
    """Discrete-cloud dephasing split into self and pair contributions.

    ``total = incoherent + coherent``; ``coherent`` comes from the pair
    (interference) terms of the structure factor only.
    """

    total: float
    coherent: float
    incoherent: float


def _check_time(t):
    if not t >= 0:
        raise DomainError(f"time must be >= 0, got t={t}")


def effective_cutoff(sd: SpectralDensity, g: CloudGeometry) -> float:
    """Width of the combined Gaussian ``exp(-w^2/w_s^2 - w^2 N^(2/3)/w_bar^2)``."""
    inv_sq = g.n_atoms ** (2.0 / 3.0) / g.w_bar ** 2 + 1.0 / sd.w_s ** 2
    return 1.0 / math.sqrt(inv_sq)


def _one_minus_cos(x):
    return 2.0 * np.sin(0.5 * x) ** 2


def _x_minus_sin(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 0.1
    x2 = x * x
    series = x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
    return np.where(small, series, x - np.sin(x))


def _scaled_power_thermal(s: float, ts: ThermalState, width: float, x):
    """``x^s coth(x width / 2 theta)`` for ``x > 0``."""
    if ts.is_zero:
        return x ** s
    return x ** (s - 1.0) * thermal_weight(ts, x * width) / width


def _period(t):
    return None if t == 0 else 2.0 * math.pi / t


def _gaussian_integral(sd: SpectralDensity, width: float, ts: ThermalState,
                       kernel, t: float | None, spec: QuadratureSpec | None) -> float:
    """``alpha_s int w^s coth(...) exp(-w^2/width^2) kernel(w t) dw``.

    Evaluated in the dimensionless variable ``x = w / width`` so that the
    quadrature tolerances act on an O(1) integrand whatever the width.
    ``t = None`` drops the kernel (stationary limit).
    """
    if sd.alpha_s == 0.0:
        return 0.0
    tau = None if t is None else t * width

    def f(x):
        out = _scaled_power_thermal(sd.s, ts, width, x) * np.exp(-x * x)
        return out if tau is None else out * kernel(x * tau)

    period = None if tau is None else _period(tau)
    return sd.alpha_s * width ** (sd.s + 1) * integrate_semi_infinite(f, period, spec)


# ---------------------------------------------------------------------------
# collective


def gamma_collective(sd: SpectralDensity, g: CloudGeometry, ts: ThermalState, t: float,
                     spec: QuadratureSpec | None = None) -> float:
    """Collective dephasing factor by quadrature (any temperature)."""
    _check_time(t)
    if t == 0:
        return 0.0
    w_eff = effective_cutoff(sd, g)
    return g.n_atoms ** 2 * _gaussian_integral(sd, w_eff, ts, _one_minus_cos, t, spec)


def dgamma_dt_collective(sd: SpectralDensity, g: CloudGeometry, ts: ThermalState, t: float,
                         spec: QuadratureSpec | None = None) -> float:
    """Time derivative of :func:`gamma_collective` by differentiating under the integral."""
    _check_time(t)
    if t == 0 or sd.alpha_s == 0.0:
        return 0.0
    w_eff = effective_cutoff(sd, g)
    return g.n_atoms ** 2 * _gaussian_integral(sd, w_eff, ts, lambda u: u * np.sin(u), t, spec) / t


def _one_minus_scaled_kummer(s: float, z: float) -> float:
    """``1 - exp(-z) M(-s/2, 1/2, z)``, accurate also for small ``z``."""
    if z < 0.5:
        # 1 - M((s+1)/2, 1/2, -z) summed directly; alternating, no cancellation
        a = 0.5 * (s + 1)
        term = 1.0
        total = 0.0
        n = 0
        while True:
            term *= (a + n) / (0.5 + n) * (-z) / (n + 1)
            total -= term
            n += 1
            if abs(term) <= 1e-17 * abs(total) or n > 200:
                return total
    return 1.0 - kummer_m_scaled(-0.5 * s, 0.5, z)


def _closed_form(alpha_s: float, s: float, prefactor: float, width: float, t: float) -> float:
    amp = 0.5 * alpha_s * prefactor * width ** (s + 1) * gamma_fn(0.5 * (s + 1))
    if t == 0 or amp == 0.0:
        return 0.0
    z = 0.25 * (width * t) ** 2
    return amp * _one_minus_scaled_kummer(s, z)


def gamma_closed_form_T0(sd: SpectralDensity, g: CloudGeometry, t: float) -> float:
    """Zero-temperature collective dephasing factor from the Kummer closed form.

    Exact for the product of the reservoir and cloud Gaussians; with
    ``sd.w_s = inf`` it reduces to the pure cloud-cutoff expression.
    """
    _check_time(t)
    return _closed_form(sd.alpha_s, sd.s, g.n_atoms ** 2, effective_cutoff(sd, g), t)


def gamma_stationary(sd: SpectralDensity, g: CloudGeometry, ts: ThermalState,
                     spec: QuadratureSpec | None = None) -> float:
    """``t -> inf`` limit of the collective dephasing factor.

    At ``theta = 0`` this is ``(alpha_s/2) N^2 w_eff^(s+1) Gamma((s+1)/2)``.
    At finite temperature the ``cos`` term averages out and the remaining
    integral is done by quadrature; it requires ``s > 0``.
    """
    w_eff = effective_cutoff(sd, g)
    n2 = g.n_atoms ** 2
    if ts.is_zero:
        return 0.5 * sd.alpha_s * n2 * w_eff ** (sd.s + 1) * gamma_fn(0.5 * (sd.s + 1))
    if not sd.s > 0:
        raise DomainError(f"finite-temperature stationary value diverges for s <= 0 (s={sd.s})")
    return n2 * _gaussian_integral(sd, w_eff, ts, None, None, spec) if sd.alpha_s else 0.0


# ---------------------------------------------------------------------------
# single qubit


def _require_finite_cutoff(sd: SpectralDensity):
    if not math.isfinite(sd.w_s):
        raise DomainError("single-qubit dephasing needs a finite cutoff w_s")


def gamma_single_qubit(sd: SpectralDensity, ts: ThermalState, t: float,
                       spec: QuadratureSpec | None = None) -> float:
    """Single-qubit dephasing factor; the only Gaussian is the one inside ``J``."""
    _check_time(t)
    _require_finite_cutoff(sd)
    if t == 0:
        return 0.0
    return _gaussian_integral(sd, sd.w_s, ts, _one_minus_cos, t, spec)


def gamma_single_closed_form_T0(sd: SpectralDensity, t: float) -> float:
    _check_time(t)
    _require_finite_cutoff(sd)
    return _closed_form(sd.alpha_s, sd.s, 1.0, sd.w_s, t)


def gamma_single_stationary(sd: SpectralDensity, ts: ThermalState,
                            spec: QuadratureSpec | None = None) -> float:
    _require_finite_cutoff(sd)
    if ts.is_zero:
        return 0.5 * sd.alpha_s * sd.w_s ** (sd.s + 1) * gamma_fn(0.5 * (sd.s + 1))
    if not sd.s > 0:
        raise DomainError(f"finite-temperature stationary value diverges for s <= 0 (s={sd.s})")
    return _gaussian_integral(sd, sd.w_s, ts, None, None, spec) if sd.alpha_s else 0.0


# ---------------------------------------------------------------------------
# frequency shift


def delta_shift(sd: SpectralDensity, g: CloudGeometry, t: float,
                spec: QuadratureSpec | None = None) -> float:
    """Reservoir-induced phase ``-N^2 int J(w) (wt - sin wt) exp(...) dw``.

    Independent of temperature and nonincreasing in ``t``.
    """
    _check_time(t)
    if t == 0:
        return 0.0
    w_eff = effective_cutoff(sd, g)
    return -g.n_atoms ** 2 * _gaussian_integral(sd, w_eff, ThermalState(0.0), _x_minus_sin, t, spec)


def dephasing(sd: SpectralDensity, g: CloudGeometry, ts: ThermalState, t: float,
              spec: QuadratureSpec | None = None) -> DephasingResult:
    return DephasingResult(
        gamma=gamma_collective(sd, g, ts, t, spec),
        delta=delta_shift(sd, g, t, spec),
        t=t,
    )


# ---------------------------------------------------------------------------
# discrete-atom oracle


def gamma_discrete_oracle(sd: SpectralDensity, p: AtomPositions, g: CloudGeometry,
                          ts: ThermalState, t: float,
                          spec: QuadratureSpec | None = None) -> OracleGamma:
    """Dephasing of a concrete atom configuration.

    Replaces the Gaussian continuum weight by the angle-averaged discrete
    structure factor ``S(w/c) = N + 2 sum_{i<j} sinc(w d_ij / c)``.  Only the
    reservoir cutoff ``w_s`` bounds the integral, so it must be finite.
    ``g`` supplies the sound speed.
    """
    _check_time(t)
    _require_finite_cutoff(sd)
    n = len(p)
    if t == 0 or sd.alpha_s == 0.0:
        return OracleGamma(0.0, 0.0, 0.0)
    d = p.pair_distances()

    def base(w):
        return (sd.alpha_s * w ** sd.s * _scaled_power_thermal(0.0, ts, 1.0, w)
                * np.exp(-(w / sd.w_s) ** 2) * _one_minus_cos(w * t))

    def pairs(w):
        return base(w) * (structure_factor_discrete_angular(p, w / g.c, distances=d) - n)

    single = integrate_semi_infinite(base, _period(t), spec, scale=sd.w_s)
    coherent = integrate_semi_infinite(pairs, _period(t), spec, scale=sd.w_s) if n > 1 else 0.0
    incoherent = n * single
    return OracleGamma(total=incoherent + coherent, coherent=coherent, incoherent=incoherent)


@dataclass(frozen=True)
class OracleEnsemble:
    """Seed-averaged discrete dephasing at a set of times."""

    t: np.ndarray
    mean: np.ndarray
    sem: np.ndarray
    n_seeds: int


def gamma_continuum_corrected(sd: SpectralDensity, g: CloudGeometry, ts: ThermalState, t: float,
                              spec: QuadratureSpec | None = None) -> float:
    """Continuum prediction for the ensemble-averaged discrete cloud.

    The ensemble mean of ``|G(k)|^2`` is ``N + N(N-1) exp(-k^2 v)`` rather
    than ``N^2 exp(-k^2 v)``: the pair part is the continuum value scaled by
    ``(N-1)/N`` and the self part adds ``N`` independent single-qubit terms.
    """
    n = g.n_atoms
    return gamma_collective(sd, g, ts, t, spec) * (n - 1) / n + n * gamma_single_qubit(sd, ts, t, spec)


def oracle_ensemble(sd: SpectralDensity, g: CloudGeometry, ts: ThermalState, t_values,
                    n_seeds: int, seed: int = 0, spec: QuadratureSpec | None = None) -> OracleEnsemble:
    """Average :func:`gamma_discrete_oracle` over independently sampled clouds.

    Cloud ``i`` is drawn from the ``i``-th child of ``SeedSequence(seed)``, so
    the result depends only on ``(seed, n_seeds)``.
    """
    if n_seeds < 2:
        raise DomainError(f"need at least 2 seeds for a standard error, got {n_seeds}")
    t_arr = np.asarray(t_values, dtype=float)
    samples = np.empty((n_seeds, t_arr.size))
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(n_seeds)):
        p = sample_positions(g, child)
        for j, t in enumerate(t_arr):
            samples[i, j] = gamma_discrete_oracle(sd, p, g, ts, float(t), spec).total
    return OracleEnsemble(t=t_arr, mean=samples.mean(axis=0),
                          sem=samples.std(axis=0, ddof=1) / math.sqrt(n_seeds), n_seeds=n_seeds)
