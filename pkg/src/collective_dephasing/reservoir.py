"""Reservoir spectral density and thermal occupation kernel.

Frequencies are measured in units of a reference frequency chosen by the
caller (the collective cutoff ``w_bar`` throughout this package) and the
temperature ``theta`` in units of ``hbar * w_bar / k_B``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numerics import gamma_fn

__all__ = ["SpectralDensity", "ThermalState", "j_eval", "thermal_kernel"]

# Below this value of w/theta the series 2 theta/w + w/(6 theta) replaces coth.
_SMALL_ARG = 1e-4


@dataclass(frozen=True)
class SpectralDensity:
    """Power-law density ``J(w) = alpha_s * w**s * exp(-w**2 / w_s**2)``.

    ``w_s`` may be ``math.inf`` to drop the reservoir cutoff entirely.
    """

    s: float
    alpha_s: float
    w_s: float

    def __post_init__(self):
        if not self.s > -1:
            raise DomainError(f"spectral exponent must satisfy s > -1, got s={self.s}")
        if not self.alpha_s >= 0:
            raise DomainError(f"alpha_s must be >= 0, got {self.alpha_s}")
        if not self.w_s > 0:
            raise DomainError(f"cutoff w_s must be > 0, got {self.w_s}")

    @classmethod
    def from_coupling_combo(cls, s: float, combo: float, w_bar: float = 1.0, w_s: float | None = None):
        """Build from ``combo = alpha_s * w_bar**(s+1) * Gamma((s+1)/2) / 2``.

        This is the dimensionless coupling the figure captions fix; ``w_s``
        defaults to ``w_bar``.
        """
        if not s > -1:
            raise DomainError(f"spectral exponent must satisfy s > -1, got s={s}")
        alpha = 2.0 * combo / (w_bar ** (s + 1) * gamma_fn((s + 1) / 2))
        return cls(s=s, alpha_s=alpha, w_s=w_bar if w_s is None else w_s)

    def __call__(self, w):
        return j_eval(self, w)


@dataclass(frozen=True)
class ThermalState:
    """Reservoir temperature ``theta = k_B T / (hbar w_bar)``; 0 means T = 0."""

    theta: float = 0.0

    def __post_init__(self):
        if not self.theta >= 0:
            raise DomainError(f"temperature must be >= 0, got theta={self.theta}")

    @property
    def is_zero(self) -> bool:
        return self.theta == 0.0


def j_eval(sd: SpectralDensity, w):
    """Evaluate ``J(w)``; accepts scalars or arrays with ``w >= 0``."""
    w_arr = np.asarray(w, dtype=float)
    if np.any(w_arr < 0):
        raise DomainError("spectral density requires w >= 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        power = np.where(w_arr > 0, w_arr ** sd.s, 1.0 if sd.s == 0 else 0.0)
    if sd.s < 0:
        power = np.where(w_arr > 0, power, np.inf)
    out = sd.alpha_s * power * np.exp(-(w_arr / sd.w_s) ** 2)
    return float(out) if np.ndim(out) == 0 else out


def thermal_kernel(ts: ThermalState, w):
    """``coth(w / (2 theta))``, exactly 1 at ``theta = 0``.

    Small ``w / theta`` uses ``2 theta / w + w / (6 theta)``.
    """
    w_arr = np.asarray(w, dtype=float)
    if np.any(w_arr <= 0):
        raise DomainError("thermal kernel requires w > 0")
    if ts.theta == 0.0:
        out = np.ones_like(w_arr)
    else:
        x = w_arr / (2.0 * ts.theta)
        small = w_arr / ts.theta < _SMALL_ARG
        with np.errstate(over="ignore"):
            big = 1.0 / np.tanh(np.where(small, 1.0, x))
        out = np.where(small, 1.0 / x + x / 3.0, big)
    return float(out) if np.ndim(out) == 0 else out


def thermal_weight(ts: ThermalState, w):
    """``w * coth(w / (2 theta))`` with its finite limit ``2 theta`` at ``w = 0``.

    Integrands that carry ``coth`` against a factor vanishing at the origin use
    this form so that ``w = 0`` never produces ``0 / 0``.
    """
    w_arr = np.asarray(w, dtype=float)
    if ts.theta == 0.0:
        out = w_arr.copy()
    else:
        safe = np.where(w_arr > 0, w_arr, 1.0)
        out = np.where(w_arr > 0, safe * thermal_kernel(ts, safe), 2.0 * ts.theta)
    return float(out) if np.ndim(out) == 0 else out


def occupation_number(ts: ThermalState, w: float) -> float:
    """Bose occupation ``(coth(w/2theta) - 1) / 2`` (0 at zero temperature)."""
    if ts.theta == 0.0:
        return 0.0
    return 1.0 / math.expm1(w / ts.theta)
