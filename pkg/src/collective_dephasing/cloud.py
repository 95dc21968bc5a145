"""Atomic-cloud geometry and structure factors.

The cloud is an isotropic Gaussian with per-axis variance ``sigma^2 N^(2/3)``
holding ``N`` atoms.  Its coherent structure factor ``|E G_N(k)|^2`` is what
enters the continuum dephasing integral; the discrete, angle-averaged
``|G_N(k)|^2`` of a concrete configuration serves as an oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .errors import DomainError

__all__ = [
    "CloudGeometry",
    "AtomPositions",
    "sample_positions",
    "structure_factor_continuum",
    "structure_factor_coherent_mean",
    "structure_factor_ensemble_mean",
    "structure_factor_discrete_angular",
]


@dataclass(frozen=True)
class CloudGeometry:
    """``N`` atoms, rms scale ``sigma`` and reservoir sound speed ``c``."""

    n_atoms: int
    sigma: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise DomainError(f"n_atoms must be a positive integer, got {self.n_atoms}")
        if not self.sigma > 0:
            raise DomainError(f"sigma must be > 0, got {self.sigma}")
        if not self.c > 0:
            raise DomainError(f"sound speed c must be > 0, got {self.c}")

    @property
    def w_bar(self) -> float:
        """Collective cutoff ``c / sigma``."""
        return self.c / self.sigma

    @property
    def variance(self) -> float:
        """Per-axis position variance ``sigma^2 N^(2/3)``."""
        return self.sigma ** 2 * self.n_atoms ** (2.0 / 3.0)

    def with_n(self, n_atoms: int) -> "CloudGeometry":
        return CloudGeometry(n_atoms=n_atoms, sigma=self.sigma, c=self.c)


@dataclass(frozen=True)
class AtomPositions:
    positions: np.ndarray  # shape (N, 3)

    def __post_init__(self):
        p = np.asarray(self.positions, dtype=float)
        if p.ndim != 2 or p.shape[1] != 3:
            raise DomainError(f"positions must have shape (N, 3), got {p.shape}")
        object.__setattr__(self, "positions", p)

    def __len__(self):
        return self.positions.shape[0]

    def pair_distances(self) -> np.ndarray:
        return pdist(self.positions)


def sample_positions(g: CloudGeometry, seed: int | np.random.SeedSequence) -> AtomPositions:
    """Draw ``N`` positions from the cloud density; deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    pos = rng.normal(0.0, np.sqrt(g.variance), size=(g.n_atoms, 3))
    return AtomPositions(pos)


def structure_factor_continuum(g: CloudGeometry, k):
    """Fourier transform of the cloud density, ``N exp(-k^2 sigma^2 N^(2/3) / 2)``."""
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise DomainError("wavenumber must be >= 0")
    out = g.n_atoms * np.exp(-0.5 * k ** 2 * g.variance)
    return float(out) if out.ndim == 0 else out


def structure_factor_coherent_mean(g: CloudGeometry, k):
    """``|E G_N(k)|^2 = N^2 exp(-k^2 sigma^2 N^(2/3))``, the continuum weight."""
    return structure_factor_continuum(g, k) ** 2


def structure_factor_ensemble_mean(g: CloudGeometry, k):
    """``E |G_N(k)|^2 = N + N (N - 1) exp(-k^2 sigma^2 N^(2/3))``.

    Differs from :func:`structure_factor_coherent_mean` by the incoherent
    self-term, which dominates once ``k sigma N^(1/3) >> 1``.
    """
    k = np.asarray(k, dtype=float)
    n = g.n_atoms
    out = n + n * (n - 1) * np.exp(-(k ** 2) * g.variance)
    return float(out) if out.ndim == 0 else out


def structure_factor_discrete_angular(p: AtomPositions, k, *, distances=None):
    """Angle average of ``|sum_j exp(-i k.r_j)|^2`` over directions of ``k``.

    Equals ``N + 2 sum_{i<j} sinc(k d_ij)``.  Pass precomputed pair
    ``distances`` to avoid recomputing them for many ``k``.
    """
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise DomainError("wavenumber must be >= 0")
    d = p.pair_distances() if distances is None else np.asarray(distances)
    n = len(p)
    kd = np.atleast_1d(np.multiply.outer(k, d))
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.sin(kd) / kd
    zero = kd == 0
    if zero.any():
        ratio[zero] = 1.0
    out = n + 2.0 * ratio.sum(axis=-1)
    if np.ndim(k) == 0 and np.ndim(out) > 0:
        out = out.reshape(())
    return float(out) if np.ndim(out) == 0 else out
