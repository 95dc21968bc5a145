"""Collective dephasing of GHZ probes in a common bosonic reservoir.

The package computes the dephasing factor of N qubits in a Gaussian atomic
cloud coupled to a power-law reservoir, and the Ramsey phase-estimation
precision that follows from it.

Modules
-------
numerics
    Gamma and Kummer functions, adaptive quadrature on ``(0, inf)``.
reservoir
    Spectral density and thermal factors.
cloud
    Cloud geometry, sampled atom positions and structure factors.
dephasing
    Collective and single-qubit dephasing factors, frequency shift, and the
    discrete-atom oracle.
metrology
    Fisher information, best interrogation time and suppression thresholds.
cli
    Scenario-file runner and figure presets.
"""
__version__ = "0.1.0"

from .cloud import AtomPositions, CloudGeometry, sample_positions
from .dephasing import (
    DephasingResult,
    dephasing,
    delta_shift,
    gamma_closed_form_T0,
    gamma_collective,
    gamma_single_qubit,
    gamma_stationary,
)
from .errors import AccuracyError, DomainError, SingularProbabilityError
from .metrology import (
    FisherPoint,
    MetrologyScenario,
    Mode,
    ThresholdReport,
    best_time,
    classify_threshold,
    fisher_optimal,
    t_best_zeno,
)
from .numerics import QuadratureSpec, gamma_fn, integrate_semi_infinite, kummer_m
from .reservoir import SpectralDensity, ThermalState

__all__ = [
    "AccuracyError",
    "AtomPositions",
    "CloudGeometry",
    "DephasingResult",
    "DomainError",
    "FisherPoint",
    "MetrologyScenario",
    "Mode",
    "QuadratureSpec",
    "SingularProbabilityError",
    "SpectralDensity",
    "ThermalState",
    "ThresholdReport",
    "best_time",
    "classify_threshold",
    "delta_shift",
    "dephasing",
    "fisher_optimal",
    "gamma_closed_form_T0",
    "gamma_collective",
    "gamma_fn",
    "gamma_single_qubit",
    "gamma_stationary",
    "integrate_semi_infinite",
    "kummer_m",
    "sample_positions",
    "t_best_zeno",
]
