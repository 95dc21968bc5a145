"""Collective dephasing of a GHZ state in a common phonon bath.

Run with ``python demos/01_dephasing_curves.py``.
"""

# %% [markdown]
# A cloud of N qubits shares one bosonic reservoir.  The collective dephasing
# factor gamma_N(t) grows from zero, and at zero temperature it saturates at a
# stationary value.  The coupling is fixed through the dimensionless
# combination ``alpha_s w_bar^(s+1) Gamma((s+1)/2) / 2``.

# %%
import numpy as np

from collective_dephasing import (
    CloudGeometry,
    SpectralDensity,
    ThermalState,
    gamma_closed_form_T0,
    gamma_collective,
    gamma_stationary,
)

sd = SpectralDensity.from_coupling_combo(4, 0.12)  # s = 4, reservoir cutoff w_s = w_bar
cloud = CloudGeometry(1000)

# %% [markdown]
# At zero temperature a confluent hypergeometric closed form is available and
# agrees with direct quadrature.

# %%
for t in (0.1, 1.0, 10.0, 100.0):
    quad = gamma_collective(sd, cloud, ThermalState(0.0), t)
    exact = gamma_closed_form_T0(sd, cloud, t)
    print(f"w t = {t:6.1f}   quadrature {quad:.12f}   closed form {exact:.12f}")

# %% [markdown]
# Heating the reservoir raises gamma at every time.  At finite temperature
# gamma keeps approaching its stationary value slowly.

# %%
times = np.geomspace(0.01, 100, 9)
for theta in (0.0, 0.5, 1.0):
    ts = ThermalState(theta)
    row = " ".join(f"{gamma_collective(sd, cloud, ts, t):8.4f}" for t in times)
    print(f"theta = {theta:3.1f}: {row}   stationary {gamma_stationary(sd, cloud, ts):.4f}")

# %% [markdown]
# Without the reservoir cutoff the stationary value at zero temperature is
# exactly ``combo * N^(2 - (s+1)/3)``, that is 1.2 for N = 1000.

# %%
print(gamma_stationary(SpectralDensity.from_coupling_combo(4, 0.12, w_s=np.inf), cloud, ThermalState(0.0)))
