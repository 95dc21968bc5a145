"""Sampled atom clouds versus the continuum density.

Run with ``python demos/04_discrete_cloud_oracle.py``.
"""

# %% [markdown]
# The continuum model replaces the atoms by a Gaussian density.  A concrete
# cloud adds an incoherent self term, so the ensemble mean of the structure
# factor is ``N + N(N-1) exp(-k^2 sigma^2 N^(2/3))``.

# %%
import numpy as np

from collective_dephasing import CloudGeometry, SpectralDensity, ThermalState
from collective_dephasing.cloud import sample_positions, structure_factor_discrete_angular, structure_factor_ensemble_mean
from collective_dephasing.dephasing import gamma_collective, gamma_continuum_corrected, oracle_ensemble

cloud = CloudGeometry(64)
k = np.array([0.05, 0.2, 0.5, 1.0])
samples = np.array([structure_factor_discrete_angular(sample_positions(cloud, s), k)
                    for s in np.random.SeedSequence(1).spawn(200)])
print("sampled mean  ", np.round(samples.mean(axis=0), 2))
print("ensemble mean ", np.round(structure_factor_ensemble_mean(cloud, k), 2))

# %% [markdown]
# The same correction carries over to the dephasing factor.

# %%
sd = SpectralDensity.from_coupling_combo(4, 0.12)
t0 = ThermalState(0.0)
times = [0.5, 1.0]
ens = oracle_ensemble(sd, cloud, t0, times, n_seeds=50, seed=0)
for t, m, e in zip(times, ens.mean, ens.sem):
    print(f"w t = {t}: sampled {m:.5f} +- {e:.5f}   corrected continuum "
          f"{gamma_continuum_corrected(sd, cloud, t0, t):.5f}   bare continuum {gamma_collective(sd, cloud, t0, t):.5f}")
