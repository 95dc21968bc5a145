import math

import numpy as np
import pytest

from collective_dephasing.cloud import (
    AtomPositions,
    CloudGeometry,
    sample_positions,
    structure_factor_coherent_mean,
    structure_factor_continuum,
    structure_factor_discrete_angular,
    structure_factor_ensemble_mean,
)
from collective_dephasing.errors import DomainError


@pytest.mark.parametrize("kwargs", [dict(n_atoms=0), dict(n_atoms=2.5), dict(n_atoms=3, sigma=0.0),
                                    dict(n_atoms=3, c=-1.0)])
def test_geometry_validation(kwargs):
    with pytest.raises(DomainError):
        CloudGeometry(**kwargs)


def test_geometry_derived_quantities():
    g = CloudGeometry(1000, sigma=0.5, c=2.0)
    assert g.w_bar == 4.0
    assert g.variance == pytest.approx(0.25 * 100.0)
    assert g.with_n(8).variance == pytest.approx(0.25 * 4.0)


def test_positions_shape_checked():
    with pytest.raises(DomainError):
        AtomPositions(np.zeros((4, 2)))


def test_sampling_is_deterministic():
    g = CloudGeometry(50)
    a, b = sample_positions(g, 11), sample_positions(g, 11)
    np.testing.assert_array_equal(a.positions, b.positions)
    assert not np.array_equal(a.positions, sample_positions(g, 12).positions)


def test_sampling_variance():
    g = CloudGeometry(20000, sigma=0.3)
    p = sample_positions(g, 3).positions
    assert p.var(axis=0) == pytest.approx([g.variance] * 3, rel=0.05)


def test_continuum_structure_factor():
    g = CloudGeometry(64)
    assert structure_factor_continuum(g, 0.0) == 64
    k = np.array([0.1, 0.5])
    np.testing.assert_allclose(structure_factor_coherent_mean(g, k), 64 ** 2 * np.exp(-k ** 2 * 16.0))
    with pytest.raises(DomainError):
        structure_factor_continuum(g, -1.0)


def test_discrete_structure_factor_limits():
    g = CloudGeometry(12)
    p = sample_positions(g, 5)
    assert structure_factor_discrete_angular(p, 0.0) == pytest.approx(144.0)
    # far beyond the inverse pair distances only the self terms survive
    assert structure_factor_discrete_angular(p, 1e7) == pytest.approx(12.0, abs=1e-5)


def test_discrete_structure_factor_matches_direction_average():
    rng = np.random.default_rng(1)
    p = AtomPositions(rng.normal(size=(6, 3)))
    k = 1.3
    # Monte Carlo over unit vectors versus the sinc closed form
    u = rng.normal(size=(200000, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    phases = np.exp(-1j * k * u @ p.positions.T).sum(axis=1)
    mc = np.mean(np.abs(phases) ** 2)
    assert structure_factor_discrete_angular(p, k) == pytest.approx(mc, rel=1e-2)


def test_discrete_structure_factor_vectorized():
    p = sample_positions(CloudGeometry(9), 2)
    ks = np.array([0.0, 0.2, 1.0])
    vec = structure_factor_discrete_angular(p, ks)
    assert vec.shape == (3,)
    for k, v in zip(ks, vec):
        assert structure_factor_discrete_angular(p, k) == pytest.approx(v, rel=1e-14)
    with pytest.raises(DomainError):
        structure_factor_discrete_angular(p, -0.1)


def test_ensemble_mean_between_coherent_and_incoherent():
    g = CloudGeometry(64)
    k = np.linspace(0, 2, 9)
    em = structure_factor_ensemble_mean(g, k)
    assert np.all(em >= 64 - 1e-12)
    assert np.all(em <= structure_factor_coherent_mean(g, k) + 64 + 1e-9)
    assert structure_factor_ensemble_mean(g, 0.0) == 64 ** 2
