import math

import numpy as np
import pytest
from scipy import integrate

from cayley_ac.model import PotentialDistribution, TreeModel
from cayley_ac.moments import SamplerConfig
from cayley_ac.spectra import ac_detector, band_edges, dos_disordered, dos_free, free_root_green, kesten_mckay

UNIFORM = PotentialDistribution("uniform_symmetric", 1.0)
POOL = SamplerConfig(pool_size=10_000, iterations=300, samples=10_000, replicas=16)


@pytest.mark.parametrize("M", [2, 3, 4, 6])
def test_center_density_closed_form(M):
    rho = dos_free(M, [0.0]).density[0]
    assert rho == pytest.approx(math.sqrt(M) / (math.pi * (M + 1)), abs=1e-10)
    assert free_root_green(M, 0j) == pytest.approx(1j * math.sqrt(M) / (M + 1), abs=1e-15)


@pytest.mark.parametrize("M", [2, 3, 5])
def test_matches_kesten_mckay(M):
    e = np.linspace(-2 * math.sqrt(M), 2 * math.sqrt(M), 1001)[1:-1]
    np.testing.assert_allclose(dos_free(M, e).density, kesten_mckay(M + 1, e), atol=1e-12)


@pytest.mark.parametrize("M", [2, 3])
def test_normalization_by_quadrature(M):
    lo, hi = band_edges(M)
    total, _ = integrate.quad(lambda x: dos_free(M, [x]).density[0], lo, hi, limit=200)
    assert total == pytest.approx(1.0, abs=1e-3)


def test_trapezoid_integral_on_fine_grid():
    lo, hi = band_edges(2)
    curve = dos_free(2, np.linspace(lo, hi, 2001))
    assert 0.95 <= curve.integral() <= 1.01
    assert curve.integral() == pytest.approx(1.0, abs=1e-3)


def test_support_and_symmetry():
    M = 3
    lo, hi = band_edges(M)
    assert (lo, hi) == (-2 * math.sqrt(M), 2 * math.sqrt(M))
    e = np.linspace(-5, 5, 2001)
    rho = dos_free(M, e).density
    inside = (e > lo) & (e < hi)
    assert np.all(rho[inside] > 0) and np.all(rho[~inside] == 0)
    np.testing.assert_allclose(rho, rho[::-1], atol=1e-12)
    assert dos_free(M, [hi - 1e-12]).density[0] < 1e-5


def test_zero_disorder_matches_free():
    e = np.array([-1.5, 0.0, 0.7, 2.5])
    curve = dos_disordered(TreeModel(2, 0.0), e, 1e-6, SamplerConfig(pool_size=100, iterations=10, samples=100))
    np.testing.assert_allclose(curve.density, dos_free(2, e).density, atol=1e-6)


def test_small_coupling_continuity():
    e = np.array([-1.0, 0.0, 1.0])
    cfg = SamplerConfig(pool_size=2000, iterations=100, samples=2000)
    curve = dos_disordered(TreeModel(2, 1e-6, UNIFORM), e, 1e-4, cfg)
    np.testing.assert_allclose(curve.density, dos_free(2, e).density, atol=1e-3)


def test_weak_disorder_near_free_at_center():
    # second-order shift in k is resolved at this sample size; allow it explicitly
    k = 0.1
    curve = dos_disordered(TreeModel(2, k, UNIFORM), [0.0], 1e-3, POOL, seed=1)
    free = dos_free(2, [0.0]).density[0]
    assert abs(curve.density[0] - free) <= 3 * curve.std_error[0] + k * k * free


def test_two_seed_consistency():
    e = [-2.0, 0.0, 1.0]
    cfg = SamplerConfig(pool_size=5000, iterations=200, samples=5000, replicas=8)
    a = dos_disordered(TreeModel(2, 0.3, UNIFORM), e, 1e-3, cfg, seed=1)
    b = dos_disordered(TreeModel(2, 0.3, UNIFORM), e, 1e-3, cfg, seed=2)
    assert np.all(np.abs(a.density - b.density) <= 3 * np.hypot(a.std_error, b.std_error))


def test_dos_rejects_real_axis():
    with pytest.raises(ValueError):
        dos_disordered(TreeModel(2, 0.1), [0.0], 0.0)


def test_detector_free_case_stable():
    v = ac_detector(TreeModel(2, 0.0), 1.0, (1e-1, 1e-3, 1e-5), SamplerConfig(pool_size=200, iterations=5, samples=200))
    assert v.verdict == "stable"
    assert v.medians[-1] == pytest.approx(math.sqrt(7) / 4, rel=1e-4)


def test_detector_weak_disorder_stable():
    cfg = SamplerConfig(pool_size=5000, iterations=300, samples=5000)
    assert ac_detector(TreeModel(2, 0.1, UNIFORM), 1.0, (1e-1, 1e-3, 1e-5), cfg).verdict == "stable"


def test_detector_strong_disorder_not_stable():
    cfg = SamplerConfig(pool_size=5000, iterations=300, samples=5000)
    v = ac_detector(TreeModel(2, 50.0, UNIFORM), 2.7, (1e-1, 1e-3, 1e-5), cfg)
    assert v.verdict in ("collapsing", "inconclusive")


def test_detector_ladder_validation():
    with pytest.raises(ValueError):
        ac_detector(TreeModel(2, 0.1), 1.0, (1e-3, 1e-2))


def test_replica_error_exceeds_single_pool_error():
    model = TreeModel(2, 0.3, UNIFORM)
    single = dos_disordered(model, [1.0], 1e-3, SamplerConfig(pool_size=2000, iterations=100, samples=16_000))
    replicated = dos_disordered(model, [1.0], 1e-3, SamplerConfig(pool_size=2000, iterations=100, samples=2000, replicas=8))
    assert single.samples == replicated.samples == 16_000
    assert replicated.std_error[0] > single.std_error[0]
