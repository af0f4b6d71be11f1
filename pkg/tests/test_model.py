import math

import numpy as np
import pytest
from scipy import integrate, stats

from cayley_ac.model import PotentialDistribution, TreeModel, moment_2_1p
from cayley_ac.rng import derive_rng


def test_uniform_moment_at_half():
    assert moment_2_1p(PotentialDistribution("uniform_symmetric", 1.0), 0.5) == pytest.approx(0.25, rel=1e-15)


@pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
@pytest.mark.parametrize("width", [0.5, 1.0, 3.0])
def test_uniform_moment_by_quadrature(p, width):
    r = 2 * (1 + p)
    quad, _ = integrate.quad(lambda x: abs(x) ** r / (2 * width), -width, width)
    assert moment_2_1p(PotentialDistribution("uniform_symmetric", width), p) == pytest.approx(quad, rel=1e-10)


@pytest.mark.parametrize("p", [0.2, 0.5])
def test_gaussian_moment_by_quadrature(p):
    sigma = 1.7
    r = 2 * (1 + p)
    quad, _ = integrate.quad(lambda x: abs(x) ** r * stats.norm.pdf(x, scale=sigma), -np.inf, np.inf)
    assert moment_2_1p(PotentialDistribution("gaussian", sigma=sigma), p) == pytest.approx(quad, rel=1e-8)


def test_discrete_moments():
    assert moment_2_1p(PotentialDistribution("bernoulli_pm1"), 0.5) == 1.0
    assert moment_2_1p(PotentialDistribution("constant_zero"), 0.5) == 0.0


@pytest.mark.parametrize("kind", ["uniform_symmetric", "bernoulli_pm1", "gaussian", "constant_zero"])
def test_samples_are_seeded_and_symmetric(kind):
    d = PotentialDistribution(kind)
    a = d.sample(derive_rng(3, 1), 20000)
    b = d.sample(derive_rng(3, 1), 20000)
    np.testing.assert_array_equal(a, b)
    assert abs(a.mean()) < 0.05


def test_invalid_distribution():
    with pytest.raises(ValueError):
        PotentialDistribution("cauchy")
    with pytest.raises(ValueError):
        PotentialDistribution("uniform_symmetric", width=0.0)


def test_tree_model():
    m = TreeModel(3, 0.0)
    assert m.is_free
    assert m.band_edge == pytest.approx(2 * math.sqrt(3))
    assert not TreeModel(2, 0.1).is_free
    with pytest.raises(ValueError):
        TreeModel(1, 0.1)
