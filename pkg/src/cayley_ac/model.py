"""Anderson model parameters on the Cayley tree: branching, coupling and potential law."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

KINDS = ("constant_zero", "uniform_symmetric", "bernoulli_pm1", "gaussian")


@dataclass(frozen=True)
class PotentialDistribution:
    """Single-site potential law.

    ``width`` is the half-width ``a`` of ``uniform_symmetric`` (support
    ``[-a, a]``); ``sigma`` is the standard deviation of ``gaussian``.
    """

    kind: str = "uniform_symmetric"
    width: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "uniform_symmetric" and not self.width > 0:
            raise ValueError("uniform width must be > 0")
        if self.kind == "gaussian" and not self.sigma > 0:
            raise ValueError("gaussian sigma must be > 0")

    def sample(self, rng: np.random.Generator, size=None):
        if self.kind == "constant_zero":
            return np.zeros(size) if size is not None else 0.0
        if self.kind == "uniform_symmetric":
            return rng.uniform(-self.width, self.width, size)
        if self.kind == "bernoulli_pm1":
            return 2.0 * rng.integers(0, 2, size) - 1.0
        return rng.normal(0.0, self.sigma, size)

    def moment_2_1p(self, p: float) -> float:
        return moment_2_1p(self, p)

    def describe(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "uniform_symmetric":
            d["width"] = self.width
        elif self.kind == "gaussian":
            d["sigma"] = self.sigma
        return d


def sample_potential(dist: PotentialDistribution, rng: np.random.Generator, size=None):
    return dist.sample(rng, size)


def moment_2_1p(dist: PotentialDistribution, p: float) -> float:
    """Closed-form ``int |q|^{2(1+p)} dnu(q)``."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    r = 2.0 * (1.0 + p)
    if dist.kind == "constant_zero":
        return 0.0
    if dist.kind == "bernoulli_pm1":
        return 1.0
    if dist.kind == "uniform_symmetric":
        return dist.width**r / (r + 1.0)
    # E|X|^r for X ~ N(0, sigma^2)
    return dist.sigma**r * 2.0 ** (r / 2.0) * math.gamma((r + 1.0) / 2.0) / math.sqrt(math.pi)


@dataclass(frozen=True)
class TreeModel:
    """``H = Laplacian + k q`` on the tree with ``M`` forward neighbours per vertex."""

    branching: int = 2
    coupling: float = 0.0
    potential: PotentialDistribution = PotentialDistribution()

    def __post_init__(self):
        if int(self.branching) != self.branching or self.branching < 2:
            raise ValueError(f"branching must be an integer >= 2, got {self.branching}")
        if not math.isfinite(self.coupling):
            raise ValueError("coupling must be finite")

    @property
    def band_edge(self) -> float:
        return 2.0 * math.sqrt(self.branching)

    @property
    def is_free(self) -> bool:
        return self.coupling == 0.0 or self.potential.kind == "constant_zero"
