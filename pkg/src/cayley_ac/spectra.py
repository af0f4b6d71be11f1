"""Density of states and a finite-eta absolutely-continuous-spectrum diagnostic."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .halfplane import fixed_point
from .model import TreeModel
from .moments import SamplerConfig, collapsed, forward_samples, mean_and_error, root_groups
from .rng import parallel_map


@dataclass
class DosCurve:
    energies: np.ndarray
    density: np.ndarray
    eta: float
    k: float
    M: int
    samples: int
    std_error: np.ndarray | None = None
    errors: dict = field(default_factory=dict)

    def integral(self) -> float:
        return float(trapezoid(self.density, self.energies))

    def rows(self):
        se = self.std_error if self.std_error is not None else np.zeros_like(self.density)
        return [
            {"energy": float(e), "density": float(d), "std_error": float(s)}
            for e, d, s in zip(self.energies, self.density, se)
        ]


def band_edges(M: int) -> tuple[float, float]:
    """Spectrum of the free Laplacian: ``[-2 sqrt(M), 2 sqrt(M)]``."""
    b = 2.0 * math.sqrt(M)
    return -b, b


def free_root_green(M: int, lam):
    """``-1/((M + 1) z_lam + lam)``, the lattice Green function without disorder."""
    lam = np.asarray(lam, dtype=np.complex128)
    return (-1.0 / ((M + 1) * np.asarray(fixed_point(M, lam)) + lam))[()]


def dos_free(M: int, energies) -> DosCurve:
    """``(1/pi) Im G_free(E)`` on the real axis; zero outside the open band."""
    e = np.asarray(energies, dtype=float)
    lo, hi = band_edges(M)
    inside = (e > lo) & (e < hi)
    rho = np.zeros_like(e)
    if np.any(inside):
        rho[inside] = np.imag(free_root_green(M, e[inside] + 0j)) / math.pi
    return DosCurve(e, rho, 0.0, 0.0, M, 0)


def kesten_mckay(d: int, x):
    """Kesten-McKay density for the adjacency operator of the ``d``-regular tree."""
    x = np.asarray(x, dtype=float)
    inside = x * x < 4.0 * (d - 1)
    out = np.zeros_like(x)
    xi = x[inside]
    out[inside] = d * np.sqrt(4.0 * (d - 1) - xi * xi) / (2.0 * math.pi * (d * d - xi * xi))
    return out[()]


def _dos_cell(task):
    model, e, eta, cfg, seed, i = task
    groups, n_bad, n = [], 0, 0
    for g in root_groups(model, complex(e, eta), cfg, seed, (i,)):
        bad = collapsed(g)
        n_bad += int(bad.sum())
        n += g.size
        groups.append(np.imag(g[~bad]) / math.pi)
    if n - n_bad < 2 or n_bad / n > 1e-6:
        return math.nan, math.nan, "boundary collapse"
    mean, se = mean_and_error(groups)
    return mean, se, None


def dos_disordered(model: TreeModel, energies, eta: float, config: SamplerConfig = SamplerConfig(), seed: int = 0, workers: int = 1) -> DosCurve:
    """Monte-Carlo mean of ``(1/pi) Im G(E + i eta)`` at the full-lattice root."""
    if not eta > 0:
        raise ValueError("eta must be > 0")
    e = np.asarray(energies, dtype=float)
    tasks = [(model, float(x), eta, config, seed, i) for i, x in enumerate(e)]
    res = parallel_map(_dos_cell, tasks, workers)
    rho = np.array([r[0] for r in res])
    se = np.array([r[1] for r in res])
    errors = {float(e[i]): r[2] for i, r in enumerate(res) if r[2]}
    n = config.samples * (config.replicas if config.method == "population" else 1)
    return DosCurve(e, rho, eta, model.coupling, model.branching, n, se, errors)


@dataclass
class AcVerdict:
    verdict: str
    etas: tuple
    medians: tuple


def ac_detector(
    model: TreeModel,
    energy: float,
    etas,
    config: SamplerConfig = SamplerConfig(),
    seed: int = 0,
    rel_change: float = 0.10,
    floor: float = 1e-3,
    slope_tol: float = 0.2,
) -> AcVerdict:
    """Heuristic verdict from the median of ``Im G^x`` along a decreasing eta ladder.

    ``"stable"``: relative change over the last two rungs below ``rel_change``
    and final median above ``floor``. ``"collapsing"``: the median scales like
    eta over the last two rungs (log-slope within ``slope_tol`` of 1).
    Otherwise ``"inconclusive"``. The thresholds are heuristics.
    """
    etas = tuple(float(x) for x in etas)
    if len(etas) < 2 or any(not x > 0 for x in etas) or any(a <= b for a, b in zip(etas, etas[1:])):
        raise ValueError("eta ladder must be strictly decreasing and positive")
    med = []
    for eta in etas:
        g = forward_samples(model, complex(energy, eta), config, seed, (0,))
        med.append(float(np.median(np.imag(g))))
    a, b = med[-2], med[-1]
    slope = math.log(a / b) / math.log(etas[-2] / etas[-1]) if a > 0 and b > 0 else math.nan
    if abs(b - a) < rel_change * abs(a) and b > floor:
        verdict = "stable"
    elif math.isfinite(slope) and abs(slope - 1.0) < slope_tol:
        verdict = "collapsing"
    else:
        verdict = "inconclusive"
    return AcVerdict(verdict, etas, tuple(med))
