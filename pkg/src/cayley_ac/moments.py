"""Monte-Carlo estimates of weight and absolute moments of the Green function."""
from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .halfplane import SpectralParameter, abs_from_weight_bound, fixed_point, weight_at
from .model import PotentialDistribution, TreeModel
from .recursion import (
    FORWARD,
    FULL,
    draw_from_pool,
    full_tree_samples,
    population_dynamics,
)
from .rng import derive_rng, parallel_map

# Im G below this is treated as numerical collapse onto the real axis
COLLAPSE_IM = 1e-300
MAX_FLAGGED_FRACTION = 1e-6

CSV_COLUMNS = ("M", "k", "p", "energy", "eta", "samples", "mean", "std_error", "max_observed", "flagged")


class MomentEstimationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SamplerConfig:
    """How realizations of ``G^x`` are produced.

    ``method="population"`` equilibrates a pool of ``pool_size`` values for
    ``iterations`` generations; ``method="full_tree"`` draws ``samples``
    independent trees of depth ``depth``.

    One pool is a single correlated draw of the empirical law, so the
    per-sample standard error understates its noise. With ``replicas >= 2``
    the population method runs that many independent pools and the standard
    error comes from the spread of their means instead.
    """

    method: str = "population"
    pool_size: int = 10_000
    iterations: int = 500
    samples: int = 10_000
    depth: int = 10
    leaf_policy: str = "fixed_point"
    block: int = 64
    replicas: int = 1

    def __post_init__(self):
        if self.method not in ("population", "full_tree"):
            raise ValueError(f"unknown sampler method {self.method!r}")
        if self.pool_size < 1 or self.iterations < 0 or self.samples < 2 or self.depth < 0 or self.block < 1:
            raise ValueError("sampler sizes out of range")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")


@dataclass
class MomentEstimate:
    mean: float
    std_error: float
    max_observed: float
    samples: int
    p: float
    lam: SpectralParameter
    k: float
    flagged: int = 0
    bound_violations: int = 0


def _as_param(lam) -> SpectralParameter:
    return lam if isinstance(lam, SpectralParameter) else SpectralParameter.from_complex(lam)


def _check(lam: SpectralParameter, p: float):
    if not lam.eta > 0:
        raise ValueError("moment estimation needs eta > 0")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")


def _replica_keys(cfg: SamplerConfig, key):
    # replica 0 keeps the plain key so a single pool reproduces earlier streams
    n = cfg.replicas if cfg.method == "population" else 1
    return [tuple(key)] + [(*key, 2, r) for r in range(1, n)]


def forward_groups(model, lam, cfg: SamplerConfig, seed, key) -> list:
    """Forward values grouped by independent replica (one group unless ``replicas > 1``)."""
    if cfg.method == "full_tree":
        return [
            full_tree_samples(
                model, lam, cfg.depth, cfg.samples, seed, key, policy=cfg.leaf_policy, rooted=FORWARD, block=cfg.block
            )
        ]
    return [
        population_dynamics(model, lam, cfg.pool_size, cfg.iterations, derive_rng(seed, *k), init=cfg.leaf_policy)
        for k in _replica_keys(cfg, key)
    ]


def root_groups(model, lam, cfg: SamplerConfig, seed, key) -> list:
    """Full-lattice root values grouped by replica; ``samples`` draws per replica."""
    if cfg.method == "full_tree":
        return [
            full_tree_samples(
                model, lam, cfg.depth, cfg.samples, seed, key, policy=cfg.leaf_policy, rooted=FULL, block=cfg.block
            )
        ]
    out = []
    for k in _replica_keys(cfg, key):
        pool = population_dynamics(model, lam, cfg.pool_size, cfg.iterations, derive_rng(seed, *k), init=cfg.leaf_policy)
        out.append(draw_from_pool(pool, model, lam, cfg.samples, derive_rng(seed, *k, 1), root=True))
    return out


def forward_samples(model, lam, cfg: SamplerConfig, seed, key):
    return np.concatenate(forward_groups(model, lam, cfg, seed, key))


def root_samples(model, lam, cfg: SamplerConfig, seed, key):
    return np.concatenate(root_groups(model, lam, cfg, seed, key))


def mean_and_error(groups) -> tuple[float, float]:
    """Mean over all values; standard error from replica means when there are several."""
    x = np.concatenate(groups)
    mean = float(np.mean(x))
    if len(groups) >= 2:
        means = np.array([np.mean(g) for g in groups])
        se = 0.0 if np.ptp(means) == 0 else float(np.std(means, ddof=1) / math.sqrt(means.size))
    else:
        se = 0.0 if np.ptp(x) == 0 else float(np.std(x, ddof=1) / math.sqrt(x.size))
    return mean, se


def collapsed(values) -> np.ndarray:
    return ~np.isfinite(values) | (np.imag(values) < COLLAPSE_IM)


def _summarize(groups, flagged, p, lam, k, violations=0) -> MomentEstimate:
    groups = [g for g in groups if g.size]
    n = sum(g.size for g in groups)
    if n < 2:
        raise MomentEstimationError("fewer than two usable samples")
    if flagged / (n + flagged) > MAX_FLAGGED_FRACTION:
        raise MomentEstimationError(f"{flagged} of {n + flagged} samples collapsed to the boundary")
    mean, se = mean_and_error(groups)
    top = max(float(np.max(g)) for g in groups)
    return MomentEstimate(mean, se, top, n, p, lam, k, int(flagged), int(violations))


def estimate_weight_moment(model: TreeModel, lam, p: float = 0.5, config=SamplerConfig(), seed: int = 0, key=()):
    """Sample mean of ``w(G^x)^{1+p}`` with its standard error.

    Raises :class:`MomentEstimationError` if more than a ``1e-6`` fraction
    of the realizations leave the half-plane numerically.
    """
    lam = _as_param(lam)
    _check(lam, p)
    zl = fixed_point(model.branching, lam.value)
    xs, flagged = [], 0
    for g in forward_groups(model, lam.value, config, seed, key):
        bad = collapsed(g)
        flagged += int(bad.sum())
        xs.append(np.asarray(weight_at(g[~bad], zl)) ** (1.0 + p))
    return _summarize(xs, flagged, p, lam, model.coupling)


def estimate_abs_moment(model: TreeModel, lam, p: float = 0.5, config=SamplerConfig(), seed: int = 0, key=()):
    """Sample mean of ``|G|^{1+p}`` for the full-lattice root Green function.

    Every sample is also checked against ``|G| <= 4 Im(z_lam) c(z_lam, G) + 2|z_lam|``;
    failures are counted in ``bound_violations``.
    """
    lam = _as_param(lam)
    _check(lam, p)
    zl = fixed_point(model.branching, lam.value)
    xs, flagged, violations = [], 0, 0
    for g in root_groups(model, lam.value, config, seed, key):
        bad = collapsed(g)
        flagged += int(bad.sum())
        g = g[~bad]
        lhs, rhs = abs_from_weight_bound(g, zl)
        violations += int(np.sum(np.asarray(lhs) > np.asarray(rhs)))
        xs.append(np.abs(g) ** (1.0 + p))
    return _summarize(xs, flagged, p, lam, model.coupling, violations)


@dataclass(frozen=True)
class SweepGrid:
    energies: tuple = ()
    etas: tuple = ()
    couplings: tuple = ()
    p: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "energies", tuple(float(e) for e in self.energies))
        object.__setattr__(self, "etas", tuple(float(e) for e in self.etas))
        object.__setattr__(self, "couplings", tuple(float(k) for k in self.couplings))
        if any(not e > 0 for e in self.etas):
            raise ValueError("all etas must be > 0")
        if not 0.0 < self.p < 1.0:
            raise ValueError("p must lie in (0, 1)")

    @property
    def n_cells(self) -> int:
        return len(self.energies) * len(self.etas) * len(self.couplings)

    @staticmethod
    def eta_ladder(top: float, bottom: float, ratio: float = 10.0) -> tuple:
        """Geometric ladder ``top, top/ratio, ...`` down to ``bottom``."""
        n = int(round(math.log(top / bottom) / math.log(ratio))) + 1
        return tuple(top / ratio**i for i in range(n))


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)
    sup: dict = field(default_factory=dict)

    def cells(self, k=None, energy=None):
        return [r for r in self.rows if (k is None or r["k"] == k) and (energy is None or r["energy"] == energy)]


def _sweep_cell(task):
    branching, potential, k, energy, eta, p, cfg, seed, key = task
    model = TreeModel(branching, k, potential)
    row = {"M": branching, "k": k, "p": p, "energy": energy, "eta": eta}
    try:
        est = estimate_weight_moment(model, SpectralParameter(energy, eta), p, cfg, seed, key)
    except (MomentEstimationError, ValueError, FloatingPointError) as exc:
        row.update(samples=0, mean=math.nan, std_error=math.nan, max_observed=math.nan, flagged=-1, error=str(exc))
        return row
    row.update(
        samples=est.samples, mean=est.mean, std_error=est.std_error, max_observed=est.max_observed, flagged=est.flagged
    )
    return row


def sweep(
    branching: int,
    potential: PotentialDistribution,
    grid: SweepGrid,
    config: SamplerConfig = SamplerConfig(),
    seed: int = 0,
    workers: int = 1,
):
    """One weight-moment estimate per ``(k, E, eta)`` cell.

    Cells along one eta ladder share the random stream keyed by the
    ``(k, E)`` indices, so differences across eta are not masked by
    independent noise. A failing cell is recorded with ``flagged = -1`` and
    the sweep continues.
    """
    tasks = []
    for ki, k in enumerate(grid.couplings):
        for ei, e in enumerate(grid.energies):
            for eta in grid.etas:
                tasks.append((branching, potential, k, e, eta, grid.p, config, seed, (ki, ei)))
    rows = parallel_map(_sweep_cell, tasks, workers)
    result = SweepResult(rows=rows)
    for k in grid.couplings:
        good = [r for r in rows if r["k"] == k and r["flagged"] >= 0]
        if good:
            best = max(good, key=lambda r: r["mean"])
            result.sup[k] = {"max_mean": best["mean"], "std_error": best["std_error"], "energy": best["energy"], "eta": best["eta"]}
    return result


def fmt(v) -> str:
    """Shortest round-trip decimal for floats."""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, rows, columns=CSV_COLUMNS, metadata=None):
    """CSV with ``# key: value`` metadata lines above a single header row."""
    with open(path, "w", newline="") as fh:
        for key, value in (metadata or {}).items():
            fh.write(f"# {key}: {value}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([fmt(r[c]) for c in columns])


def estimate_to_dict(est: MomentEstimate) -> dict:
    d = asdict(est)
    d["lam"] = {"energy": est.lam.energy, "eta": est.lam.eta}
    return d
