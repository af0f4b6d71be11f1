"""Weight moment E w(G^x)^(1+p) along an eta ladder, for several couplings.

Writes a CSV with one row per (k, E, eta) cell and an SVG of the moment
against log10(eta) at each energy.

    python3 scripts/moment_trend.py --couplings 0.1 1 3 --out results/trend
"""
from __future__ import annotations

import argparse
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from cayley_ac.model import PotentialDistribution
from cayley_ac.moments import CSV_COLUMNS, SamplerConfig, SweepGrid, sweep, write_csv
from cayley_ac.plotting import write_svg


@dataclass
class TrendConfig:
    M: int = 2
    couplings: tuple = (0.1,)
    energies: tuple = tuple(np.linspace(-2.0, 2.0, 9))
    eta_top: float = 1e-1
    eta_bottom: float = 1e-4
    p: float = 0.5
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    seed: int = 0
    workers: int = 1


def run(cfg: TrendConfig, out: Path):
    grid = SweepGrid(cfg.energies, SweepGrid.eta_ladder(cfg.eta_top, cfg.eta_bottom), cfg.couplings, cfg.p)
    res = sweep(cfg.M, PotentialDistribution(), grid, cfg.sampler, cfg.seed, cfg.workers)
    out.parent.mkdir(parents=True, exist_ok=True)
    meta = {k: v for k, v in asdict(cfg).items() if k != "workers"}
    write_csv(out.with_suffix(".csv"), res.rows, CSV_COLUMNS, {"config": meta})
    series = {}
    for k in grid.couplings:
        for e in grid.energies:
            cells = res.cells(k, e)
            series[f"k={k:g} E={e:+.1f}"] = ([math.log10(r["eta"]) for r in cells], [r["mean"] for r in cells])
    write_svg(out.with_suffix(".svg"), series, xlabel="log10 eta", ylabel=f"E w^{1 + cfg.p:g}", title="weight moment vs eta")
    for k, s in res.sup.items():
        print(f"k={k:g}: largest cell mean {s['max_mean']:.4g} +- {s['std_error']:.2g} at E={s['energy']:g}, eta={s['eta']:g}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--M", type=int, default=2)
    ap.add_argument("--couplings", type=float, nargs="+", default=[0.1])
    ap.add_argument("--pool-size", type=int, default=10_000)
    ap.add_argument("--iterations", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/moment_trend"))
    a = ap.parse_args()
    sampler = SamplerConfig(pool_size=a.pool_size, iterations=a.iterations, samples=a.pool_size)
    run(TrendConfig(M=a.M, couplings=tuple(a.couplings), sampler=sampler, seed=a.seed, workers=a.workers), a.out)


if __name__ == "__main__":
    main()
