"""Free density of states next to Monte-Carlo curves for weak disorder.

    python3 scripts/dos_curves.py --couplings 0.1 0.5 --out results/dos
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from cayley_ac.model import TreeModel
from cayley_ac.moments import SamplerConfig, write_csv
from cayley_ac.plotting import write_svg
from cayley_ac.spectra import band_edges, dos_disordered, dos_free, kesten_mckay


@dataclass
class DosConfig:
    M: int = 2
    couplings: tuple = (0.1, 0.5)
    eta: float = 1e-3
    n_energies: int = 41
    sampler: SamplerConfig = field(default_factory=lambda: SamplerConfig(pool_size=5000, iterations=300, samples=5000, replicas=8))
    seed: int = 0
    workers: int = 1


def run(cfg: DosConfig, out: Path):
    lo, hi = band_edges(cfg.M)
    e = np.linspace(1.1 * lo, 1.1 * hi, cfg.n_energies)
    free = dos_free(cfg.M, e)
    gap = np.max(np.abs(free.density - kesten_mckay(cfg.M + 1, e)))
    print(f"free curve vs Kesten-McKay: max gap {gap:.2e}")
    fine = np.linspace(lo, hi, 20001)
    print(f"free curve integral on a 20001-point grid: {dos_free(cfg.M, fine).integral():.6f}")
    series = {"free": (list(e), list(free.density))}
    rows = [{"k": 0.0, **r} for r in free.rows()]
    for k in cfg.couplings:
        curve = dos_disordered(TreeModel(cfg.M, k), e, cfg.eta, cfg.sampler, cfg.seed, cfg.workers)
        series[f"k={k:g}"] = (list(e), list(curve.density))
        rows += [{"k": k, **r} for r in curve.rows()]
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(out.with_suffix(".csv"), rows, ("k", "energy", "density", "std_error"), {"seed": cfg.seed, "eta": cfg.eta})
    write_svg(out.with_suffix(".svg"), series, xlabel="E", ylabel="density", title=f"M={cfg.M}, eta={cfg.eta:g}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--M", type=int, default=2)
    ap.add_argument("--couplings", type=float, nargs="+", default=[0.1, 0.5])
    ap.add_argument("--eta", type=float, default=1e-3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/dos"))
    a = ap.parse_args()
    run(DosConfig(M=a.M, couplings=tuple(a.couplings), eta=a.eta, seed=a.seed, workers=a.workers), a.out)


if __name__ == "__main__":
    main()
