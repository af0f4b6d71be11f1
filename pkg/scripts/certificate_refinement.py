"""Sampled mu3p certificate and fitted constants under repeated 4x refinement.

    python3 scripts/certificate_refinement.py --start 250000 --steps 3
"""
from __future__ import annotations

import argparse
import json
from dataclasses import replace

from cayley_ac.mu import SearchConfig, certify_contraction, fit_growth_constants


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--M", type=int, default=2)
    ap.add_argument("--E", type=float, default=2.0)
    ap.add_argument("--p", type=float, default=0.5)
    ap.add_argument("--start", type=int, default=250_000)
    ap.add_argument("--steps", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    a = ap.parse_args()
    base = SearchConfig(seed=a.seed, workers=a.workers)
    n = a.start
    for _ in range(a.steps):
        cfg = replace(base, samples=n)
        r1 = certify_contraction(a.M, a.p, a.E, cfg)
        r2 = fit_growth_constants(a.M, a.p, a.E, cfg)
        print(json.dumps({
            "samples": n,
            "max_mu3p": r1.max_value,
            "epsilon": r1.certificate_epsilon,
            "worst_family": max(r1.family_max, key=r1.family_max.get),
            "C": r2.fitted_C,
            "C_prime": r2.fitted_C_prime,
        }))
        n *= 4


if __name__ == "__main__":
    main()
