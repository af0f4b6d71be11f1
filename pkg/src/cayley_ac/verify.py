"""Quick randomized invariant checks for the half-plane maps and the recursion."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import halfplane as hp
from .model import PotentialDistribution, TreeModel
from .recursion import FULL, TruncatedTree, forward_green, resolvent_oracle, root_green
from .rng import derive_rng


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


def _random_upper(rng, n):
    return rng.normal(0, 2, n) + 1j * np.exp(rng.uniform(-5, 3, n))


def _random_lambda(rng, M, n):
    b = 2 * math.sqrt(M)
    return rng.uniform(-1.2 * b, 1.2 * b, n) + 1j * np.exp(rng.uniform(-8, 0, n))


def relative_error(a, b) -> float:
    return abs(a - b) / abs(b)


def run_checks(seed: int = 0, trials: int = 200) -> list[Check]:
    rng = derive_rng(seed, 0)
    out = []

    worst = 0.0
    for M in range(2, 7):
        lam = _random_lambda(rng, M, trials)
        zl = hp.fixed_point(M, lam)
        worst = max(worst, float(np.max(np.abs(hp.mobius_phi(np.repeat(zl[:, None], M, 1), 0.0, lam) - zl))))
    out.append(Check("fixed point identity", worst <= 1e-12, f"max |phi(z_lam) - z_lam| = {worst:.2e}"))

    worst = 0.0
    for M in range(2, 7):
        e = np.linspace(-2 * math.sqrt(M) + 0.01, 2 * math.sqrt(M) - 0.01, trials)
        worst = max(worst, float(np.max(np.abs(np.abs(hp.fixed_point(M, e + 0j)) - 1 / math.sqrt(M)))))
    out.append(Check("circle law", worst <= 1e-12, f"max deviation {worst:.2e}"))

    zs = _random_upper(rng, 3 * trials).reshape(trials, 3)
    lam = _random_lambda(rng, 3, trials)
    img = hp.mobius_phi(zs, rng.normal(size=trials), lam)
    out.append(Check("half-plane preservation", bool(np.all(img.imag > 0)), f"min Im = {img.imag.min():.2e}"))

    z = _random_upper(rng, trials)
    lam = _random_lambda(rng, 2, trials)
    prod = np.asarray(hp.weight(z, 2, lam)) * np.asarray(hp.chi(z, 2, lam))
    err = float(np.max(np.abs(prod - 1)))
    out.append(Check("weight/chi reciprocity", err <= 1e-14, f"max |w chi - 1| = {err:.2e}"))

    s = _random_upper(rng, trials)
    lhs, rhs = hp.abs_from_weight_bound(z, s)
    bad = int(np.sum(lhs > rhs))
    out.append(Check("absolute value bound", bad == 0, f"{bad} violations"))

    worst = 0.0
    for M in (2, 3):
        model = TreeModel(M, 0.3, PotentialDistribution("uniform_symmetric", 1.0))
        for t in range(5):
            trng = derive_rng(seed, 1, M, t)
            tree = TruncatedTree.random(model, 4, trng)
            worst = max(worst, relative_error(forward_green(tree, 0.5 + 0.01j), resolvent_oracle(tree, 0.5 + 0.01j)))
            tree = TruncatedTree.random(model, 3, trng, rooted=FULL)
            worst = max(worst, relative_error(root_green(tree, 0.5 + 0.01j), resolvent_oracle(tree, 0.5 + 0.01j)))
    out.append(Check("recursion vs sparse solve", worst <= 1e-10, f"max relative error {worst:.2e}"))
    return out
