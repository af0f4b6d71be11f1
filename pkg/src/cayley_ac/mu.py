"""Contraction ratios of the weight under the recursion, and their sampled bounds.

Every functional takes point arrays with the points on the last axis and
broadcasts over leading batch axes; ``lam`` may be a scalar or an array
matching the batch shape.

The certificates produced here are *sampled bounds*: maxima over a finite,
seeded sample of the region in question. They are evidence, not proofs.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .halfplane import as_complex, fixed_point, weight_at
from .rng import derive_rng, parallel_map

# configurations closer than this to (z_lam, ..., z_lam) are rejected
SINGULAR_TOL = 1e-13


def _prep(zs, lam, M):
    zs = np.asarray(as_complex(zs))
    lam = np.asarray(as_complex(lam))
    zl = np.asarray(fixed_point(M, lam))
    return zs, lam, zl


def _reject_singular(zs, zl):
    dev = np.max(np.abs(zs - zl[..., None]), axis=-1)
    if np.any(dev < SINGULAR_TOL):
        raise ValueError("all points coincide with the fixed point; the ratio is 0/0")


def _w(z, zl):
    return np.asarray(weight_at(z, zl))


def mu2(zs, q, lam):
    """``M w(phi(z_1..z_M, q, lam)) / sum_i w(z_i)``."""
    zs = np.asarray(as_complex(zs))
    M = zs.shape[-1]
    zs, lam, zl = _prep(zs, lam, M)
    _reject_singular(zs, zl)
    out = -1.0 / (zs.sum(axis=-1) + lam - np.asarray(q))
    return (M * _w(out, zl) / _w(zs, zl[..., None]).sum(axis=-1))[()]


def mu2_rational(zs, q, lam):
    """``mu2`` written as a rational function of ``chi(z_i) = 1/w(z_i)``.

    ``M prod chi |z_lam S + 1|^2 / ([sum_j prod_{i!=j} chi] [sum chi |z - z_lam|^2 + Im z_lam Im lam])``
    with ``S = sum z + lam - q``. Evaluated after multiplying through by
    ``prod |z_i - z_lam|^2`` so a single point at ``z_lam`` (``chi`` infinite)
    stays finite.
    """
    zs = np.asarray(as_complex(zs))
    M = zs.shape[-1]
    zs, lam, zl = _prep(zs, lam, M)
    _reject_singular(zs, zl)
    zl_ = zl[..., None]
    d2 = np.abs(zs - zl_) ** 2
    # chi_i = a_i / d2_i, and chi_i d2_i = a_i
    a = zs.imag * zl_.imag
    s = zs.sum(axis=-1) + lam - np.asarray(q)
    partial = np.zeros(a.shape[:-1])
    for j in range(M):
        partial = partial + d2[..., j] * np.prod(np.delete(a, j, axis=-1), axis=-1)
    num = M * np.prod(a, axis=-1) * np.abs(zl * s + 1.0) ** 2
    den = partial * (a.sum(axis=-1) + zl.imag * lam.imag)
    return (num / den)[()]


def mu2_star(zs, lam):
    """Upper bound ``M w(mean z) / sum w(z_i)`` for ``mu2`` at ``q = 0``."""
    zs = np.asarray(as_complex(zs))
    M = zs.shape[-1]
    zs, lam, zl = _prep(zs, lam, M)
    _reject_singular(zs, zl)
    return (M * _w(zs.mean(axis=-1), zl) / _w(zs, zl[..., None]).sum(axis=-1))[()]


def mu3p(zs, qs, lam, p: float = 0.5):
    """Two-level ratio summed over the ``2M - 1`` cyclic rotations of the points.

    For rotation ``r`` the first ``M`` rotated points feed the inner map
    (potential ``q_1``); its image joins the remaining ``M - 1`` points in
    the outer map (potential ``q_2``).
    """
    zs = np.asarray(as_complex(zs))
    n = zs.shape[-1]
    if n % 2 == 0 or n < 3:
        raise ValueError("mu3p needs 2M - 1 points")
    M = (n + 1) // 2
    zs, lam, zl = _prep(zs, lam, M)
    _reject_singular(zs, zl)
    qs = np.asarray(qs, dtype=float)
    q1, q2 = qs[..., 0], qs[..., 1]
    e = 1.0 + p
    num = 0.0
    for r in range(n):
        rot = np.roll(zs, -r, axis=-1)
        inner = -1.0 / (rot[..., :M].sum(axis=-1) + lam - q1)
        outer = -1.0 / (inner + rot[..., M:].sum(axis=-1) + lam - q2)
        num = num + _w(outer, zl) ** e
    den = (_w(zs, zl[..., None]) ** e).sum(axis=-1)
    return (num / den)[()]


def mu3p_prime(zs, q, lam, p: float = 0.5):
    """Root-level ratio ``w(-1/(sum_{M+1} z + lam - q))^{1+p} / sum w(z_i)^{1+p}``."""
    zs = np.asarray(as_complex(zs))
    M = zs.shape[-1] - 1
    zs, lam, zl = _prep(zs, lam, M)
    _reject_singular(zs, zl)
    e = 1.0 + p
    out = -1.0 / (zs.sum(axis=-1) + lam - np.asarray(q))
    return (_w(out, zl) ** e / (_w(zs, zl[..., None]) ** e).sum(axis=-1))[()]


def betas(zs, lam):
    """Blow-up diagnostics ``chi(z_i) / sqrt(sum chi^2)``."""
    zs = np.asarray(as_complex(zs))
    zs, lam, zl = _prep(zs, lam, zs.shape[-1])
    ch = 1.0 / _w(zs, zl[..., None])
    return ch / np.sqrt((ch * ch).sum(axis=-1, keepdims=True))


def simplex_ratio(nu, M: int, p: float = 0.5):
    """Convexity bound on the weight simplex.

    ``sum_sigma [(1/M^2) sum_{j<M} nu_sigma_j + (1/M) sum_{j>=M} nu_sigma_j]^{1+p} / sum nu^{1+p}``;
    at most 1, with equality exactly when all ``nu_i`` agree.
    """
    nu = np.asarray(nu, dtype=float)
    n = nu.shape[-1]
    if n != 2 * M - 1:
        raise ValueError("nu must have 2M - 1 entries")
    e = 1.0 + p
    num = 0.0
    for r in range(n):
        rot = np.roll(nu, -r, axis=-1)
        num = num + (rot[..., :M].sum(axis=-1) / M**2 + rot[..., M:].sum(axis=-1) / M) ** e
    return (num / (nu**e).sum(axis=-1))[()]


# ---------------------------------------------------------------- boundary probes


def real_boundary_probe(xs, lam, etas):
    """``mu2_star`` for real boundary points approached as ``x_i + i eta``."""
    xs = np.asarray(xs, dtype=float)
    etas = np.asarray(etas, dtype=float)
    zs = xs[None, :] + 1j * etas[:, None]
    return mu2_star(zs, lam)


def mixed_boundary_probe(M: int, a: int, xs, lam, etas):
    """``mu2_star`` with ``a`` points sent to ``i*infinity`` and ``M - a`` real points.

    The real points are ``x_j + i eta``. The far points sit on the imaginary
    axis at heights chosen so every point has the same weight, which keeps
    the blow-up coordinates equal along the family.
    """
    if not 1 <= a < M:
        raise ValueError("need 1 <= a < M")
    xs = np.asarray(xs, dtype=float)
    if xs.shape != (M - a,):
        raise ValueError("xs must hold the M - a real limits")
    lam = complex(as_complex(lam))
    zl = complex(fixed_point(M, lam))
    out = []
    for eta in np.asarray(etas, dtype=float):
        real_pts = xs + 1j * eta
        target = float(np.mean(_w(real_pts, zl)))
        # w(i t) = (zl.re^2 + (t - zl.im)^2) / (t zl.im) = target; larger root
        b = -(2 * zl.imag + target * zl.imag)
        c = abs(zl) ** 2
        t = (-b + math.sqrt(b * b - 4 * c)) / 2
        far = np.full(a, 1j * t)
        out.append(float(mu2_star(np.concatenate([far, real_pts]), lam)))
    return np.array(out)


# ---------------------------------------------------------------- certificates

CONTRACTION = "contraction"
GROWTH = "growth"

FAMILIES = ("generic", "real_axis", "infinity", "mixed", "equal_real", "equal_infinity", "one_far")
BOUNDARY_ETAS = tuple(10.0 ** -e for e in range(2, 10))


@dataclass
class MuReport:
    bound: str
    M: int
    p: float
    E: float
    rho: float
    eta1: float
    eps0: float
    samples: int
    max_value: float
    argmax_point: dict
    seed: int
    violations: int = 0
    certificate_epsilon: float | None = None
    fitted_C: float | None = None
    fitted_C_prime: float | None = None
    family_max: dict = field(default_factory=dict)
    label: str = "sampled bound"

    def to_json_dict(self) -> dict:
        d = asdict(self)
        if self.bound == CONTRACTION:
            d.pop("fitted_C")
            d.pop("fitted_C_prime")
        else:
            d.pop("certificate_epsilon")
        return d


@dataclass(frozen=True)
class SearchConfig:
    """Sampling plan for a certificate search.

    ``rho`` fixes the excluded compact set ``{sum_i w(z_i) <= rho}``;
    ``eta1`` bounds ``|q_i|`` for the contraction search and ``q_ladder``
    lists the magnitudes used when fitting growth constants; ``eps0`` caps ``Im lambda``.
    """

    samples: int = 1_000_000
    rho: float = 1e3
    eta1: float = 0.01
    eps0: float = 0.01
    q_ladder: tuple = (0.0, 1.0, 10.0, 100.0)
    block: int = 65_536
    seed: int = 0
    workers: int = 1
    min_lambda_eta: float = 1e-10


def _log_uniform(rng, lo, hi, size):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


def _cauchy_real(rng, size, scale=3.0):
    return scale * np.tan(np.pi * (rng.uniform(size=size) - 0.5))


def _boundary_eta(rng, size):
    return np.asarray(BOUNDARY_ETAS)[rng.integers(0, len(BOUNDARY_ETAS), size)] * rng.uniform(0.5, 1.5, size)


def sample_complement(rng, n_points: int, size: int, zl, families=FAMILIES):
    """Candidate point tuples biased toward the boundary at infinity.

    Returns ``(zs, family_index)``; ``zs`` has shape ``(size, n_points)``.
    Real-axis approaches use ``x + i eta``; the ``i*infinity`` chart uses
    ``exp(i theta) / eta``.
    """
    fam = rng.integers(0, len(families), size)
    shape = (size, n_points)
    zl = np.broadcast_to(np.asarray(zl), (size,))[:, None]

    generic = _cauchy_real(rng, shape) + 1j * _log_uniform(rng, 1e-9, 1e9, shape)
    real_axis = _cauchy_real(rng, shape) + 1j * _boundary_eta(rng, shape)
    theta = rng.uniform(0.0, np.pi, shape)
    theta = np.clip(theta, 1e-6, np.pi - 1e-6)
    infinity = np.exp(1j * theta) / _boundary_eta(rng, shape)
    interior = zl + 0.3 * (rng.normal(size=shape) + 1j * rng.normal(size=shape)) * zl.imag
    interior = interior.real + 1j * np.abs(interior.imag)
    choice = rng.integers(0, 3, shape)
    mixed = np.choose(choice, [real_axis, infinity, interior])
    jitter = 1.0 + 10.0 ** rng.uniform(-12, -1, shape) * rng.normal(size=shape)
    x0 = _cauchy_real(rng, (size, 1))
    eta0 = _boundary_eta(rng, (size, 1))
    equal_real = x0 * jitter + 1j * eta0 * np.abs(jitter)
    equal_inf = (1j / eta0) * jitter + _cauchy_real(rng, (size, 1), scale=1.0)
    one_far = interior.copy()
    col = rng.integers(0, n_points, size)
    pick_real = rng.uniform(size=size) < 0.5
    far_val = np.where(pick_real, real_axis[:, 0], infinity[:, 0])
    one_far[np.arange(size), col] = far_val

    table = {
        "generic": generic,
        "real_axis": real_axis,
        "infinity": infinity,
        "mixed": mixed,
        "equal_real": equal_real,
        "equal_infinity": equal_inf,
        "one_far": one_far,
    }
    stacked = np.stack([table[f] for f in families])
    zs = stacked[fam, np.arange(size)]
    zs = zs.real + 1j * np.maximum(zs.imag, 1e-300)
    return zs, fam


def _sample_lambda(rng, E, eps0, size, lo):
    return rng.uniform(-E, E, size) + 1j * _log_uniform(rng, lo, eps0, size)


def _search_block(task):
    kind, M, p, E, cfg, b = task
    rng = derive_rng(cfg.seed, 0 if kind == CONTRACTION else 1, b)
    n = cfg.block
    lam = _sample_lambda(rng, E, cfg.eps0, n, cfg.min_lambda_eta)
    zl = np.asarray(fixed_point(M, lam))
    zs, fam = sample_complement(rng, 2 * M - 1, n, zl)
    keep = _w(zs, zl[:, None]).sum(axis=-1) > cfg.rho
    if kind == CONTRACTION:
        qs = rng.uniform(-cfg.eta1, cfg.eta1, (n, 2))
    else:
        ladder = np.asarray(cfg.q_ladder, dtype=float)
        qs = ladder[rng.integers(0, ladder.size, (n, 2))] * rng.choice([-1.0, 1.0], (n, 2))
    zs, fam, lam, qs = zs[keep], fam[keep], lam[keep], qs[keep]
    vals = mu3p(zs, qs, lam, p)
    out = {"zs": zs, "fam": fam, "lam": lam, "qs": qs, "vals": vals}
    if kind == GROWTH:
        out["ratio"] = vals / (1.0 + (np.abs(qs) ** (2 * (1 + p))).sum(axis=-1))
        # root-level functional on M + 1 of the sampled points (cyclically chosen)
        zp = zs[:, : M + 1]
        keep_p = _w(zp, np.asarray(fixed_point(M, lam))[:, None]).sum(axis=-1) > cfg.rho
        vp = np.full(zs.shape[0], -np.inf)
        if np.any(keep_p):
            vp[keep_p] = mu3p_prime(zp[keep_p], qs[keep_p, 0], lam[keep_p], p)
        out["ratio_prime"] = vp / (1.0 + np.abs(qs[:, 0]) ** (2 * (1 + p)))
    return out


def _collect(kind, M, p, E, cfg: SearchConfig):
    """Run blocks in waves until ``cfg.samples`` accepted points; keep block order."""
    parts, have, b = [], 0, 0
    wave = max(1, cfg.workers) * 2
    while have < cfg.samples:
        tasks = [(kind, M, p, E, cfg, b + i) for i in range(wave)]
        for res in parallel_map(_search_block, tasks, cfg.workers):
            if have >= cfg.samples:
                break
            take = min(res["vals"].size, cfg.samples - have)
            parts.append({key: v[:take] for key, v in res.items()})
            have += take
        b += wave
        if b > 10_000 and have == 0:
            raise RuntimeError("sampler never reached the complement region")
    return {key: np.concatenate([pt[key] for pt in parts]) for key in parts[0]}


def _point(data, i, M) -> dict:
    zl = complex(fixed_point(M, data["lam"][i]))
    zs = data["zs"][i]
    return {
        "zs": [[float(z.real), float(z.imag)] for z in zs],
        "qs": [float(q) for q in data["qs"][i]],
        "lambda": [float(data["lam"][i].real), float(data["lam"][i].imag)],
        "weights": [float(w) for w in _w(zs, zl)],
        "betas": [float(b) for b in betas(zs, data["lam"][i])],
        "family": FAMILIES[int(data["fam"][i])],
    }


def _family_max(values, fam):
    out = {}
    for i, name in enumerate(FAMILIES):
        sel = values[fam == i]
        if sel.size:
            out[name] = float(np.max(sel))
    return out


def certify_contraction(M: int, p: float, E: float, config: SearchConfig = SearchConfig()) -> MuReport:
    """Sampled bound ``max mu3p <= 1 - eps`` off the set ``{sum w <= rho}``.

    Samples points from boundary-approaching families and generic draws,
    ``|q_i| <= eta1`` and ``lambda`` in the strip ``|Re| <= E``,
    ``0 < Im <= eps0``. ``certificate_epsilon = 1 - max`` when the sampled
    maximum is below 1, else ``None`` and the offending point is reported.
    """
    if not 0.0 < E < 2.0 * math.sqrt(M):
        raise ValueError("E must lie in (0, 2 sqrt(M))")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    data = _collect(CONTRACTION, M, p, E, config)
    vals = data["vals"]
    i = int(np.argmax(vals))
    top = float(vals[i])
    return MuReport(
        bound=CONTRACTION,
        M=M,
        p=p,
        E=E,
        rho=config.rho,
        eta1=config.eta1,
        eps0=config.eps0,
        samples=int(vals.size),
        max_value=top,
        argmax_point=_point(data, i, M),
        seed=config.seed,
        violations=int(np.sum(vals >= 1.0)),
        certificate_epsilon=(1.0 - top) if top < 1.0 else None,
        family_max=_family_max(vals, data["fam"]),
    )


def fit_growth_constants(M: int, p: float, E: float, config: SearchConfig = SearchConfig()) -> MuReport:
    """Fitted constants ``C = max mu3p / (1 + sum |q_i|^{2(1+p)})`` and the root analogue.

    ``q`` magnitudes come from ``config.q_ladder`` with random signs.
    """
    if not 0.0 < E < 2.0 * math.sqrt(M):
        raise ValueError("E must lie in (0, 2 sqrt(M))")
    data = _collect(GROWTH, M, p, E, config)
    ratio = data["ratio"]
    i = int(np.argmax(ratio))
    finite = np.isfinite(ratio)
    return MuReport(
        bound=GROWTH,
        M=M,
        p=p,
        E=E,
        rho=config.rho,
        eta1=float(max(config.q_ladder)),
        eps0=config.eps0,
        samples=int(ratio.size),
        max_value=float(np.max(data["vals"])),
        argmax_point=_point(data, i, M),
        seed=config.seed,
        violations=int(np.sum(~finite)),
        fitted_C=float(ratio[i]),
        fitted_C_prime=float(np.max(data["ratio_prime"])),
        family_max=_family_max(ratio, data["fam"]),
    )


def sample_points(rng, size, M, spread=3.0):
    """Generic points of the half-plane: Cauchy real parts, log-uniform heights."""
    return _cauchy_real(rng, (size, M), scale=spread) + 1j * _log_uniform(rng, 1e-3, 1e3, (size, M))


def mu_scan(M: int, E: float, eps0: float, samples: int, seed: int = 0, p: float = 0.5) -> dict:
    """Sampled extrema of ``mu2``, ``mu2_star`` and ``mu3p`` over the strip.

    Half of the ``lambda`` draws lie in ``(0, eps0]`` above the axis, the
    other half exactly on it.
    """
    rng = derive_rng(seed, 2)
    zs = sample_points(rng, samples, M)
    eta = _log_uniform(rng, 1e-6, eps0, samples)
    real = np.arange(samples) % 2 == 1
    eta[real] = 0.0
    lam = rng.uniform(-E, E, samples) + 1j * eta
    q = np.zeros(samples)
    m2 = mu2(zs, q, lam)
    rat = mu2_rational(zs, q, lam)
    star = mu2_star(zs, lam)
    rel = np.abs(m2 - rat) / np.abs(m2)
    z3 = sample_points(rng, samples, 2 * M - 1)
    m3 = mu3p(z3, np.zeros((samples, 2)), lam, p)
    return {
        "M": M,
        "E": E,
        "eps0": eps0,
        "samples": samples,
        "seed": seed,
        "p": p,
        "mu2_max_complex_lambda": float(np.max(m2[~real])),
        "mu2_contraction_violations": int(np.sum(m2[~real] >= 1.0)),
        "mu2_rational_max_rel_error": float(np.max(rel)),
        "mu2_star_domination_violations": int(np.sum(m2 > star + 1e-12)),
        "mu2_star_real_lambda_max_gap": float(np.max(np.abs(m2[real] - star[real]))) if np.any(real) else 0.0,
        "mu3p_max": float(np.max(m3)),
        "label": "sampled bound",
    }
