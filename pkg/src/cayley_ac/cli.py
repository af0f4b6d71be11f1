"""Batch front-end: ``cayley-ac {verify,oracle,sweep,mu-scan,dos,certify}``.

Parameters come from built-in defaults, then an optional flat ``key = value``
config file (``--config``), then command-line flags; later sources win.
Artifacts go to ``--output``, else to ``$CAYLEY_AC_OUTPUT_DIR/<command>.<ext>``,
else to the working directory. Exit status: 0 success, 1 invalid
configuration or I/O failure, 2 a gated check failed.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import mu as mu_mod
from .model import KINDS, PotentialDistribution, TreeModel
from .moments import SamplerConfig, SweepGrid, fmt, sweep, write_csv
from .plotting import write_svg
from .recursion import ResourceBudgetError, SolverBreakdown, TruncatedTree, forward_green, resolvent_oracle
from .rng import derive_rng
from .spectra import band_edges, dos_disordered, dos_free
from .verify import relative_error, run_checks

COMMANDS = ("verify", "oracle", "sweep", "mu-scan", "dos", "certify")
OUTPUT_ENV = "CAYLEY_AC_OUTPUT_DIR"
ORACLE_TOL = 1e-10


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = "verify"
    M: int = 2
    k: float = 0.1
    potential: str = "uniform_symmetric"
    width: float = 1.0
    sigma: float = 1.0
    p: float = 0.5
    seed: int = 0
    workers: int = 1
    output: str = ""
    format: str = ""
    svg: str = ""
    # sampler
    method: str = "population"
    pool_size: int = 10_000
    iterations: int = 500
    samples: int = 0
    depth: int = 6
    leaf_policy: str = "fixed_point"
    replicas: int = 1
    # grids
    energies: str = ""
    etas: str = ""
    couplings: str = ""
    n_energies: int = 2001
    # oracle
    trials: int = 100
    energy: float = 0.5
    eta: float = 0.01
    # certificates and scans
    bound: str = "contraction"
    E: float = 2.0
    rho: float = 1e3
    eta1: float = 0.01
    eps0: float = 0.01
    q_ladder: str = "0,1,10,100"


FIELD_TYPES = {f.name: type(f.default) for f in fields(RunConfig)}
DEFAULT_SAMPLES = {"verify": 200, "oracle": 0, "sweep": 10_000, "mu-scan": 100_000, "dos": 10_000, "certify": 1_000_000}
DEFAULT_FORMAT = {"verify": "json", "oracle": "csv", "sweep": "csv", "mu-scan": "json", "dos": "csv", "certify": "json"}


def _floats(text: str, name: str) -> list[float]:
    if not text.strip():
        return []
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{name}: expected a comma-separated list of numbers, got {text!r}") from None


def _coerce(name: str, value, where: str = ""):
    typ = FIELD_TYPES[name]
    try:
        if typ is int:
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        return typ(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}{name}: cannot parse {value!r} as {typ.__name__}") from None


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"config file {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in FIELD_TYPES or key == "command":
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value, f"{path}:{lineno}: ")
    return out


def validate(cfg: RunConfig) -> RunConfig:
    """Check every parameter the chosen command will use; fill command defaults."""
    if cfg.command not in COMMANDS:
        raise ConfigError(f"command: unknown {cfg.command!r}")
    if cfg.M < 2:
        raise ConfigError("M: branching must be >= 2")
    if not math.isfinite(cfg.k):
        raise ConfigError("k: must be finite")
    if cfg.potential not in KINDS:
        raise ConfigError(f"potential: expected one of {KINDS}")
    if cfg.width <= 0 or cfg.sigma <= 0:
        raise ConfigError("width/sigma: must be > 0")
    if not 0 < cfg.p < 1:
        raise ConfigError("p: must lie in (0, 1)")
    if cfg.workers < 1:
        raise ConfigError("workers: must be >= 1")
    if cfg.samples == 0:
        cfg.samples = DEFAULT_SAMPLES[cfg.command]
    if cfg.samples < 0:
        raise ConfigError("samples: must be > 0")
    if not cfg.format:
        cfg.format = DEFAULT_FORMAT[cfg.command]
    if cfg.format not in ("csv", "json"):
        raise ConfigError("format: expected csv or json")
    if cfg.method not in ("population", "full_tree"):
        raise ConfigError("method: expected population or full_tree")
    if cfg.leaf_policy not in ("fixed_point", "truncate"):
        raise ConfigError("leaf_policy: expected fixed_point or truncate")
    if cfg.replicas < 1:
        raise ConfigError("replicas: must be >= 1")
    if cfg.pool_size < 1 or cfg.iterations < 0 or cfg.depth < 0 or cfg.trials < 0:
        raise ConfigError("pool_size/iterations/depth/trials: out of range")
    for name in ("energies", "etas", "couplings", "q_ladder"):
        _floats(getattr(cfg, name), name)
    if any(e <= 0 for e in _floats(cfg.etas, "etas")):
        raise ConfigError("etas: all values must be > 0")
    edge = 2 * math.sqrt(cfg.M)
    if cfg.command == "oracle" and cfg.eta <= 0:
        raise ConfigError("eta: must be > 0")
    if cfg.command == "dos" and cfg.k != 0 and cfg.eta <= 0:
        raise ConfigError("eta: must be > 0 for disordered DOS")
    if cfg.command in ("certify", "mu-scan"):
        if not 0 < cfg.E < edge:
            raise ConfigError(f"E: must lie in (0, {edge:.6g})")
        if cfg.eps0 <= 0 or cfg.rho <= 0 or cfg.eta1 < 0:
            raise ConfigError("eps0/rho/eta1: out of range")
        if cfg.bound not in (mu_mod.CONTRACTION, mu_mod.GROWTH):
            raise ConfigError(f"bound: expected {mu_mod.CONTRACTION} or {mu_mod.GROWTH}")
    if cfg.command == "sweep" and cfg.method == "population" and cfg.samples < 2:
        raise ConfigError("samples: need at least 2")
    return cfg


def _model(cfg: RunConfig, k=None) -> TreeModel:
    pot = PotentialDistribution(cfg.potential, cfg.width, cfg.sigma)
    return TreeModel(cfg.M, cfg.k if k is None else k, pot)


def _sampler(cfg: RunConfig) -> SamplerConfig:
    return SamplerConfig(
        method=cfg.method,
        pool_size=cfg.pool_size,
        iterations=cfg.iterations,
        samples=max(cfg.samples, 2),
        depth=cfg.depth,
        leaf_policy=cfg.leaf_policy,
        replicas=cfg.replicas,
    )


def _out_path(cfg: RunConfig) -> Path:
    if cfg.output:
        return Path(cfg.output)
    base = Path(os.environ.get(OUTPUT_ENV, "."))
    return base / f"{cfg.command}.{cfg.format}"


# Run-placement settings that cannot change any number in the artifact.
NOT_EMBEDDED = ("workers", "output")


def embedded_config(cfg: RunConfig) -> dict:
    return {k: v for k, v in asdict(cfg).items() if k not in NOT_EMBEDDED}


def _metadata(cfg: RunConfig) -> dict:
    return {"config": json.dumps(embedded_config(cfg), sort_keys=True), "seed": cfg.seed}


def _write(cfg: RunConfig, rows, columns, extra=None):
    path = _out_path(cfg)
    path.parent.mkdir(parents=True, exist_ok=True)
    if cfg.format == "csv":
        write_csv(path, rows, columns, _metadata(cfg))
    else:
        doc = {"config": embedded_config(cfg), "seed": cfg.seed, "rows": [{c: r[c] for c in columns} for r in rows]}
        doc.update(extra or {})
        _dump_json(path, doc)
    return path


def _json_scalar(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _dump_json(path, doc):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_json_scalar)
        fh.write("\n")


# ---------------------------------------------------------------- commands


def cmd_verify(cfg):
    checks = run_checks(cfg.seed, cfg.samples)
    rows = [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]
    _write(cfg, rows, ("name", "passed", "detail"))
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}")
    return 0 if all(c.passed for c in checks) else 2


def cmd_oracle(cfg):
    model = _model(cfg)
    lam = complex(cfg.energy, cfg.eta)
    rows, status = [], 0
    for t in range(cfg.trials):
        tree = TruncatedTree.random(model, cfg.depth, derive_rng(cfg.seed, t))
        g = complex(forward_green(tree, lam, "truncate"))
        try:
            o = resolvent_oracle(tree, lam)
        except SolverBreakdown as exc:
            print(f"trial {t}: {exc}", file=sys.stderr)
            o, status = complex(math.nan, math.nan), 2
        err = relative_error(g, o)
        if not err <= ORACLE_TOL:
            status = 2
        rows.append({"trial": t, "recursion_re": g.real, "recursion_im": g.imag, "oracle_re": o.real, "oracle_im": o.imag, "rel_error": err})
    _write(cfg, rows, ("trial", "recursion_re", "recursion_im", "oracle_re", "oracle_im", "rel_error"))
    worst = max((r["rel_error"] for r in rows), default=0.0)
    print(f"{cfg.trials} trials, max relative error {worst:.3e} (tolerance {ORACLE_TOL:g})")
    return status


def cmd_sweep(cfg):
    grid = SweepGrid(_floats(cfg.energies, "energies"), _floats(cfg.etas, "etas"), _floats(cfg.couplings, "couplings"), cfg.p)
    pot = PotentialDistribution(cfg.potential, cfg.width, cfg.sigma)
    res = sweep(cfg.M, pot, grid, _sampler(cfg), cfg.seed, cfg.workers)
    from .moments import CSV_COLUMNS

    sup = {fmt(k): v for k, v in res.sup.items()}
    _write(cfg, res.rows, CSV_COLUMNS, {"sup_over_strip": sup})
    if cfg.svg:
        series = {}
        for k in grid.couplings:
            for e in grid.energies:
                cells = res.cells(k, e)
                series[f"k={k:g} E={e:g}"] = ([math.log10(r["eta"]) for r in cells], [r["mean"] for r in cells])
        write_svg(cfg.svg, series, xlabel="log10 eta", ylabel="E w^(1+p)", title="weight moment")
    failed = sum(r["flagged"] < 0 for r in res.rows)
    print(f"{len(res.rows)} cells, {failed} failed")
    return 0


def cmd_mu_scan(cfg):
    report = mu_mod.mu_scan(cfg.M, cfg.E, cfg.eps0, cfg.samples, cfg.seed, cfg.p)
    report["config"] = embedded_config(cfg)
    _dump_json(_out_path(cfg), report)
    ok = (
        report["mu2_contraction_violations"] == 0
        and report["mu2_star_domination_violations"] == 0
        and report["mu2_rational_max_rel_error"] <= 1e-11
        and report["mu2_star_real_lambda_max_gap"] <= 1e-12
    )
    print(json.dumps({k: v for k, v in report.items() if k != "config"}, indent=2))
    return 0 if ok else 2


def _energy_grid(cfg):
    energies = _floats(cfg.energies, "energies")
    if energies:
        return np.asarray(energies)
    lo, hi = band_edges(cfg.M)
    return np.linspace(lo, hi, cfg.n_energies)


def cmd_dos(cfg):
    e = _energy_grid(cfg)
    if cfg.k == 0:
        curve = dos_free(cfg.M, e)
    else:
        curve = dos_disordered(_model(cfg), e, cfg.eta, _sampler(cfg), cfg.seed, cfg.workers)
    _write(cfg, curve.rows(), ("energy", "density", "std_error"))
    if cfg.svg:
        series = {"density": (list(curve.energies), list(curve.density))}
        if cfg.k != 0:
            free = dos_free(cfg.M, e)
            series["free"] = (list(free.energies), list(free.density))
        write_svg(cfg.svg, series, xlabel="E", ylabel="density", title=f"M={cfg.M} k={cfg.k:g}")
    print(f"{len(e)} energies, trapezoid integral {curve.integral():.6f}")
    return 0


def cmd_certify(cfg):
    search = mu_mod.SearchConfig(
        samples=cfg.samples,
        rho=cfg.rho,
        eta1=cfg.eta1,
        eps0=cfg.eps0,
        q_ladder=tuple(_floats(cfg.q_ladder, "q_ladder")),
        seed=cfg.seed,
        workers=cfg.workers,
    )
    if cfg.bound == mu_mod.CONTRACTION:
        rep = mu_mod.certify_contraction(cfg.M, cfg.p, cfg.E, search)
        status = 0 if rep.certificate_epsilon is not None else 2
    else:
        rep = mu_mod.fit_growth_constants(cfg.M, cfg.p, cfg.E, search)
        status = 0 if (rep.violations == 0 and math.isfinite(rep.fitted_C)) else 2
    doc = rep.to_json_dict()
    doc["config"] = embedded_config(cfg)
    _dump_json(_out_path(cfg), doc)
    summary = {k: doc[k] for k in ("bound", "samples", "max_value", "certificate_epsilon", "fitted_C", "fitted_C_prime") if k in doc}
    print(json.dumps(summary), "(sampled bound)")
    return status


HANDLERS = {
    "verify": cmd_verify,
    "oracle": cmd_oracle,
    "sweep": cmd_sweep,
    "mu-scan": cmd_mu_scan,
    "dos": cmd_dos,
    "certify": cmd_certify,
}


def run(cfg: RunConfig) -> int:
    try:
        cfg = validate(cfg)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 1
    try:
        return HANDLERS[cfg.command](cfg)
    except OSError as exc:
        print(f"I/O error on {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 1
    except ResourceBudgetError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 1


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1; status 2 is reserved for failed checks."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cayley-ac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name, epilog="Lists starting with a minus sign need '=': --energies=-1,0,1")
        sp.add_argument("--config", help="flat key = value file; flags override it")
        for f in fields(RunConfig):
            if f.name == "command":
                continue
            flag = "--" + f.name.replace("_", "-")
            aliases = [flag] if flag == "--" + f.name else [flag, "--" + f.name]
            sp.add_argument(*aliases, dest=f.name, default=None, help=f"(default {f.default!r})")
    return parser


def parse_args(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    values = {}
    if ns.config:
        values.update(read_config_file(ns.config))
    for name in FIELD_TYPES:
        if name == "command":
            continue
        v = getattr(ns, name)
        if v is not None:
            values[name] = _coerce(name, v, "--")
    return RunConfig(command=ns.command, **values)


def main(argv=None) -> int:
    try:
        cfg = parse_args(argv)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
