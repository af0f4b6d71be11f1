"""Forward and root Green functions on truncated Cayley trees.

Trees are stored level by level. Vertex ``j`` on level ``l`` has children
``j*c, ..., j*c + c - 1`` on level ``l + 1``, where ``c`` is the number of
children on level ``l`` (``M``, or ``M + 1`` at the root of a full lattice).
Potential arrays may carry leading batch axes, in which case every routine
below works on all realizations at once.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .halfplane import as_complex, fixed_point
from .model import TreeModel
from .rng import block_sizes, derive_rng

FORWARD = "forward_subtree"
FULL = "full_lattice_root"
LEAF_POLICIES = ("fixed_point", "truncate")

# total complex entries (vertices x batch) a single evaluation may allocate
MAX_ENTRIES = 1 << 25


class ResourceBudgetError(RuntimeError):
    pass


class SolverBreakdown(RuntimeError):
    def __init__(self, residual: float):
        super().__init__(f"sparse solve residual {residual:.3e} exceeds tolerance")
        self.residual = residual


def level_sizes(M: int, depth: int, rooted: str = FORWARD) -> list[int]:
    if rooted == FORWARD:
        return [M**l for l in range(depth + 1)]
    if rooted == FULL:
        return [1] + [(M + 1) * M ** (l - 1) for l in range(1, depth + 1)]
    raise ValueError(f"unknown rooting {rooted!r}")


def vertex_count(M: int, depth: int, rooted: str = FORWARD) -> int:
    return sum(level_sizes(M, depth, rooted))


def _children(M: int, level: int, rooted: str) -> int:
    return M + 1 if (rooted == FULL and level == 0) else M


def _check_budget(n: int, budget: int):
    if n > budget:
        raise ResourceBudgetError(f"tree needs {n} entries, budget is {budget}")


@dataclass
class TruncatedTree:
    """A finite tree with one potential value per vertex.

    ``potentials[l]`` has shape ``batch + (level_sizes[l],)``.
    """

    branching: int
    depth: int
    potentials: list = field(repr=False)
    coupling: float = 1.0
    rooted: str = FORWARD

    def __post_init__(self):
        if self.branching < 2:
            raise ValueError("branching must be >= 2")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        sizes = level_sizes(self.branching, self.depth, self.rooted)
        if len(self.potentials) != len(sizes):
            raise ValueError(f"expected {len(sizes)} levels, got {len(self.potentials)}")
        self.potentials = [np.asarray(q, dtype=float) for q in self.potentials]
        batch = self.potentials[0].shape[:-1]
        for q, n in zip(self.potentials, sizes):
            if q.shape != batch + (n,):
                raise ValueError(f"level of shape {q.shape} does not match {batch + (n,)}")

    @property
    def batch_shape(self) -> tuple:
        return self.potentials[0].shape[:-1]

    @property
    def n_vertices(self) -> int:
        return vertex_count(self.branching, self.depth, self.rooted)

    @classmethod
    def zeros(cls, M: int, depth: int, rooted: str = FORWARD, coupling: float = 0.0, batch=()):
        sizes = level_sizes(M, depth, rooted)
        return cls(M, depth, [np.zeros(tuple(batch) + (n,)) for n in sizes], coupling, rooted)

    @classmethod
    def random(
        cls,
        model: TreeModel,
        depth: int,
        rng: np.random.Generator,
        rooted: str = FORWARD,
        batch=(),
        budget: int = MAX_ENTRIES,
    ):
        """Draw i.i.d. potentials level by level (root first)."""
        M = model.branching
        sizes = level_sizes(M, depth, rooted)
        _check_budget(sum(sizes) * int(np.prod(batch, dtype=np.int64)), budget)
        pots = [model.potential.sample(rng, tuple(batch) + (n,)) for n in sizes]
        return cls(M, depth, pots, model.coupling, rooted)

    def permuted_children(self, perm) -> "TruncatedTree":
        """Relabel the root's child subtrees by ``perm``."""
        c = _children(self.branching, 0, self.rooted)
        perm = list(perm)
        if sorted(perm) != list(range(c)):
            raise ValueError("perm must permute the root's children")
        pots = [self.potentials[0]]
        for q in self.potentials[1:]:
            parts = np.split(q, c, axis=-1)
            pots.append(np.concatenate([parts[i] for i in perm], axis=-1))
        return TruncatedTree(self.branching, self.depth, pots, self.coupling, self.rooted)


def _recurse(tree: TruncatedTree, lam: complex, policy: str):
    if policy not in LEAF_POLICIES:
        raise ValueError(f"unknown leaf policy {policy!r}")
    lam = complex(as_complex(lam))
    k = tree.coupling
    free = k == 0.0 or all(not np.any(q) for q in tree.potentials)
    if lam.imag < 0:
        raise ValueError("Im lambda must be >= 0")
    if lam.imag == 0.0 and not (policy == "fixed_point" and free):
        raise ValueError("eta = 0 requires the fixed_point policy and vanishing potential")
    M = tree.branching
    _check_budget(tree.n_vertices * int(np.prod(tree.batch_shape, dtype=np.int64)), MAX_ENTRIES)
    qs = tree.potentials
    if policy == "fixed_point" and free:
        # z_lam is an exact fixed point of the free recursion at every forward level
        zl = fixed_point(M, lam)
        if tree.rooted == FULL and tree.depth > 0:
            zl = -1.0 / ((M + 1) * zl + lam)
        return np.full(tree.batch_shape, zl, dtype=np.complex128)[()]
    if policy == "fixed_point":
        g = np.full(qs[-1].shape, fixed_point(M, lam), dtype=np.complex128)
    else:
        g = -1.0 / (lam - k * qs[-1])
    for level in range(tree.depth - 1, -1, -1):
        c = _children(M, level, tree.rooted)
        q = qs[level]
        s = g.reshape(q.shape + (c,)).sum(axis=-1)
        g = -1.0 / (s + lam - k * q)
    return g[..., 0][()]


def forward_green(tree: TruncatedTree, lam, policy: str = "truncate"):
    """Forward Green function at the root of a forward subtree.

    Evaluated leaves to root with ``G = -(sum of children + lam - k q)^{-1}``.
    With ``policy="fixed_point"`` the leaves carry ``z_lam``; with
    ``"truncate"`` they carry ``-1/(lam - k q_leaf)``, the exact value for
    the finite tree.
    """
    if tree.rooted != FORWARD:
        raise ValueError("forward_green needs a forward_subtree tree")
    return _recurse(tree, lam, policy)


def root_green(tree: TruncatedTree, lam, policy: str = "truncate"):
    """Root Green function of a full-lattice tree (``M + 1`` subtrees at the root)."""
    if tree.rooted != FULL:
        raise ValueError("root_green needs a full_lattice_root tree")
    return _recurse(tree, lam, policy)


def tree_matrix(tree: TruncatedTree) -> sp.csr_matrix:
    """Adjacency plus ``k q`` on the diagonal, vertices in level order."""
    if tree.batch_shape != ():
        raise ValueError("tree_matrix needs a single realization")
    M = tree.branching
    sizes = level_sizes(M, tree.depth, tree.rooted)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    rows, cols = [], []
    for level in range(1, tree.depth + 1):
        c = _children(M, level - 1, tree.rooted)
        child = np.arange(sizes[level])
        rows.append(offsets[level] + child)
        cols.append(offsets[level - 1] + child // c)
    n = int(offsets[-1])
    if rows:
        r = np.concatenate(rows)
        cidx = np.concatenate(cols)
        adj = sp.coo_matrix((np.ones(2 * r.size), (np.r_[r, cidx], np.r_[cidx, r])), shape=(n, n))
    else:
        adj = sp.coo_matrix((n, n))
    diag = sp.diags(tree.coupling * np.concatenate(tree.potentials))
    return (adj + diag).tocsr()


def resolvent_oracle(tree: TruncatedTree, lam, rtol: float = 1e-12):
    """``<delta_root, (H_tree - lam)^{-1} delta_root>`` by sparse LU on the assembled matrix.

    Shares no code with the recursion. Raises :class:`SolverBreakdown` when
    the relative residual of the solve exceeds ``rtol``.
    """
    lam = complex(as_complex(lam))
    if not lam.imag > 0:
        raise ValueError("resolvent_oracle needs Im lambda > 0")
    if tree.n_vertices > 2_000_000:
        raise ResourceBudgetError(f"{tree.n_vertices} vertices is too many for a direct solve")
    H = tree_matrix(tree).astype(np.complex128)
    A = (H - lam * sp.identity(H.shape[0], dtype=np.complex128, format="csr")).tocsc()
    e = np.zeros(H.shape[0], dtype=np.complex128)
    e[0] = 1.0
    x = spla.splu(A).solve(e)
    residual = float(np.linalg.norm(A @ x - e))
    scale = spla.norm(A, np.inf) * float(np.linalg.norm(x)) + 1.0
    if not np.isfinite(residual) or residual > rtol * scale:
        raise SolverBreakdown(residual)
    return complex(x[0])


def population_dynamics(
    model: TreeModel,
    lam,
    pool_size: int,
    iterations: int,
    rng: np.random.Generator,
    init: str = "fixed_point",
    pool=None,
):
    """Pool sampler for the distributional fixed point of the forward recursion.

    Each generation builds a new pool from a frozen copy of the old one:
    every member is ``phi`` of ``M`` members drawn uniformly with
    replacement and one fresh potential.

    Parameters
    ----------
    init : {"fixed_point", "truncate"}
        Starting pool: all ``z_lam``, or ``-1/(lam - k q)`` leaf values.
    pool : ndarray, optional
        Explicit starting pool; overrides ``init``.
    """
    lam = complex(as_complex(lam))
    if not lam.imag > 0:
        raise ValueError("population dynamics needs Im lambda > 0")
    if pool_size < 1 or iterations < 0:
        raise ValueError("pool_size must be >= 1 and iterations >= 0")
    M, k = model.branching, model.coupling
    if pool is not None:
        pool = np.array(pool, dtype=np.complex128)
        if pool.shape != (pool_size,):
            raise ValueError("pool has the wrong size")
    elif init == "fixed_point":
        pool = np.full(pool_size, fixed_point(M, lam), dtype=np.complex128)
        if model.is_free:
            return pool
    elif init == "truncate":
        pool = -1.0 / (lam - k * model.potential.sample(rng, pool_size))
    else:
        raise ValueError(f"unknown init {init!r}")
    for _ in range(iterations):
        idx = rng.integers(0, pool_size, size=(pool_size, M))
        q = model.potential.sample(rng, pool_size)
        pool = -1.0 / (pool[idx].sum(axis=1) + lam - k * q)
    return pool


def draw_from_pool(pool, model: TreeModel, lam, n: int, rng: np.random.Generator, root: bool = False):
    """Fresh recursion values built on pool members.

    ``root=False`` gives forward values (``M`` members), ``root=True`` gives
    full-lattice root values (``M + 1`` members).
    """
    lam = complex(as_complex(lam))
    c = model.branching + (1 if root else 0)
    idx = rng.integers(0, len(pool), size=(n, c))
    q = model.potential.sample(rng, n)
    return -1.0 / (pool[idx].sum(axis=1) + lam - model.coupling * q)


def full_tree_samples(
    model: TreeModel,
    lam,
    depth: int,
    n_samples: int,
    seed: int,
    key=(),
    policy: str = "fixed_point",
    rooted: str = FORWARD,
    block: int = 64,
):
    """Independent exact realizations of ``G^x`` (or ``G`` for a full root).

    Realizations are grouped in blocks of ``block``; block ``b`` draws from
    the stream keyed ``(seed, *key, b)``.
    """
    out = []
    for b, n in enumerate(block_sizes(n_samples, block)):
        rng = derive_rng(seed, *key, b)
        tree = TruncatedTree.random(model, depth, rng, rooted=rooted, batch=(n,))
        out.append(np.atleast_1d(_recurse(tree, lam, policy)))
    return np.concatenate(out) if out else np.zeros(0, dtype=np.complex128)
