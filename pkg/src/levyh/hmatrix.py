"""Hierarchical matrix storage and builders.

An H-matrix is a block tree whose leaves are either dense blocks or
low-rank ``U @ V.T`` factorizations. Inner nodes hold a 2x2 grid of child
blocks following the row/column cluster trees. Two builders are provided:

- :func:`build_from_expansion` assembles admissible blocks directly from a
  separable series expansion of the kernel (no dense intermediate), with
  either a fixed rank or the rank bound of :func:`rank_bound_gaussian`.
- :func:`build_from_dense` compresses an explicitly assembled dense matrix
  with truncated SVDs on admissible blocks, keeping singular values above
  a relative threshold ``eps1``.

Blocks larger than ``ceil(N / n_block)`` are always subdivided; blocks
with a side of at most ``n_min`` are always stored dense, which keeps the
near-diagonal band (where finite-difference corrections live) out of the
low-rank leaves.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import ClusterNode, ClusterTree, admissible

__all__ = [
    "Dense",
    "LowRank",
    "Hier",
    "FactoredDense",
    "HMatrix",
    "HConfig",
    "KernelExpansion",
    "gaussian_expansion_1d",
    "gaussian_expansion_2d",
    "rank_bound_gaussian",
    "build_from_expansion",
    "build_from_dense",
    "memory_report",
    "structure_summary",
    "dump_structure",
    "to_dense",
    "h_entry",
]


@dataclass
class Dense:
    """A fully populated block."""

    data: np.ndarray

    @property
    def shape(self):
        return self.data.shape


@dataclass
class LowRank:
    """A block stored as ``u @ v.T`` with u (m, r) and v (n, r)."""

    u: np.ndarray
    v: np.ndarray

    @property
    def shape(self):
        return (self.u.shape[0], self.v.shape[0])

    @property
    def rank(self):
        return self.u.shape[1]


@dataclass
class Hier:
    """A 2x2 grid of child blocks tiling the parent exactly."""

    children: list  # [[b11, b12], [b21, b22]]
    row_split: int
    col_split: int

    @property
    def shape(self):
        m = self.children[0][0].shape[0] + self.children[1][0].shape[0]
        n = self.children[0][0].shape[1] + self.children[0][1].shape[1]
        return (m, n)


@dataclass
class FactoredDense:
    """A dense diagonal leaf after in-place LU (LAPACK getrf layout)."""

    lu: np.ndarray
    piv: np.ndarray

    @property
    def shape(self):
        return self.lu.shape


@dataclass
class HMatrix:
    """Block-tree matrix bound to its row and column cluster trees."""

    root: object
    row_tree: ClusterTree
    col_tree: ClusterTree
    n_rows: int
    n_cols: int
    eta: float

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)


@dataclass
class HConfig:
    """Construction parameters.

    ``fixed_rank`` is the number of expansion terms per dimension kept in
    low-rank blocks. If ``delta`` is set, the rank is instead chosen per
    block from :func:`rank_bound_gaussian` so that the entrywise error is
    below ``delta``. ``eps1`` is the relative singular value cutoff for
    the dense-compression builder.
    """

    n_min: int = 64
    n_block: int = 4
    eta: float = 1.0
    fixed_rank: int = 10
    delta: float | None = None
    eps1: float = 1e-4


@dataclass
class KernelExpansion:
    """Separable expansion ``k(x, y) ~ sum_n a_n(x - c) b_n(y - c)``.

    ``kernel(X, Y)`` evaluates the exact kernel on point arrays (used for
    dense leaves and oracles); ``row_factors``/``col_factors`` evaluate
    the factor families around an expansion center, returning matrices
    with one column per kept term. ``eps`` is the Gaussian decay-rate
    parameter used by the rank bound (kernel ``exp(-eps^2 |x-y|^2)``).
    """

    kernel: object
    row_factors: object
    col_factors: object
    eps: float = 1.0


def _gauss_factor_columns(t, eps_sq, n_terms, alpha, scale=1.0):
    """Columns of the 1D Gaussian factor family at offsets t.

    alpha=True gives ``scale * (2 eps^2 t)^n e^{-eps^2 t^2} / n!``,
    alpha=False gives ``t^n e^{-eps^2 t^2}``; columns n = 0..n_terms-1.
    """
    out = np.empty((t.shape[0], n_terms))
    out[:, 0] = scale * np.exp(-eps_sq * t * t)
    base = 2.0 * eps_sq * t if alpha else t
    for n in range(1, n_terms):
        out[:, n] = out[:, n - 1] * base / (n if alpha else 1)
    return out


def gaussian_expansion_1d(eps_sq, scale=1.0):
    """Expansion of ``scale * exp(-eps_sq (x-y)^2)`` on 1D points."""

    def kernel(X, Y):
        d = X[:, :1] - Y[:, :1].T
        return scale * np.exp(-eps_sq * d * d)

    def row_factors(X, center, n_terms):
        t0 = X[:, 0] - center[0]
        return _gauss_factor_columns(t0, eps_sq, n_terms, alpha=True, scale=scale)

    def col_factors(Y, center, n_terms):
        t = Y[:, 0] - center[0]
        return _gauss_factor_columns(t, eps_sq, n_terms, alpha=False)

    return KernelExpansion(kernel, row_factors, col_factors, eps=math.sqrt(eps_sq))


def gaussian_expansion_2d(eps_sq, scale=1.0):
    """Expansion of ``scale * exp(-eps_sq |x-y|^2)`` on 2D points.

    The kernel factorizes over coordinates, so the 2D factor families are
    tensor products of the 1D ones: with ``n_terms`` kept per dimension
    the block rank is ``n_terms**2``.
    """

    def kernel(X, Y):
        d0 = X[:, 0:1] - Y[:, 0:1].T
        d1 = X[:, 1:2] - Y[:, 1:2].T
        return scale * np.exp(-eps_sq * (d0 * d0 + d1 * d1))

    def _tensor(cols_a, cols_b):
        m, t = cols_a.shape
        return (cols_a[:, :, None] * cols_b[:, None, :]).reshape(m, t * t)

    def row_factors(X, center, n_terms):
        a1 = _gauss_factor_columns(X[:, 0] - center[0], eps_sq, n_terms, True, scale)
        a2 = _gauss_factor_columns(X[:, 1] - center[1], eps_sq, n_terms, True)
        return _tensor(a1, a2)

    def col_factors(Y, center, n_terms):
        b1 = _gauss_factor_columns(Y[:, 0] - center[0], eps_sq, n_terms, False)
        b2 = _gauss_factor_columns(Y[:, 1] - center[1], eps_sq, n_terms, False)
        return _tensor(b1, b2)

    return KernelExpansion(kernel, row_factors, col_factors, eps=math.sqrt(eps_sq))


def rank_bound_gaussian(eps, D, delta):
    """Smallest integer rank exceeding the Gaussian tail bound.

    Returns the smallest integer r with
    ``r > max(log2(e^{2 eps^2 D^2} / delta) - 1, 12 eps^2 D^2 - 1)``,
    clamped at 0 (a nonpositive bound means a single term already meets
    the tolerance).
    """
    if D <= 0 or delta <= 0:
        raise ValueError("D and delta must be positive")
    e2 = 2.0 * eps * eps * D * D
    bound = max(e2 / math.log(2.0) - math.log2(delta) - 1.0, 6.0 * e2 - 1.0)
    return max(0, math.floor(bound) + 1)


def _expansion_terms(exp, row_node, cfg):
    if cfg.delta is None:
        return cfg.fixed_rank
    D = row_node.diameter
    if D <= 0:
        return 1
    return rank_bound_gaussian(exp.eps, D, cfg.delta) + 1


def build_from_expansion(row_ct, col_ct, expansion, cfg=None, entry_fn=None):
    """Assemble an H-matrix for a kernel given its separable expansion.

    ``entry_fn(rows, cols)``, if provided, supplies exact entries for
    dense leaves from tree-order index ranges (used when the matrix is
    the kernel plus local corrections, e.g. identity and finite
    difference stencils that only touch inadmissible blocks); otherwise
    dense leaves are filled from ``expansion.kernel``.
    """
    cfg = cfg or HConfig()
    if cfg.n_block < 2:
        raise ValueError("n_block must be >= 2")
    n_rows, n_cols = len(row_ct), len(col_ct)
    n_max = math.ceil(max(n_rows, n_cols) / cfg.n_block)

    def dense_block(rnode, cnode):
        if entry_fn is not None:
            data = entry_fn(np.arange(rnode.start, rnode.end), np.arange(cnode.start, cnode.end))
        else:
            data = expansion.kernel(
                row_ct.points[rnode.start : rnode.end], col_ct.points[cnode.start : cnode.end]
            )
        return Dense(np.ascontiguousarray(data, dtype=float))

    def lowrank_block(rnode, cnode):
        n_terms = _expansion_terms(expansion, rnode, cfg)
        center = rnode.center
        u = expansion.row_factors(row_ct.points[rnode.start : rnode.end], center, n_terms)
        v = expansion.col_factors(col_ct.points[cnode.start : cnode.end], center, n_terms)
        if u.shape[1] != v.shape[1]:
            raise ValueError("expansion factor families have mismatched lengths")
        return LowRank(u, v)

    def build(rnode, cnode):
        m, n = rnode.size, cnode.size
        can_split = not rnode.is_leaf and not cnode.is_leaf
        if (m > n_max or n > n_max) and can_split:
            pass  # forced subdivision
        elif admissible(rnode, cnode, cfg.eta) and min(m, n) > cfg.n_min:
            return lowrank_block(rnode, cnode)
        elif min(m, n) <= cfg.n_min or not can_split:
            return dense_block(rnode, cnode)
        r0, r1 = rnode.children
        c0, c1 = cnode.children
        kids = [[build(r0, c0), build(r0, c1)], [build(r1, c0), build(r1, c1)]]
        return Hier(kids, row_split=r0.size, col_split=c0.size)

    root = build(row_ct.root, col_ct.root)
    return HMatrix(root, row_ct, col_ct, n_rows, n_cols, cfg.eta)


def _svd_truncate(block, eps1):
    """Truncated SVD factors keeping sigma_k > eps1 * sigma_1; None if too big."""
    u, s, vt = np.linalg.svd(block, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(s > eps1 * s[0]))
    if rank > min(block.shape) // 2:
        return None
    return LowRank(u[:, :rank] * s[:rank], vt[:rank].T.copy())


def build_from_dense(A, row_ct, col_ct, cfg=None):
    """Compress a dense matrix (already permuted into tree order).

    Admissible blocks are replaced by truncated SVD factors at relative
    cutoff ``cfg.eps1``; blocks whose truncated rank would exceed half the
    minimal dimension stay dense.
    """
    cfg = cfg or HConfig()
    A = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if A.shape != (len(row_ct), len(col_ct)):
        raise ValueError("matrix shape does not match cluster trees")
    n_max = math.ceil(max(A.shape) / cfg.n_block)

    def build(rnode, cnode):
        m, n = rnode.size, cnode.size
        sub = A[rnode.start : rnode.end, cnode.start : cnode.end]
        can_split = not rnode.is_leaf and not cnode.is_leaf
        if (m > n_max or n > n_max) and can_split:
            pass
        elif admissible(rnode, cnode, cfg.eta) and min(m, n) > cfg.n_min:
            lr = _svd_truncate(sub, cfg.eps1)
            if lr is not None:
                return lr
            return Dense(sub.copy())
        elif min(m, n) <= cfg.n_min or not can_split:
            return Dense(sub.copy())
        r0, r1 = rnode.children
        c0, c1 = cnode.children
        kids = [[build(r0, c0), build(r0, c1)], [build(r1, c0), build(r1, c1)]]
        return Hier(kids, row_split=r0.size, col_split=c0.size)

    root = build(row_ct.root, col_ct.root)
    return HMatrix(root, row_ct, col_ct, A.shape[0], A.shape[1], cfg.eta)


def _walk(block, r0, c0, visit):
    if isinstance(block, Hier):
        rs, cs = block.row_split, block.col_split
        _walk(block.children[0][0], r0, c0, visit)
        _walk(block.children[0][1], r0, c0 + cs, visit)
        _walk(block.children[1][0], r0 + rs, c0, visit)
        _walk(block.children[1][1], r0 + rs, c0 + cs, visit)
    else:
        visit(block, r0, c0)


def memory_report(H):
    """Block counts and stored scalar count of an H-matrix.

    ``stored_scalars`` is ``sum(m*n)`` over dense blocks plus
    ``sum(r*(m+n))`` over low-rank blocks.
    """
    stats = {"dense_blocks": 0, "lowrank_blocks": 0, "stored_scalars": 0}

    def visit(block, r0, c0):
        m, n = block.shape
        if isinstance(block, LowRank):
            stats["lowrank_blocks"] += 1
            stats["stored_scalars"] += block.rank * (m + n)
        else:
            stats["dense_blocks"] += 1
            stats["stored_scalars"] += m * n

    _walk(H.root, 0, 0, visit)
    stats["bytes_at_8B"] = 8 * stats["stored_scalars"]
    return stats


def structure_summary(H):
    """Per-leaf-block records: row/col range, kind and rank."""
    rows = []

    def visit(block, r0, c0):
        m, n = block.shape
        kind = {Dense: "dense", LowRank: "lowrank", FactoredDense: "dense_lu"}[type(block)]
        rec = {"row0": r0, "row1": r0 + m, "col0": c0, "col1": c0 + n, "kind": kind}
        if isinstance(block, LowRank):
            rec["rank"] = block.rank
        rows.append(rec)

    _walk(H.root, 0, 0, visit)
    return rows


def dump_structure(H, path=None):
    """JSON dump of the block structure; written to ``path`` if given."""
    doc = {"n_rows": H.n_rows, "n_cols": H.n_cols, "blocks": structure_summary(H)}
    text = json.dumps(doc, indent=1)
    if path is not None:
        with open(path, "w") as f:
            f.write(text)
    return text


def to_dense(obj):
    """Materialize a block or H-matrix as a dense array."""
    block = obj.root if isinstance(obj, HMatrix) else obj
    if isinstance(block, Dense):
        return block.data.copy()
    if isinstance(block, LowRank):
        return block.u @ block.v.T
    if isinstance(block, FactoredDense):
        raise ValueError("cannot densify an LU-factored leaf")
    top = np.hstack([to_dense(block.children[0][0]), to_dense(block.children[0][1])])
    bot = np.hstack([to_dense(block.children[1][0]), to_dense(block.children[1][1])])
    return np.vstack([top, bot])


def h_entry(H, i, j):
    """Single entry in tree ordering (for sampled-entry checks)."""
    block = H.root if isinstance(H, HMatrix) else H
    while isinstance(block, Hier):
        if i >= block.row_split:
            i -= block.row_split
            row = 1
        else:
            row = 0
        if j >= block.col_split:
            j -= block.col_split
            col = 1
        else:
            col = 0
        block = block.children[row][col]
    if isinstance(block, Dense):
        return block.data[i, j]
    return float(block.u[i] @ block.v[j])
