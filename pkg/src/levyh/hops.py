"""H-matrix arithmetic: matvec, recompressed addition, triangular solves
and the recursive block LU factorization.

The LU factorization is performed in place: dense diagonal leaves are
replaced by their LAPACK factorization (partial pivoting stays inside the
leaf), the off-diagonal children of a hierarchical diagonal block are
overwritten with the corresponding L21 / U12 factors, and Schur updates
``A22 - L21 @ U12`` are carried out in H-arithmetic where any update to a
low-rank block is followed by one recompression at relative Frobenius
tolerance ``eps2``.

The triangular-solve recursion follows the block rules: a dense right-hand
side splits by rows, a low-rank right-hand side is solved on its skinny
factor only (rank is preserved), and a hierarchical right-hand side uses
the 2x2 forward/backward block recursion. Right solves ``X @ U = B`` are
reduced to transposed solves on the stored factors.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg.blas import dtrsm

from .hmatrix import Dense, FactoredDense, Hier, HMatrix, LowRank, to_dense

__all__ = [
    "matvec",
    "block_matvec",
    "mul_dense",
    "tmul_dense",
    "block_transpose",
    "lowrank_add_recompress",
    "trisolve_lower",
    "trisolve_upper_right",
    "hlu",
    "HFactorization",
    "solve",
]


# ---------------------------------------------------------------------------
# products
# ---------------------------------------------------------------------------


def block_matvec(block, x):
    """Apply a block to a vector."""
    if isinstance(block, Dense):
        return block.data @ x
    if isinstance(block, LowRank):
        return block.u @ (block.v.T @ x)
    if isinstance(block, Hier):
        x1, x2 = x[: block.col_split], x[block.col_split :]
        c = block.children
        y1 = block_matvec(c[0][0], x1) + block_matvec(c[0][1], x2)
        y2 = block_matvec(c[1][0], x1) + block_matvec(c[1][1], x2)
        return np.concatenate([y1, y2])
    raise TypeError(f"cannot multiply block of type {type(block).__name__}")


def matvec(H, x):
    """H-matrix times vector; both in tree ordering."""
    x = np.asarray(x, dtype=float)
    if x.shape != (H.n_cols,):
        raise ValueError(f"vector length {x.shape} does not match n_cols={H.n_cols}")
    return block_matvec(H.root, x)


def mul_dense(block, D):
    """block @ D for a dense matrix D."""
    if isinstance(block, Dense):
        return block.data @ D
    if isinstance(block, LowRank):
        return block.u @ (block.v.T @ D)
    if isinstance(block, Hier):
        D1, D2 = D[: block.col_split], D[block.col_split :]
        c = block.children
        top = mul_dense(c[0][0], D1) + mul_dense(c[0][1], D2)
        bot = mul_dense(c[1][0], D1) + mul_dense(c[1][1], D2)
        return np.vstack([top, bot])
    raise TypeError(f"cannot multiply block of type {type(block).__name__}")


def tmul_dense(block, D):
    """block.T @ D for a dense matrix D."""
    if isinstance(block, Dense):
        return block.data.T @ D
    if isinstance(block, LowRank):
        return block.v @ (block.u.T @ D)
    if isinstance(block, Hier):
        D1, D2 = D[: block.row_split], D[block.row_split :]
        c = block.children
        top = tmul_dense(c[0][0], D1) + tmul_dense(c[1][0], D2)
        bot = tmul_dense(c[0][1], D1) + tmul_dense(c[1][1], D2)
        return np.vstack([top, bot])
    raise TypeError(f"cannot multiply block of type {type(block).__name__}")


def block_transpose(block):
    """Structural transpose of a block tree."""
    if isinstance(block, Dense):
        return Dense(block.data.T.copy())
    if isinstance(block, LowRank):
        return LowRank(block.v, block.u)
    if isinstance(block, Hier):
        c = block.children
        kids = [
            [block_transpose(c[0][0]), block_transpose(c[1][0])],
            [block_transpose(c[0][1]), block_transpose(c[1][1])],
        ]
        return Hier(kids, row_split=block.col_split, col_split=block.row_split)
    raise TypeError(f"cannot transpose block of type {type(block).__name__}")


# ---------------------------------------------------------------------------
# low-rank addition with recompression
# ---------------------------------------------------------------------------


def _truncate_sv(s, eps2):
    """Smallest kept rank r with || s[r:] ||_2 <= eps2 * || s ||_2."""
    ssq = s * s
    total = float(np.sqrt(ssq.sum()))
    if total == 0.0:
        return 0
    tail = np.sqrt(np.concatenate([np.cumsum(ssq[::-1])[::-1], [0.0]]))
    return int(np.argmax(tail <= eps2 * total))


def _add_lr(u1, v1, u2, v2, eps2):
    """Factors of the recompressed sum u1 v1' + u2 v2'."""
    U = np.hstack([u1, u2])
    V = np.hstack([v1, v2])
    if U.shape[1] == 0:
        return U, V
    qu, ru = np.linalg.qr(U)
    qv, rv = np.linalg.qr(V)
    w, s, zt = np.linalg.svd(ru @ rv.T)
    r = _truncate_sv(s, eps2)
    return qu @ (w[:, :r] * s[:r]), qv @ zt[:r].T


def lowrank_add_recompress(A, B, eps2):
    """Sum of two low-rank blocks, recompressed.

    The result C satisfies ``||C - (A+B)||_F <= eps2 * ||A+B||_F`` with the
    smallest rank achieving that bound (concatenate-QR-SVD truncation).
    """
    if A.shape != B.shape:
        raise ValueError("shape mismatch in low-rank addition")
    u, v = _add_lr(A.u, A.v, B.u, B.v, eps2)
    return LowRank(u, v)


def _svd_lowrank(D, eps2):
    """Dense block as truncated low-rank factors (Frobenius criterion)."""
    u, s, vt = np.linalg.svd(D, full_matrices=False)
    r = _truncate_sv(s, eps2)
    return u[:, :r] * s[:r], vt[:r].T.copy()


# ---------------------------------------------------------------------------
# triangular solves
# ---------------------------------------------------------------------------


def _net_permutation(piv):
    """Net row permutation of a LAPACK pivot sequence (P^T b == b[perm])."""
    perm = np.arange(piv.shape[0])
    for i, p in enumerate(piv):
        if p != i:
            perm[i], perm[p] = perm[p], perm[i]
    return perm


def _check_triangular_leaf(data, path):
    if np.any(np.diag(data) == 0.0):
        raise np.linalg.LinAlgError(f"singular triangular diagonal block at {path}")


def _trsm(a, b, lower, trans, unit):
    """Triangular solve a x = b via BLAS (low call overhead)."""
    b = np.asfortranarray(b, dtype=float)
    return dtrsm(1.0, a, b, side=0, lower=lower, trans_a=trans, diag=unit, overwrite_b=1)


def _leaf_solve(T, B, mode, unit, path):
    """Solve with a dense (or LU-factored) triangular leaf; B is 2-D."""
    if isinstance(T, FactoredDense):
        if mode == "L":
            return _trsm(T.lu, B[T.pperm], lower=1, trans=0, unit=1)
        if mode == "U":
            return _trsm(T.lu, B, lower=0, trans=0, unit=0)
        if mode == "Ut":
            return _trsm(T.lu, B, lower=0, trans=1, unit=0)
        raise ValueError(mode)
    _check_triangular_leaf(T.data, path)
    if mode == "L":
        return _trsm(T.data, B, lower=1, trans=0, unit=int(unit))
    if mode == "U":
        return _trsm(T.data, B, lower=0, trans=0, unit=int(unit))
    if mode == "Ut":
        return _trsm(T.data, B, lower=0, trans=1, unit=int(unit))
    raise ValueError(mode)


def _solve_dense_rhs(T, B, mode, unit, path):
    """Solve T X = B ('L'/'U') or T^T X = B ('Ut') for a dense rhs B."""
    if not isinstance(T, Hier):
        return _leaf_solve(T, B, mode, unit, path)
    c = T.children
    split = T.row_split
    B1, B2 = B[:split], B[split:]
    if mode == "L":
        y1 = _solve_dense_rhs(c[0][0], B1, mode, unit, path + ".11")
        y2 = _solve_dense_rhs(c[1][1], B2 - mul_dense(c[1][0], y1), mode, unit, path + ".22")
    elif mode == "U":
        y2 = _solve_dense_rhs(c[1][1], B2, mode, unit, path + ".22")
        y1 = _solve_dense_rhs(c[0][0], B1 - mul_dense(c[0][1], y2), mode, unit, path + ".11")
    elif mode == "Ut":
        y1 = _solve_dense_rhs(c[0][0], B1, mode, unit, path + ".11")
        y2 = _solve_dense_rhs(c[1][1], B2 - tmul_dense(c[0][1], y1), mode, unit, path + ".22")
    else:
        raise ValueError(mode)
    return np.vstack([y1, y2])


def _trisolve_block(T, B, mode, unit, eps2, path):
    """Solve T X = B in place on block B (mode 'L' lower or 'U' upper)."""
    if isinstance(B, LowRank):
        B.u = _solve_dense_rhs(T, B.u, mode, unit, path)
        return B
    if isinstance(B, Dense):
        B.data = _solve_dense_rhs(T, B.data, mode, unit, path)
        return B
    if not isinstance(T, Hier):
        return Dense(_solve_dense_rhs(T, to_dense(B), mode, unit, path))
    c = T.children
    b = B.children
    if mode == "L":
        b[0][0] = _trisolve_block(c[0][0], b[0][0], mode, unit, eps2, path + ".11")
        b[0][1] = _trisolve_block(c[0][0], b[0][1], mode, unit, eps2, path + ".11")
        _schur(b[1][0], c[1][0], b[0][0], eps2)
        _schur(b[1][1], c[1][0], b[0][1], eps2)
        b[1][0] = _trisolve_block(c[1][1], b[1][0], mode, unit, eps2, path + ".22")
        b[1][1] = _trisolve_block(c[1][1], b[1][1], mode, unit, eps2, path + ".22")
    else:
        b[1][0] = _trisolve_block(c[1][1], b[1][0], mode, unit, eps2, path + ".22")
        b[1][1] = _trisolve_block(c[1][1], b[1][1], mode, unit, eps2, path + ".22")
        _schur(b[0][0], c[0][1], b[1][0], eps2)
        _schur(b[0][1], c[0][1], b[1][1], eps2)
        b[0][0] = _trisolve_block(c[0][0], b[0][0], mode, unit, eps2, path + ".11")
        b[0][1] = _trisolve_block(c[0][0], b[0][1], mode, unit, eps2, path + ".11")
    return B


def _trisolve_right_upper(T, B, eps2, path):
    """Solve X U = B in place on block B, U being the upper part of T."""
    if isinstance(B, LowRank):
        B.v = _solve_dense_rhs(T, B.v, "Ut", True, path)
        return B
    if isinstance(B, Dense):
        B.data = _solve_dense_rhs(T, B.data.T, "Ut", True, path).T
        return B
    if not isinstance(T, Hier):
        return Dense(_solve_dense_rhs(T, to_dense(B).T, "Ut", True, path).T)
    c = T.children
    b = B.children
    b[0][0] = _trisolve_right_upper(c[0][0], b[0][0], eps2, path + ".11")
    b[1][0] = _trisolve_right_upper(c[0][0], b[1][0], eps2, path + ".11")
    _schur(b[0][1], b[0][0], c[0][1], eps2)
    _schur(b[1][1], b[1][0], c[0][1], eps2)
    b[0][1] = _trisolve_right_upper(c[1][1], b[0][1], eps2, path + ".22")
    b[1][1] = _trisolve_right_upper(c[1][1], b[1][1], eps2, path + ".22")
    return B


def trisolve_lower(L, B, unit_diagonal=False):
    """Solve ``L @ X = B`` for lower-triangular L in H-form.

    L and B may be Blocks or HMatrix wrappers; B may also be a dense
    array. The input B is not modified. Only the lower triangle of L
    (diagonal children plus sub-diagonal blocks) is referenced.
    """
    Lb = L.root if isinstance(L, HMatrix) else L
    if isinstance(B, np.ndarray):
        rhs = B.reshape(B.shape[0], -1).astype(float)
        out = _solve_dense_rhs(Lb, rhs, "L", unit_diagonal, "L")
        return out.reshape(B.shape)
    Bb = copy.deepcopy(B.root if isinstance(B, HMatrix) else B)
    return _trisolve_block(Lb, Bb, "L", unit_diagonal, 0.0, "L")


def trisolve_upper_right(U, B, unit_diagonal=False):
    """Solve ``X @ U = B`` for upper-triangular U in H-form.

    Reduced to the transposed lower solve ``U^T X^T = B^T``.
    """
    Ub = U.root if isinstance(U, HMatrix) else U
    if isinstance(B, np.ndarray):
        rhs = B.reshape(B.shape[0], -1).astype(float).T
        return _solve_dense_rhs(Ub, rhs, "Ut", unit_diagonal, "U").T.reshape(B.shape)
    Bb = copy.deepcopy(B.root if isinstance(B, HMatrix) else B)
    if unit_diagonal:
        raise ValueError("unit_diagonal right solves are not supported on blocks")
    return _trisolve_right_upper(Ub, Bb, 0.0, "U")


# ---------------------------------------------------------------------------
# Schur updates (C -= A @ B in H-arithmetic)
# ---------------------------------------------------------------------------


def _sub_lowrank(C, U, V, eps2):
    """C -= U @ V.T, recompressing if C is low-rank."""
    if U.shape[1] == 0:
        return
    if isinstance(C, Dense):
        C.data -= U @ V.T
    elif isinstance(C, LowRank):
        C.u, C.v = _add_lr(C.u, C.v, -U, V, eps2)
    else:
        rs, cs = C.row_split, C.col_split
        _sub_lowrank(C.children[0][0], U[:rs], V[:cs], eps2)
        _sub_lowrank(C.children[0][1], U[:rs], V[cs:], eps2)
        _sub_lowrank(C.children[1][0], U[rs:], V[:cs], eps2)
        _sub_lowrank(C.children[1][1], U[rs:], V[cs:], eps2)


def _sub_dense(C, D, eps2):
    """C -= D for a dense update D."""
    if isinstance(C, Dense):
        C.data -= D
    elif isinstance(C, LowRank):
        C.u, C.v = _svd_lowrank(C.u @ C.v.T - D, eps2)
    else:
        rs, cs = C.row_split, C.col_split
        _sub_dense(C.children[0][0], D[:rs, :cs], eps2)
        _sub_dense(C.children[0][1], D[:rs, cs:], eps2)
        _sub_dense(C.children[1][0], D[rs:, :cs], eps2)
        _sub_dense(C.children[1][1], D[rs:, cs:], eps2)


def _schur(C, A, B, eps2):
    """C -= A @ B with all operands in block form."""
    if isinstance(A, LowRank):
        _sub_lowrank(C, A.u, tmul_dense(B, A.v), eps2)
    elif isinstance(B, LowRank):
        _sub_lowrank(C, mul_dense(A, B.u), B.v, eps2)
    elif isinstance(A, Dense) and isinstance(B, Dense):
        _sub_dense(C, A.data @ B.data, eps2)
    elif isinstance(A, Dense):
        _sub_dense(C, tmul_dense(B, A.data.T).T, eps2)
    elif isinstance(B, Dense):
        _sub_dense(C, mul_dense(A, B.data), eps2)
    elif isinstance(C, Hier) and isinstance(A, Hier) and isinstance(B, Hier):
        if A.col_split != B.row_split or C.row_split != A.row_split or C.col_split != B.col_split:
            _sub_dense(C, mul_dense(A, to_dense(B)), eps2)
            return
        for i in (0, 1):
            for j in (0, 1):
                for k in (0, 1):
                    _schur(C.children[i][j], A.children[i][k], B.children[k][j], eps2)
    else:
        _sub_dense(C, mul_dense(A, to_dense(B)), eps2)


# ---------------------------------------------------------------------------
# H-LU
# ---------------------------------------------------------------------------


@dataclass
class HFactorization:
    """In-place LU factors sharing the block structure of the input.

    Dense diagonal leaves hold their pivoted LAPACK factorization; the
    off-diagonal children of hierarchical diagonal blocks hold L21 / U12.
    """

    h: HMatrix
    eps2: float

    def solve(self, b):
        return solve(self, b)


def _lu_block(blk, eps2, path):
    if isinstance(blk, Dense):
        lu, piv = sla.lu_factor(blk.data, check_finite=False)
        if np.any(np.diag(lu) == 0.0):
            raise np.linalg.LinAlgError(f"zero pivot in dense diagonal leaf at {path}")
        fd = FactoredDense(lu, piv)
        fd.pperm = _net_permutation(piv)
        return fd
    if not isinstance(blk, Hier):
        raise TypeError(f"cannot LU-factorize diagonal block of type {type(blk).__name__} at {path}")
    c = blk.children
    c[0][0] = _lu_block(c[0][0], eps2, path + ".11")
    c[0][1] = _trisolve_block(c[0][0], c[0][1], "L", True, eps2, path + ".12")
    c[1][0] = _trisolve_right_upper(c[0][0], c[1][0], eps2, path + ".21")
    _schur(c[1][1], c[1][0], c[0][1], eps2)
    c[1][1] = _lu_block(c[1][1], eps2, path + ".22")
    return blk


def hlu(H, eps2=1e-10):
    """Recursive block LU of a square H-matrix, in place.

    Pivoting happens only inside dense diagonal leaves. Schur updates to
    low-rank blocks are recompressed at relative tolerance ``eps2``. The
    input HMatrix is consumed (its storage now holds the factors).
    """
    if H.n_rows != H.n_cols:
        raise ValueError("LU requires a square matrix")
    H.root = _lu_block(H.root, eps2, "root")
    return HFactorization(H, eps2)


def solve(F, b):
    """Forward and backward substitution with an H-LU factorization."""
    b = np.asarray(b, dtype=float)
    if b.shape[0] != F.h.n_rows:
        raise ValueError("right-hand side length mismatch")
    rhs = b.reshape(b.shape[0], -1)
    y = _solve_dense_rhs(F.h.root, rhs, "L", True, "root")
    x = _solve_dense_rhs(F.h.root, y, "U", False, "root")
    return x.reshape(b.shape)
