"""Krylov solvers with pluggable preconditioning and residual logging.

Both solvers take the operator and the (inverse) preconditioner as
callables, so a dense matrix, an H-matrix matvec or an H-LU solve can be
plugged in interchangeably. Convergence is declared on the relative
residual ``||A x - b|| / ||b||``; the generalized-residual method uses
right preconditioning so the logged residual is that of the original
system.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

__all__ = ["IterationLog", "pcg", "gmres_restarted"]


@dataclass
class IterationLog:
    """Per-iteration relative residuals of a Krylov run."""

    residuals: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    seconds: float = 0.0

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["iter", "relative_residual", "seconds"])
            for k, r in enumerate(self.residuals):
                writer.writerow([k + 1, f"{r:.17g}", f"{self.seconds:.6g}" if k + 1 == len(self.residuals) else ""])


def _as_operator(op):
    if callable(op):
        return op
    mat = np.asarray(op)
    return lambda v: mat @ v


def pcg(apply_A, apply_M_inv, b, tol=1e-8, max_iter=500):
    """Preconditioned conjugate gradient for SPD operators.

    Raises on breakdown (``p' A p <= 0``), which signals a non-SPD
    operator or preconditioner.
    """
    A = _as_operator(apply_A)
    M = _as_operator(apply_M_inv) if apply_M_inv is not None else (lambda v: v)
    b = np.asarray(b, dtype=float)
    t0 = time.perf_counter()
    log = IterationLog()
    x = np.zeros_like(b)
    r = b.copy()
    normb = np.linalg.norm(b)
    if normb == 0:
        log.converged = True
        return x, log
    z = M(r)
    p = z.copy()
    rz = float(r @ z)
    for k in range(max_iter):
        Ap = A(p)
        pAp = float(p @ Ap)
        if pAp <= 0:
            raise np.linalg.LinAlgError("PCG breakdown: operator is not positive definite")
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        rel = float(np.linalg.norm(r) / normb)
        log.residuals.append(rel)
        log.iterations = k + 1
        if rel <= tol:
            log.converged = True
            break
        z = M(r)
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    log.seconds = time.perf_counter() - t0
    return x, log


def gmres_restarted(apply_A, apply_M_inv, b, tol=1e-8, restart=50, max_iter=500):
    """Right-preconditioned restarted generalized-residual iteration.

    Arnoldi with Givens rotations; the residual norm is monotone within
    each restart cycle. Stagnation past ``max_iter`` total iterations
    returns with ``converged=False`` (no exception).
    """
    A = _as_operator(apply_A)
    M = _as_operator(apply_M_inv) if apply_M_inv is not None else (lambda v: v)
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    t0 = time.perf_counter()
    log = IterationLog()
    x = np.zeros_like(b)
    normb = np.linalg.norm(b)
    if normb == 0:
        log.converged = True
        return x, log
    total = 0
    while total < max_iter and not log.converged:
        r = b - A(x)
        beta = float(np.linalg.norm(r))
        if beta / normb <= tol:
            log.converged = True
            break
        m = min(restart, max_iter - total)
        V = np.zeros((n, m + 1))
        H = np.zeros((m + 1, m))
        cs = np.zeros(m)
        sn = np.zeros(m)
        g = np.zeros(m + 1)
        g[0] = beta
        V[:, 0] = r / beta
        j_done = 0
        for j in range(m):
            w = A(M(V[:, j]))
            for i in range(j + 1):
                H[i, j] = float(w @ V[:, i])
                w -= H[i, j] * V[:, i]
            H[j + 1, j] = float(np.linalg.norm(w))
            if H[j + 1, j] > 0:
                V[:, j + 1] = w / H[j + 1, j]
            for i in range(j):
                tmp = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
                H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
                H[i, j] = tmp
            denom = np.hypot(H[j, j], H[j + 1, j])
            cs[j] = H[j, j] / denom
            sn[j] = H[j + 1, j] / denom
            H[j, j] = denom
            H[j + 1, j] = 0.0
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]
            j_done = j + 1
            total += 1
            rel = abs(g[j + 1]) / normb
            log.residuals.append(float(rel))
            log.iterations = total
            if rel <= tol:
                break
        y = np.linalg.solve(H[:j_done, :j_done], g[:j_done]) if j_done else np.zeros(0)
        x = x + M(V[:, :j_done] @ y)
        if log.residuals and log.residuals[-1] <= tol:
            log.converged = True
    log.seconds = time.perf_counter() - t0
    return x, log
