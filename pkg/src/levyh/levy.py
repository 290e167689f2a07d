"""Crank-Nicolson discretization of the Levy-driven convection-diffusion
equation on uniform 1D and 2D grids.

The operator combines local convection-diffusion-reaction terms (standard
second/central differences) with the nonlocal jump integral, discretized
by the trapezoidal rule over a truncation window. For a smooth,
semi-heavy jump density the truncation error decays exponentially in the
window size, and the window defaults to the full reachable offset span of
the computational domain so that every matrix entry beyond the first
off-diagonal is a plain kernel value ``-nu((j-i) h) * h**d``.

Both time-step operators ``I +- dt/2 * A`` can be materialized densely
(for oracles at small sizes) or as H-matrices, where admissible blocks
come from the separable Gaussian expansion and every inadmissible block
stores exact entries, including the identity and the finite-difference
band. The Fourier symbol of the jump part and the scheme's amplification
factor are provided as stability oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import build_cluster_tree
from .hmatrix import (
    HConfig,
    build_from_expansion,
    gaussian_expansion_1d,
    gaussian_expansion_2d,
)
from .hops import hlu, matvec, solve

__all__ = [
    "LevyMeasure",
    "gaussian_measure",
    "UniformGrid1D",
    "UniformGrid2D",
    "CNSystem",
    "assemble_cn_1d",
    "assemble_cn_2d",
    "step_cn",
    "run_cn",
    "symbol_eta",
    "amplification",
]


@dataclass
class LevyMeasure:
    """Jump density with a declared regularity class.

    ``density(y)`` evaluates the 1D density on an array of offsets;
    ``density2(dx, dy)`` evaluates the 2D density on offset component
    arrays. ``gauss_eps_sq``/``scale`` are set for Gaussian densities
    ``scale * exp(-eps_sq |y|^2)`` and enable the series H-builder.
    """

    density: object
    kind: str = "smooth_semi_heavy"
    symmetric: bool | None = None
    density2: object = None
    gauss_eps_sq: float | None = None
    scale: float = 1.0

    def __call__(self, y):
        return self.density(np.asarray(y, dtype=float))


def gaussian_measure(eps_sq=5.0, scale=1.0):
    """Gaussian jump density ``scale * exp(-eps_sq y^2)`` (1D and 2D)."""
    return LevyMeasure(
        density=lambda y: scale * np.exp(-eps_sq * np.asarray(y, dtype=float) ** 2),
        kind="smooth_semi_heavy",
        symmetric=True,
        density2=lambda dx, dy: scale * np.exp(-eps_sq * (dx * dx + dy * dy)),
        gauss_eps_sq=eps_sq,
        scale=scale,
    )


@dataclass(frozen=True)
class UniformGrid1D:
    """n points ``x_i = lo + i h`` with ``h = (hi - lo)/n``."""

    n: int
    lo: float = -1.0
    hi: float = 1.0

    @property
    def h(self):
        return (self.hi - self.lo) / self.n

    @property
    def points(self):
        return self.lo + self.h * np.arange(self.n)

    @property
    def size(self):
        return self.n


@dataclass(frozen=True)
class UniformGrid2D:
    """Tensor grid, row-major: point ``k = iy * nx + ix`` at
    ``(lo + ix h, lo + iy h)`` with ``h = (hi - lo)/nx`` and nx == ny."""

    nx: int
    ny: int
    lo: float = -1.0
    hi: float = 1.0

    @property
    def h(self):
        return (self.hi - self.lo) / self.nx

    @property
    def size(self):
        return self.nx * self.ny

    @property
    def points(self):
        ix = np.arange(self.nx)
        iy = np.arange(self.ny)
        X, Y = np.meshgrid(self.lo + self.h * ix, self.lo + self.h * iy)
        return np.column_stack([X.ravel(), Y.ravel()])


class CNSystem:
    """Assembled Crank-Nicolson operators plus grid metadata.

    Holds the coefficients, the trapezoid weights of the truncation
    window, ``lam`` (the kernel sum entering the diagonal) and lazy
    builders for the dense and hierarchical forms of ``A``,
    ``A_plus = I + dt/2 A`` and ``A_minus = I - dt/2 A``.
    """

    def __init__(self, grid, nu, a, b, c, dt, n_off, lam, dim):
        self.grid = grid
        self.nu = nu
        self.a = a
        self.b = b
        self.c = c
        self.dt = dt
        self.n_off = n_off  # truncation window is offsets |j| <= n_off
        self.lam = lam
        self.dim = dim
        self.h = grid.h
        self.tree = None
        self.factor = None
        self.h_minus = None
        self._dense = {}

    @property
    def n(self):
        return self.grid.size

    def weight(self, j):
        """Trapezoid weight of offset j in the window index set."""
        j = np.asarray(j)
        w = np.full(j.shape, self.h, dtype=float)
        w[np.abs(j) >= self.n_off] = self.h / 2.0
        return w

    # -- exact entries ------------------------------------------------

    def _entries_a_1d(self, rows, cols):
        h = self.h
        off = cols[None, :] - rows[:, None]
        E = -self.nu.density(off * h) * h
        E[off == 1] += -self.a / h**2 - self.b / (2 * h)
        E[off == -1] += -self.a / h**2 + self.b / (2 * h)
        E[off == 0] = 2 * self.a / h**2 - self.c + self.lam * h
        return E

    def _entries_a_2d(self, rows, cols):
        h = self.h
        nx = self.grid.nx
        ix_r, iy_r = rows % nx, rows // nx
        ix_c, iy_c = cols % nx, cols // nx
        dx = (ix_c[None, :] - ix_r[:, None]) * h
        dy = (iy_c[None, :] - iy_r[:, None]) * h
        E = -self.nu.density2(dx, dy) * h**2
        ex = (np.abs(dx) < 1.5 * h) & (np.abs(dy) < 0.5 * h)
        ey = (np.abs(dy) < 1.5 * h) & (np.abs(dx) < 0.5 * h)
        E[ex & (dx > 0.5 * h)] += -self.a / h**2 - self.b / (2 * h)
        E[ex & (dx < -0.5 * h)] += -self.a / h**2 + self.b / (2 * h)
        E[ey & (np.abs(dy) > 0.5 * h)] += -self.a / h**2
        E[ex & ey] = 4 * self.a / h**2 - self.c + self.lam * h**2
        return E

    def entries(self, rows, cols, which="A"):
        """Exact matrix entries for original-order index arrays."""
        rows = np.asarray(rows, dtype=np.intp)
        cols = np.asarray(cols, dtype=np.intp)
        E = self._entries_a_1d(rows, cols) if self.dim == 1 else self._entries_a_2d(rows, cols)
        if which == "A":
            return E
        eye = (cols[None, :] == rows[:, None]).astype(float)
        if which == "plus":
            return eye + 0.5 * self.dt * E
        if which == "minus":
            return eye - 0.5 * self.dt * E
        raise ValueError(which)

    # -- materializations ---------------------------------------------

    def dense_matrix(self, which="A"):
        if which not in self._dense:
            idx = np.arange(self.n)
            self._dense[which] = self.entries(idx, idx, which)
        return self._dense[which]

    def cluster_tree(self, leaf_size=64, strategy="bisection"):
        if self.tree is None:
            pts = self.grid.points
            if self.dim == 1:
                pts = pts[:, None]
            self.tree = build_cluster_tree(pts, leaf_size=leaf_size, strategy=strategy)
        return self.tree

    def hmatrix(self, which="plus", cfg=None):
        """H-form of A_plus / A_minus / A via the Gaussian series builder."""
        cfg = cfg or HConfig()
        if self.nu.gauss_eps_sq is None:
            raise ValueError("series H-builder requires a Gaussian jump density")
        ct = self.cluster_tree(leaf_size=cfg.n_min)
        sign = {"A": -1.0, "plus": -0.5 * self.dt, "minus": +0.5 * self.dt}[which]
        scale = sign * self.nu.scale * self.h**self.dim
        make = gaussian_expansion_1d if self.dim == 1 else gaussian_expansion_2d
        expansion = make(self.nu.gauss_eps_sq, scale=scale)
        orig = ct.perm.inverse

        def entry_fn(r, c):
            return self.entries(orig[r], orig[c], which)

        return build_from_expansion(ct, ct, expansion, cfg, entry_fn=entry_fn)

    def prepare(self, cfg=None, eps2=1e-10):
        """Factorize A_plus (H-form) once and cache A_minus for stepping."""
        cfg = cfg or HConfig()
        self.h_minus = self.hmatrix("minus", cfg)
        self.factor = hlu(self.hmatrix("plus", cfg), eps2)
        return self.factor


def _check_coeffs(nu, a, c):
    if a < 0 or c > 0:
        raise ValueError("stability requires a >= 0 and c <= 0")
    if nu.kind != "smooth_semi_heavy":
        raise ValueError("CN assembly needs a smooth semi-heavy density; "
                         "use levyh.fractional for singular measures")


def assemble_cn_1d(nu, a, b, c, grid, dt, window=None):
    """Assemble the 1D Crank-Nicolson system.

    ``window`` is the one-sided truncation bound B with the jump integral
    restricted to offsets ``|y| <= B``; it defaults to the reachable span
    ``hi - lo`` of the grid, so all in-matrix offsets carry weight h.
    """
    _check_coeffs(nu, a, c)
    span = window if window is not None else (grid.hi - grid.lo)
    n_off = int(round(span / grid.h))
    j = np.arange(1, n_off + 1)
    vals = np.concatenate([nu.density(-j * grid.h), nu.density(j * grid.h)])
    if np.any(vals < 0):
        raise ValueError("jump density must be nonnegative")
    lam = float(vals.sum())
    return CNSystem(grid, nu, a, b, c, dt, n_off, lam, dim=1)


def assemble_cn_2d(nu, a, b, c, grid, dt, window=None):
    """Assemble the 2D Crank-Nicolson system (tensor-grid analog).

    Convection acts along the first coordinate. Zero Dirichlet data
    outside the domain is implied by restricting columns to the grid.
    """
    _check_coeffs(nu, a, c)
    if nu.density2 is None:
        raise ValueError("2D assembly needs a 2D density")
    span = window if window is not None else (grid.hi - grid.lo)
    n_off = int(round(span / grid.h))
    j = np.arange(-n_off, n_off + 1) * grid.h
    JX, JY = np.meshgrid(j, j)
    vals = nu.density2(JX, JY)
    if np.any(vals < 0):
        raise ValueError("jump density must be nonnegative")
    lam = float(vals.sum() - vals[n_off, n_off])
    return CNSystem(grid, nu, a, b, c, dt, n_off, lam, dim=2)


def step_cn(sys, u_n, F=None):
    """One Crank-Nicolson step: solve ``A_plus u = A_minus u_n``.

    ``u_n`` is in grid order; ``F`` defaults to the factorization cached
    by :meth:`CNSystem.prepare`.
    """
    F = F if F is not None else sys.factor
    if F is None or sys.h_minus is None:
        raise ValueError("call CNSystem.prepare() before stepping")
    perm = sys.tree.perm
    rhs = matvec(sys.h_minus, perm.to_tree(u_n))
    return perm.from_tree(solve(F, rhs))


def run_cn(sys, u0, n_steps, cfg=None, eps2=1e-10, mode="hmatrix"):
    """March ``n_steps`` Crank-Nicolson steps from ``u0`` (grid order).

    ``mode='hmatrix'`` factorizes A_plus in H-form once and reuses it;
    ``mode='dense'`` is the dense oracle path (LU of the dense A_plus).
    """
    u = np.asarray(u0, dtype=float).copy()
    if mode == "dense":
        import scipy.linalg as sla

        lu = sla.lu_factor(sys.dense_matrix("plus"))
        Am = sys.dense_matrix("minus")
        for _ in range(n_steps):
            u = sla.lu_solve(lu, Am @ u)
        return u
    if sys.factor is None:
        sys.prepare(cfg, eps2)
    perm = sys.tree.perm
    ut = perm.to_tree(u)
    for _ in range(n_steps):
        ut = solve(sys.factor, matvec(sys.h_minus, ut))
    return perm.from_tree(ut)


def symbol_eta(nu, h, theta, J):
    """Discrete Fourier symbol of the jump operator.

    Returns ``eta_e(theta) + i eta_o(theta)`` from the even/odd split of
    the density over the offsets ``0 < |j| <= J``:
    ``eta_e = -2 sum_j sin^2(j theta h / 2) nu_j^e h`` and
    ``eta_o = sum_j sin(j h theta) nu_j^o h``. For a symmetric density the
    imaginary part vanishes and the real part is nonpositive.
    """
    j = np.arange(1, J + 1)
    nu_p = np.asarray(nu.density(j * h), dtype=float)
    nu_m = np.asarray(nu.density(-j * h), dtype=float)
    even = 0.5 * (nu_p + nu_m)
    odd = 0.5 * (nu_p - nu_m)
    eta_e = -4.0 * h * np.sum(np.sin(j * theta * h / 2.0) ** 2 * even)
    eta_o = 2.0 * h * np.sum(np.sin(j * h * theta) * odd)
    return complex(eta_e, eta_o)


def amplification(sys, theta):
    """Amplification factor g(theta) of the scheme at physical wavenumber
    theta; ``|g| <= 1`` for all theta when a >= 0 and c <= 0."""
    h, dt = sys.h, sys.dt
    eta = symbol_eta(sys.nu, h, theta, sys.n_off)
    s2 = math.sin(theta * h / 2.0) ** 2
    sn = math.sin(theta * h)
    adv = 1j * sys.b * dt / (2 * h) * sn
    num = 1 - sys.a * dt / h**2 * s2 + adv + sys.c * dt / 2 + dt * eta / 2
    den = 1 + sys.a * dt / h**2 * s2 - adv - sys.c * dt / 2 - dt * eta / 2
    return num / den
