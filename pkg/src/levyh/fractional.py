"""Evaluation of the jump generator for singular, heavy-tailed measures
(fractional Laplacian as the flagship case), by singularity subtraction.

The generator is split into three parts around an evaluation point x:

- I1: trapezoid quadrature over the near-field window ``|y| <= L_W`` of
  the compensated integrand u(x+y) - u(x) - rho(y) [u'(x) y + u''(x) y^2 / 2],
  where ``rho`` is a radial window supported on ``|y| <= rho_r`` with
  1 - rho(y) = O(y^4). The compensation makes the integrand continuous at
  the kernel singularity; derivatives use central differences.
- I2: the far field ``f_x - u(x) * tail_mass`` with
  ``tail_mass = integral of nu over |y| > L_W`` (componentwise square
  window in 2D). For compactly supported u inside the window, f_x = 0.
- I3: the windowed diffusion term ``u''(x)/2 * integral rho nu y^2``,
  with the moment computed on dyadically graded panels toward the
  singularity (16-point Gauss-Legendre per panel).

Beyond the local correction band the implied matrix entries are plain
trapezoid kernel values, so the H-matrix compression of the dense
assembly still applies. The variable-order stiffness assembly for the
L-shaped domain reuses the row evaluator with a per-row order s(x) and is
row-parallel.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gammaln

from .levy import LevyMeasure

__all__ = [
    "WindowFn",
    "quartic_window",
    "FracConfig",
    "FracStencil",
    "frac_kernel_constant",
    "power_measure",
    "windowed_second_moment",
    "windowed_second_moment_radial_2d",
    "tail_mass_power_1d",
    "tail_mass_square_2d",
    "eval_i1",
    "eval_i2",
    "eval_i3",
    "frac_apply_1d",
    "frac_apply_2d",
    "frac_stencil_1d",
    "assemble_fractional_poisson_1d",
    "lshape_grid",
    "lshape_boundary_distance",
    "variable_order_field",
    "three_bump_source",
    "assemble_variable_order",
    "write_field_csv",
]


@dataclass(frozen=True)
class WindowFn:
    """Radial window: rho(0) = 1, vanishing for ``|y| >= radius``."""

    radius: float
    profile: object  # profile(t) on t = |y| / radius in [0, 1)

    def __call__(self, y):
        t = np.abs(np.asarray(y, dtype=float)) / self.radius
        out = np.where(t < 1.0, self.profile(np.minimum(t, 1.0)), 0.0)
        return out


def quartic_window(radius):
    """``rho(y) = (1 - (|y|/radius)^4)^2`` inside the radius, else 0.

    Satisfies 1 - rho = O(y^4) at the origin and is C^1 at the support
    edge.
    """
    if radius <= 0:
        raise ValueError("window radius must be positive")
    return WindowFn(radius, lambda t: (1.0 - t**4) ** 2)


def frac_kernel_constant(d, s):
    """Normalization ``4^s Gamma(d/2 + s) / (pi^{d/2} |Gamma(-s)|)``.

    Evaluated via log-Gamma with ``|Gamma(-s)| = Gamma(1-s)/s`` for
    s in (0, 1).
    """
    if d not in (1, 2):
        raise ValueError("d must be 1 or 2")
    if not (1e-12 < s < 1.0 - 1e-12):
        raise ValueError("order s must lie strictly inside (0, 1)")
    log_c = (
        2 * s * math.log(2.0)
        + gammaln(d / 2.0 + s)
        - (d / 2.0) * math.log(math.pi)
        - (gammaln(1.0 - s) - math.log(s))
    )
    return float(np.exp(log_c))


def power_measure(d, s):
    """Stable jump density ``c_{d,s} |y|^{-d-2s}`` (singular heavy tail)."""
    c = frac_kernel_constant(d, s)

    def density(y):
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore"):
            return c * np.abs(y) ** (-d - 2 * s)

    def density2(dx, dy):
        r2 = np.asarray(dx, dtype=float) ** 2 + np.asarray(dy, dtype=float) ** 2
        with np.errstate(divide="ignore"):
            return c * r2 ** (-(d + 2 * s) / 2.0)

    return LevyMeasure(
        density=density,
        kind="singular_heavy_tail",
        symmetric=True,
        density2=density2 if d == 2 else None,
    )


@dataclass
class FracConfig:
    """Parameters of the singular evaluator.

    ``s`` is the (constant) fractional order; ``h`` the grid spacing;
    the operator is evaluated on ``[-L, L]`` (L = 0 for a single point)
    from samples of u on the padded grid ``[-L - L_W, L + L_W]``.
    ``far_field(x)`` supplies the outer integral of ``u(x+y) nu(y)``
    (identically zero when omitted, the compactly-supported case);
    ``tail_mass`` is the measure of ``|y| > L_W`` (computed for the power
    density when omitted). ``nu`` defaults to the power density of
    order s.
    """

    s: float
    h: float
    L: float
    L_W: float
    rho_r: float = 0.2
    far_field: object = None
    tail_mass: float | None = None
    nu: LevyMeasure | None = None
    dim: int = 1

    def __post_init__(self):
        if not (0 < self.rho_r < self.L_W):
            raise ValueError("need 0 < rho_r < L_W")
        if not (1e-12 < self.s < 1 - 1e-12):
            raise ValueError("order s must lie strictly inside (0, 1)")
        if self.nu is None:
            self.nu = power_measure(self.dim, self.s)
        for name, val in (("L", self.L), ("L_W", self.L_W)):
            k = val / self.h
            if abs(k - round(k)) > 1e-9:
                raise ValueError(f"{name} must be an integer multiple of h")

    @property
    def n_window(self):
        return int(round(self.L_W / self.h))

    @property
    def n_main(self):
        return int(round(self.L / self.h))

    @property
    def window(self):
        return quartic_window(self.rho_r)


@dataclass
class FracStencil:
    """Row-affine form of the evaluator: ``(op u)_i = W[i] @ u + f[i]``.

    Columns run over the main grid (u is taken as zero outside it); the
    weights beyond the local correction band are plain trapezoid kernel
    values.
    """

    weights: np.ndarray
    offset: np.ndarray
    x: np.ndarray


# ---------------------------------------------------------------------------
# moments and tails
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _gl_panel(f, a, b):
    mid, rad = 0.5 * (a + b), 0.5 * (b - a)
    return rad * float(f(mid + rad * _GL_NODES) @ _GL_WEIGHTS)


def _graded_moment(f, radius, rel_tol=1e-12, max_levels=60):
    """Integral of f over dyadically graded panels [radius 2^-k-1, radius 2^-k].

    For an integrand that is asymptotically a pure power at 0 the panel
    contributions become exactly geometric, so the uncovered remainder is
    completed by geometric extrapolation; iteration stops once the
    completed value is converged to ``rel_tol``.
    """
    total = 0.0
    hi = radius
    prev_part = None
    prev_val = None
    for _ in range(max_levels):
        lo = hi / 2.0
        part = _gl_panel(f, lo, hi)
        total += part
        val = total
        if prev_part is not None and 0 < abs(part) < abs(prev_part):
            q = part / prev_part
            if 0 < q < 1:
                val = total + part * q / (1.0 - q)
        if abs(part) < rel_tol * max(abs(val), 1e-300):
            return val
        if prev_val is not None and abs(val - prev_val) <= rel_tol * max(abs(val), 1e-300):
            return val
        prev_part, prev_val = part, val
        hi = lo
    raise RuntimeError("graded quadrature did not converge within 60 levels")


def windowed_second_moment(nu, window, rel_tol=1e-12):
    """``integral of rho(y) nu(y) y^2`` over the window support (1D)."""

    def upper(y):
        return window(y) * nu.density(y) * y * y

    def lower(y):
        return window(-y) * nu.density(-y) * y * y

    return _graded_moment(upper, window.radius, rel_tol) + _graded_moment(
        lower, window.radius, rel_tol
    )


def windowed_second_moment_radial_2d(nu_radial, window, rel_tol=1e-12):
    """``integral of rho(|y|) nu(|y|) y_1^2 dy`` for a radial 2D density.

    In polar form this is ``pi * integral_0^r rho nu r^3 dr``.
    """

    def f(r):
        return math.pi * window(r) * nu_radial(r) * r**3

    return _graded_moment(f, window.radius, rel_tol)


def tail_mass_power_1d(s, L_W):
    """``integral over |y| > L_W`` of the 1D power density of order s."""
    return frac_kernel_constant(1, s) * L_W ** (-2 * s) / s


def tail_mass_square_2d(s, L_W, n_quad=64):
    """Mass of the 2D power density outside the square ``[-L_W, L_W]^2``.

    By symmetry: ``8 * integral_0^{pi/4}`` of the radial tail beyond
    ``L_W / cos(phi)``.
    """
    c = frac_kernel_constant(2, s)
    x, w = np.polynomial.legendre.leggauss(n_quad)
    phi = (x + 1.0) * (math.pi / 8.0)
    r0 = L_W / np.cos(phi)
    inner = c * r0 ** (-2 * s) / (2 * s)
    return float(8.0 * (math.pi / 8.0) * (inner @ w))


# ---------------------------------------------------------------------------
# pointwise evaluation (1D)
# ---------------------------------------------------------------------------


def _window_sums_1d(cfg):
    """Trapezoid sums over the window offsets (j = 0 excluded)."""
    M = cfg.n_window
    j = np.arange(-M, M + 1)
    y = j * cfg.h
    nu_j = cfg.nu.density(y)
    nu_j[M] = 0.0
    w = np.full(j.shape, cfg.h)
    w[0] = w[-1] = cfg.h / 2.0
    rho_j = cfg.window(y)
    kern = nu_j * w
    return {
        "kern": kern,
        "S0": float(kern.sum()),
        "Sg": float((rho_j * y * kern).sum()),
        "Sd": float((rho_j * y * y * kern).sum()),
    }


def eval_i1(u, p, cfg, sums=None):
    """Near-field compensated trapezoid sum at padded index p.

    ``u`` holds samples on the padded grid; ``p`` must leave a full
    window ``[p - M, p + M]`` plus the difference stencil inside.
    """
    if cfg.rho_r >= cfg.L_W:
        raise ValueError("window radius must be smaller than L_W")
    sums = sums or _window_sums_1d(cfg)
    M = cfg.n_window
    h = cfg.h
    seg = u[p - M : p + M + 1]
    d1 = (u[p + 1] - u[p - 1]) / (2 * h)
    d2 = (u[p + 1] + u[p - 1] - 2 * u[p]) / (2 * h * h)
    return float(seg @ sums["kern"] - u[p] * sums["S0"] - d1 * sums["Sg"] - d2 * sums["Sd"])


def eval_i2(u_x, x, cfg):
    """Far-field term ``f_x - u(x) * tail_mass``."""
    f = cfg.far_field(x) if cfg.far_field is not None else 0.0
    tail = cfg.tail_mass if cfg.tail_mass is not None else tail_mass_power_1d(cfg.s, cfg.L_W)
    return float(f - u_x * tail)


def eval_i3(u, p, cfg, moment=None):
    """Windowed diffusion term via the central second difference."""
    if moment is None:
        moment = windowed_second_moment(cfg.nu, cfg.window)
    d2 = (u[p + 1] + u[p - 1] - 2 * u[p]) / (2 * cfg.h**2)
    return float(d2 * moment)


def frac_apply_1d(u, cfg):
    """Apply the generator on the main grid ``[-L, L]``.

    ``u`` has ``2 (n_main + n_window) + 1`` samples on the padded grid.
    Returns the values at the ``2 n_main + 1`` main-grid points.
    """
    u = np.asarray(u, dtype=float)
    M, K = cfg.n_window, cfg.n_main
    if u.shape[0] != 2 * (M + K) + 1:
        raise ValueError("u must be sampled on the padded grid")
    sums = _window_sums_1d(cfg)
    h = cfg.h
    conv = np.correlate(u, sums["kern"], mode="valid")
    uc = u[M : M + 2 * K + 1]
    ue = u[M + 1 : M + 2 * K + 2]
    uw = u[M - 1 : M + 2 * K]
    d1 = (ue - uw) / (2 * h)
    d2 = (ue + uw - 2 * uc) / (2 * h * h)
    i1 = conv - uc * sums["S0"] - d1 * sums["Sg"] - d2 * sums["Sd"]
    x = h * np.arange(-K, K + 1)
    far = cfg.far_field(x) if cfg.far_field is not None else 0.0
    tail = cfg.tail_mass if cfg.tail_mass is not None else tail_mass_power_1d(cfg.s, cfg.L_W)
    m2 = windowed_second_moment(cfg.nu, cfg.window)
    return i1 + far - uc * tail + d2 * m2


def frac_stencil_1d(cfg):
    """Affine row form of :func:`frac_apply_1d` on the main grid.

    u is taken to vanish outside ``[-L, L]`` (and the far field supplies
    whatever lives beyond the window), so the weight matrix has columns
    over the main grid only.
    """
    M, K = cfg.n_window, cfg.n_main
    n = 2 * K + 1
    sums = _window_sums_1d(cfg)
    h = cfg.h
    m2 = windowed_second_moment(cfg.nu, cfg.window)
    tail = cfg.tail_mass if cfg.tail_mass is not None else tail_mass_power_1d(cfg.s, cfg.L_W)
    W = np.zeros((n, n))
    kern = sums["kern"]
    for off in range(-min(n - 1, M), min(n - 1, M) + 1):
        if off == 0:
            continue
        val = kern[off + M]
        idx = np.arange(max(0, -off), min(n, n - off))
        W[idx, idx + off] += val
    idx = np.arange(n)
    W[idx, idx] += -sums["S0"] - tail - (m2 - sums["Sd"]) / h**2
    c_side = (m2 - sums["Sd"]) / (2 * h**2)
    W[idx[:-1], idx[:-1] + 1] += c_side - sums["Sg"] / (2 * h)
    W[idx[1:], idx[1:] - 1] += c_side + sums["Sg"] / (2 * h)
    x = h * np.arange(-K, K + 1)
    f = cfg.far_field(x) if cfg.far_field is not None else np.zeros(n)
    return FracStencil(weights=W, offset=np.asarray(f, dtype=float), x=x)


def assemble_fractional_poisson_1d(s, n, L=1.0, L_W=2.0, rho_r=0.2):
    """Dirichlet problem ``(-Delta)^s u = f`` on [-L, L], u = 0 outside.

    The grid is ``x_k = k h`` with ``h = L / n`` (2n+1 nodes on [-L, L]);
    unknowns are the interior nodes. Returns the (symmetric) stiffness
    matrix ``A = -W`` restricted to the interior and the interior node
    coordinates.
    """
    h = L / n
    cfg = FracConfig(s=s, h=h, L=L, L_W=L_W, rho_r=rho_r)
    st = frac_stencil_1d(cfg)
    A = -st.weights[1:-1, 1:-1]
    return A, st.x[1:-1]


# ---------------------------------------------------------------------------
# 2D evaluation
# ---------------------------------------------------------------------------


def _window_sums_2d(cfg):
    M = cfg.n_window
    j = np.arange(-M, M + 1)
    JX, JY = np.meshgrid(j * cfg.h, j * cfg.h, indexing="ij")
    nu_l = cfg.nu.density2(JX, JY)
    nu_l[M, M] = 0.0
    w1 = np.full(j.shape, cfg.h)
    w1[0] = w1[-1] = cfg.h / 2.0
    w2 = np.outer(w1, w1)
    rho_l = cfg.window(np.hypot(JX, JY))
    kern = nu_l * w2
    return {
        "kern": kern,
        "S0": float(kern.sum()),
        "Sgx": float((rho_l * JX * kern).sum()),
        "Sgy": float((rho_l * JY * kern).sum()),
        "Sdxx": float((rho_l * JX * JX * kern).sum()),
        "Sdyy": float((rho_l * JY * JY * kern).sum()),
        "Sdxy": float((rho_l * JX * JY * kern).sum()),
    }


def frac_apply_2d(u, cfg):
    """Apply the generator on the main grid ``[-L, L]^2``.

    ``u`` is indexed ``u[kx, ky] = u(kx h, ky h)`` on the padded grid
    ``[-L - L_W, L + L_W]^2`` (square near-field window). Radial density
    assumed for the windowed diffusion moment.
    """
    u = np.asarray(u, dtype=float)
    M, K = cfg.n_window, cfg.n_main
    side = 2 * (M + K) + 1
    if u.shape != (side, side):
        raise ValueError("u must be sampled on the padded 2D grid")
    sums = _window_sums_2d(cfg)
    h = cfg.h
    conv = fftconvolve(u, sums["kern"][::-1, ::-1], mode="valid")
    sl = slice(M, M + 2 * K + 1)
    sle = slice(M + 1, M + 2 * K + 2)
    slw = slice(M - 1, M + 2 * K)
    uc = u[sl, sl]
    ux = (u[sle, sl] - u[slw, sl]) / (2 * h)
    uy = (u[sl, sle] - u[sl, slw]) / (2 * h)
    uxx = (u[sle, sl] + u[slw, sl] - 2 * uc) / h**2
    uyy = (u[sl, sle] + u[sl, slw] - 2 * uc) / h**2
    uxy = (u[sle, sle] + u[slw, slw] - u[sle, slw] - u[slw, sle]) / (4 * h**2)
    i1 = (
        conv
        - uc * sums["S0"]
        - ux * sums["Sgx"]
        - uy * sums["Sgy"]
        - 0.5 * uxx * sums["Sdxx"]
        - 0.5 * uyy * sums["Sdyy"]
        - uxy * sums["Sdxy"]
    )
    if cfg.tail_mass is not None:
        tail = cfg.tail_mass
    else:
        tail = tail_mass_square_2d(cfg.s, cfg.L_W)
    m2 = windowed_second_moment_radial_2d(lambda r: cfg.nu.density2(r, 0.0), cfg.window)
    far = 0.0
    if cfg.far_field is not None:
        xs = h * np.arange(-K, K + 1)
        far = cfg.far_field(xs[:, None], xs[None, :])
    return i1 + far - uc * tail + 0.5 * (uxx + uyy) * m2


# ---------------------------------------------------------------------------
# variable-order L-shape assembly
# ---------------------------------------------------------------------------

_LSHAPE_SEGMENTS = [
    ((-1.0, -1.0), (1.0, -1.0)),
    ((1.0, -1.0), (1.0, 0.0)),
    ((1.0, 0.0), (0.0, 0.0)),
    ((0.0, 0.0), (0.0, 1.0)),
    ((0.0, 1.0), (-1.0, 1.0)),
    ((-1.0, 1.0), (-1.0, -1.0)),
]


def lshape_grid(n):
    """Cell-centered grid on ``[-1,1]^2`` minus the cutout ``[0,1]^2``.

    ``n`` cells per dimension (even); keeps ``3 n^2 / 4`` points. Returns
    (points, integer cell coordinates).
    """
    if n % 2:
        raise ValueError("n must be even for the L-shape grid")
    h = 2.0 / n
    idx = np.arange(n)
    GX, GY = np.meshgrid(idx, idx, indexing="ij")
    gx, gy = GX.ravel(), GY.ravel()
    x = -1.0 + (gx + 0.5) * h
    y = -1.0 + (gy + 0.5) * h
    keep = ~((x > 0) & (y > 0))
    return np.column_stack([x[keep], y[keep]]), np.column_stack([gx[keep], gy[keep]])


def lshape_boundary_distance(pts):
    """Distance from points to the boundary of the L-shaped domain."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    best = np.full(pts.shape[0], np.inf)
    for p, q in _LSHAPE_SEGMENTS:
        p = np.asarray(p)
        d = np.asarray(q) - p
        t = np.clip(((pts - p) @ d) / (d @ d), 0.0, 1.0)
        proj = p + t[:, None] * d
        best = np.minimum(best, np.linalg.norm(pts - proj, axis=1))
    return best


def variable_order_field(pts):
    """Order field ``s(x) = 0.9 - 0.8 d(x)`` on the L-shape."""
    return 0.9 - 0.8 * lshape_boundary_distance(pts)


def three_bump_source(pts):
    """Sum of three Gaussian bumps at (-.5,.5), (.5,-.5), (-.5,-.5)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    out = np.zeros(pts.shape[0])
    for cx, cy in ((-0.5, 0.5), (0.5, -0.5), (-0.5, -0.5)):
        out += np.exp(-10.0 * ((pts[:, 0] - cx) ** 2 + (pts[:, 1] - cy) ** 2))
    return out


def assemble_variable_order(n, s_field=None, f_field=None, L_W=2.0, rho_r=0.2, threads=None):
    """Variable-order stiffness matrix and source on the L-shape.

    Row i discretizes the generator of order ``s(x_i)`` with constant
    ``c_{2, s(x_i)}``; u vanishes outside the domain. Rows are
    independent and are assembled in parallel. Returns ``(A, b, pts)``
    with the linear system ``A u = b`` for the source problem
    ``-(-Delta)^{s(x)} u = f``.
    """
    pts, cells = lshape_grid(n)
    m = pts.shape[0]
    h = 2.0 / n
    s = (s_field or variable_order_field)(pts)
    if np.any((s <= 0) | (s >= 1)):
        raise ValueError("order field must map into (0, 1)")
    b = (f_field or three_bump_source)(pts)
    window = quartic_window(rho_r)

    Mw = int(round(L_W / h))
    off = np.arange(-Mw, Mw + 1)
    DX, DY = np.meshgrid(off * h, off * h, indexing="ij")
    R2 = DX * DX + DY * DY
    center = (Mw, Mw)
    R2[center] = 1.0  # dummy, slot excluded below
    logR2 = np.log(R2)
    w1 = np.full(off.shape, h)
    w1[0] = w1[-1] = h / 2.0
    w2 = np.outer(w1, w1)
    rho_l = window(np.sqrt(R2))
    ax, ay = rho_l * DX, rho_l * DY
    axx, ayy, axy = rho_l * DX * DX, rho_l * DY * DY, rho_l * DX * DY

    table = -np.ones((n, n), dtype=np.intp)
    table[cells[:, 0], cells[:, 1]] = np.arange(m)

    A = np.zeros((m, m))

    def do_row(i):
        si = s[i]
        ci = frac_kernel_constant(2, si)
        k = ci * np.exp(-(1.0 + si) * logR2)
        k[center] = 0.0
        kw = k * w2
        S0 = kw.sum()
        sgx, sgy = (ax * kw).sum(), (ay * kw).sum()
        sdxx, sdyy, sdxy = (axx * kw).sum(), (ayy * kw).sum(), (axy * kw).sum()
        m2 = windowed_second_moment_radial_2d(
            lambda r: ci * r ** (-2.0 - 2.0 * si), window
        )
        tail = tail_mass_square_2d(si, L_W)

        gx, gy = cells[i]
        x0, x1 = max(0, gx - Mw), min(n, gx + Mw + 1)
        y0, y1 = max(0, gy - Mw), min(n, gy + Mw + 1)
        cols = table[x0:x1, y0:y1].ravel()
        vals = (k[x0 - gx + Mw : x1 - gx + Mw, y0 - gy + Mw : y1 - gy + Mw] * h * h).ravel()
        ok = cols >= 0
        A[i, cols[ok]] = vals[ok]

        def add(dx, dy, val):
            cx, cy = gx + dx, gy + dy
            if 0 <= cx < n and 0 <= cy < n and table[cx, cy] >= 0:
                A[i, table[cx, cy]] += val

        cxx = 0.5 * (m2 - sdxx) / h**2
        cyy = 0.5 * (m2 - sdyy) / h**2
        add(0, 0, -S0 - tail - 2 * cxx - 2 * cyy)
        add(1, 0, cxx - sgx / (2 * h))
        add(-1, 0, cxx + sgx / (2 * h))
        add(0, 1, cyy - sgy / (2 * h))
        add(0, -1, cyy + sgy / (2 * h))
        cxy = -sdxy / (4 * h**2)
        add(1, 1, cxy)
        add(-1, -1, cxy)
        add(1, -1, -cxy)
        add(-1, 1, -cxy)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(do_row, range(m)))
    else:
        for i in range(m):
            do_row(i)
    return A, b, pts


def write_field_csv(path, points, values, meta=()):
    """Dump a scalar field as CSV rows (x, y, value)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    values = np.asarray(values, dtype=float).ravel()
    with open(path, "w", newline="") as fh:
        for line in meta:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "y", "value"])
        for p, v in zip(points, values):
            writer.writerow([*(f"{c:.17g}" for c in p), f"{v:.17g}"])
