"""Reproduction harness: ``levyh bench|levy1d|levy2d|frac``.

Each subcommand runs one family of experiments (complexity benchmarks,
1D/2D convergence studies of the jump-diffusion model, fractional
evaluations and the variable-order L-shape problem), prints a short
summary with fitted log-log slopes, and emits a CSV artifact: ``#``
metadata lines, a header row whose column names carry the units, then the
data rows. Expensive reference solutions are cached on disk keyed by a
hash of the configuration.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import json
import math
import os
import subprocess
import sys
import time

import numpy as np
import scipy.linalg as sla
from scipy.special import gamma as _gamma

from . import fractional as frac
from .geometry import build_cluster_tree
from .hmatrix import HConfig, build_from_dense, memory_report
from .hops import hlu, matvec, solve
from .levy import UniformGrid1D, UniformGrid2D, assemble_cn_1d, assemble_cn_2d, gaussian_measure, run_cn
from .solvers import gmres_restarted, pcg

__all__ = [
    "main",
    "bench_point",
    "levy1d_temporal_study",
    "levy1d_spatial_study",
    "levy2d_temporal_study",
    "levy2d_spatial_study",
    "frac_eval_study",
    "frac_poisson1d_study",
    "frac_ball2d_study",
    "frac_lshape_study",
    "fit_loglog_slope",
    "write_csv",
]


# ---------------------------------------------------------------------------
# harness utilities
# ---------------------------------------------------------------------------


def _git_hash():
    try:
        out = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            capture_output=True, text=True, timeout=5,
            cwd=os.path.dirname(os.path.abspath(__file__)),
        )
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def write_csv(path, header, rows, meta=()):
    """CSV with ``#`` metadata lines, a header row and LF endings."""
    fh = open(path, "w", newline="", encoding="utf-8") if path else sys.stdout
    try:
        for line in meta:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])
    finally:
        if path:
            fh.close()


def _meta(args, extra=()):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    return [
        f"date: {datetime.datetime.now().isoformat(timespec='seconds')}",
        f"git: {_git_hash()}",
        f"config: {json.dumps(cfg, default=str)}",
        *extra,
    ]


def median_time(fn, repeat=3, warmup=1):
    """Median wall time of ``fn()`` over ``repeat`` runs after warmup."""
    result = None
    for _ in range(warmup):
        result = fn()
    times = []
    for _ in range(max(1, repeat)):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times)), result


def fit_loglog_slope(xs, ys):
    """Least-squares slope of log(y) against log(x)."""
    xs = np.log(np.asarray(xs, dtype=float))
    ys = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(xs, ys, 1)[0])


def fit_order(params, errors):
    """Convergence order: -slope of log error against log parameter."""
    return -fit_loglog_slope(params, errors)


def _cache_load(cache_dir, key):
    if not cache_dir:
        return None
    path = os.path.join(cache_dir, hashlib.sha256(key.encode()).hexdigest()[:24] + ".npy")
    if os.path.exists(path):
        return np.load(path)
    return None


def _cache_store(cache_dir, key, arr):
    if not cache_dir:
        return
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, hashlib.sha256(key.encode()).hexdigest()[:24] + ".npy")
    np.save(path, arr)


def _hconfig(args=None, **over):
    base = dict(n_min=64, n_block=4, eta=1.0, fixed_rank=10, eps1=1e-4)
    if args is not None:
        base.update(
            n_min=args.leaf_size, n_block=args.nblock, eta=args.eta,
            fixed_rank=args.rank, eps1=args.eps1,
        )
    base.update(over)
    return HConfig(**base)


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


def _dense_cap_check(n, max_dense_gb):
    need = 8.0 * n * n / 1024**3
    if need > max_dense_gb:
        raise MemoryError(
            f"dense mode refused for N={n}: {need:.1f} GiB exceeds the "
            f"{max_dense_gb:.1f} GiB cap (raise --max-dense-gb to override)"
        )


def bench_point(kind, n, mode, cfg, eps2=1e-10, repeat=3, warmup=1, max_dense_gb=4.0, rng=None):
    """Timings (and storage) of one benchmark point.

    Returns a dict with keys among ``hmatrix_seconds``, ``dense_seconds``
    and ``stored_scalars``. The system is the 1D Gaussian-jump CN matrix
    ``A_plus``.
    """
    rng = rng or np.random.default_rng(0)
    nu = gaussian_measure(5.0)
    grid = UniformGrid1D(n)
    system = assemble_cn_1d(nu, 0.0, 0.0, 0.0, grid, dt=0.01)
    row = {"n": n, "kind": kind}
    do_h = mode in ("hmatrix", "both")
    do_d = mode in ("dense", "both")
    if do_d:
        _dense_cap_check(n, max_dense_gb)

    if kind == "construct":
        if do_h:
            row["hmatrix_seconds"], H = median_time(lambda: system.hmatrix("plus", cfg), repeat, warmup)
            row["stored_scalars"] = memory_report(H)["stored_scalars"]
        if do_d:
            idx = np.arange(n)
            row["dense_seconds"], _ = median_time(lambda: system.entries(idx, idx, "plus"), repeat, warmup)
            row["dense_scalars"] = n * n
        return row

    x = rng.standard_normal(n)
    if kind == "matvec":
        if do_h:
            H = system.hmatrix("plus", cfg)
            row["stored_scalars"] = memory_report(H)["stored_scalars"]
            row["hmatrix_seconds"], _ = median_time(lambda: matvec(H, x), repeat, warmup)
        if do_d:
            A = system.dense_matrix("plus")
            row["dense_seconds"], _ = median_time(lambda: A @ x, repeat, warmup)
        return row

    if kind == "lu":
        if do_h:
            builds = [system.hmatrix("plus", cfg) for _ in range(repeat + warmup)]
            times = []
            for H in builds:  # hlu consumes its input, so time fresh builds
                t0 = time.perf_counter()
                hlu(H, eps2)
                times.append(time.perf_counter() - t0)
            row["hmatrix_seconds"] = float(np.median(times[warmup:]))
        if do_d:
            A = system.dense_matrix("plus")
            row["dense_seconds"], _ = median_time(lambda: sla.lu_factor(A), repeat, warmup)
        return row

    if kind == "solve":
        if do_h:
            F = hlu(system.hmatrix("plus", cfg), eps2)
            row["hmatrix_seconds"], _ = median_time(lambda: solve(F, x), repeat, warmup)
        if do_d:
            lu = sla.lu_factor(system.dense_matrix("plus"))
            row["dense_seconds"], _ = median_time(lambda: sla.lu_solve(lu, x), repeat, warmup)
        return row

    raise ValueError(f"unknown bench kind {kind!r}")


def cmd_bench(args):
    sizes = [int(s) for s in args.sizes.split(",")]
    cfg = _hconfig(args)
    rows = []
    for n in sizes:
        row = bench_point(args.kind, n, args.mode, cfg, args.eps2,
                          repeat=args.repeat, warmup=args.warmup,
                          max_dense_gb=args.max_dense_gb)
        rows.append(row)
        print(f"N={n}: " + "  ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}"
                                     for k, v in row.items() if k not in ("n", "kind")))
    extra = []
    for col in ("hmatrix_seconds", "dense_seconds", "stored_scalars"):
        pts = [(r["n"], r[col]) for r in rows if col in r and r[col] > 0]
        if len(pts) >= 2:
            slope = fit_loglog_slope(*zip(*pts))
            extra.append(f"slope_{col}: {slope:.3f}")
            print(f"log-log slope of {col}: {slope:.3f}")
    if args.kind == "lu" and args.mode == "both":
        cross = [r["n"] for r in rows if r.get("hmatrix_seconds", np.inf) < r.get("dense_seconds", -np.inf)]
        msg = f"H-LU vs dense-LU crossover at N={min(cross)}" if cross else "no crossover in the sampled sizes"
        extra.append(msg)
        print(msg)
    header = ["n", "kind"] + sorted({k for r in rows for k in r} - {"n", "kind"})
    write_csv(args.out, header, [[r.get(k, "") for k in header] for r in rows],
              _meta(args, extra + ["units: seconds (wall), scalars (count)"]))
    return 0


# ---------------------------------------------------------------------------
# levy convergence studies
# ---------------------------------------------------------------------------


def _initial_1d(grid):
    return np.exp(-50.0 * grid.points**2)


def _initial_2d(grid):
    p = grid.points
    return np.exp(-50.0 * (p[:, 0] ** 2 + p[:, 1] ** 2))


def levy1d_temporal_study(n=1024, nts=(10, 20, 30, 40, 50), ref_nt=100, cfg=None, eps2=1e-10):
    """Error at t=1 versus the time step count, fixed grid.

    The reference marches ``ref_nt`` steps with the dense operators.
    Returns rows ``(nt, max_abs_error)``.
    """
    cfg = cfg or _hconfig()
    nu = gaussian_measure(5.0)
    grid = UniformGrid1D(n)
    u0 = _initial_1d(grid)
    ref = run_cn(assemble_cn_1d(nu, 0, 0, 0, grid, 1.0 / ref_nt), u0, ref_nt, mode="dense")
    rows = []
    for nt in nts:
        u = run_cn(assemble_cn_1d(nu, 0, 0, 0, grid, 1.0 / nt), u0, nt, cfg, eps2)
        rows.append((nt, float(np.abs(u - ref).max())))
    return rows


def levy1d_spatial_study(ns=(256, 512, 1024, 2048, 4096), ref_n=16384, nt=100,
                         cfg=None, eps2=1e-10, cache_dir=None):
    """Error at t=1 versus grid size, fixed time step count.

    The reference is computed once on the ``ref_n`` grid (H-matrix path)
    and restricted to each coarser grid. Returns rows ``(n, error)``.
    """
    cfg = cfg or _hconfig()
    nu = gaussian_measure(5.0)
    key = f"levy1d_ref n={ref_n} nt={nt} rank={cfg.fixed_rank} nb={cfg.n_block} eps2={eps2}"
    ref = _cache_load(cache_dir, key)
    if ref is None:
        rgrid = UniformGrid1D(ref_n)
        ref = run_cn(assemble_cn_1d(nu, 0, 0, 0, rgrid, 1.0 / nt), _initial_1d(rgrid), nt, cfg, eps2)
        _cache_store(cache_dir, key, ref)
    rows = []
    for n in ns:
        grid = UniformGrid1D(n)
        u = run_cn(assemble_cn_1d(nu, 0, 0, 0, grid, 1.0 / nt), _initial_1d(grid), nt, cfg, eps2)
        stride = ref_n // n
        rows.append((n, float(np.abs(u - ref[::stride]).max())))
    return rows


def levy2d_temporal_study(nx=32, nts=(10, 15, 20, 25, 30), ref_nt=100, cfg=None, eps2=1e-10):
    """2D analog of the temporal study on an ``nx`` x ``nx`` grid."""
    cfg = cfg or _hconfig()
    nu = gaussian_measure(5.0)
    grid = UniformGrid2D(nx, nx)
    u0 = _initial_2d(grid)
    ref = run_cn(assemble_cn_2d(nu, 0, 0, 0, grid, 1.0 / ref_nt), u0, ref_nt, mode="dense")
    rows = []
    for nt in nts:
        u = run_cn(assemble_cn_2d(nu, 0, 0, 0, grid, 1.0 / nt), u0, nt, cfg, eps2)
        rows.append((nt, float(np.abs(u - ref).max())))
    return rows


def levy2d_spatial_study(nxs=(16, 32, 64), ref_nx=128, nt=20, cfg=None, eps2=1e-10, cache_dir=None):
    """2D spatial study; reference on the ``ref_nx`` grid, H-matrix path."""
    cfg = cfg or _hconfig()
    nu = gaussian_measure(5.0)
    key = f"levy2d_ref nx={ref_nx} nt={nt} rank={cfg.fixed_rank} nb={cfg.n_block} eps2={eps2}"
    ref = _cache_load(cache_dir, key)
    if ref is None:
        rgrid = UniformGrid2D(ref_nx, ref_nx)
        ref = run_cn(assemble_cn_2d(nu, 0, 0, 0, rgrid, 1.0 / nt), _initial_2d(rgrid), nt, cfg, eps2)
        _cache_store(cache_dir, key, ref)
    ref2 = ref.reshape(ref_nx, ref_nx)
    rows = []
    for nx in nxs:
        grid = UniformGrid2D(nx, nx)
        u = run_cn(assemble_cn_2d(nu, 0, 0, 0, grid, 1.0 / nt), _initial_2d(grid), nt, cfg, eps2)
        stride = ref_nx // nx
        rows.append((nx * nx, float(np.abs(u.reshape(nx, nx) - ref2[::stride, ::stride]).max())))
    return rows


def cmd_levy1d(args):
    cfg = _hconfig(args)
    if args.sweep == "time":
        rows = levy1d_temporal_study(args.n, ref_nt=args.ref_nt, cfg=cfg, eps2=args.eps2)
        header = ["nt_steps", "error_max_abs"]
    else:
        ns = [int(s) for s in args.sizes.split(",")] if args.sizes else (256, 512, 1024, 2048, 4096)
        rows = levy1d_spatial_study(ns, ref_n=args.ref_n, nt=args.nt, cfg=cfg,
                                    eps2=args.eps2, cache_dir=args.cache_dir)
        header = ["n_points", "error_max_abs"]
    order = fit_order(*zip(*rows))
    for p, e in rows:
        print(f"{header[0]}={p}: error={e:.4e}")
    print(f"fitted convergence order: {order:.3f}")
    write_csv(args.out, header, rows, _meta(args, [f"fitted_order: {order:.4f}",
                                                   "units: error in max norm (dimensionless)"]))
    return 0


def cmd_levy2d(args):
    cfg = _hconfig(args)
    if args.sweep == "time":
        rows = levy2d_temporal_study(args.n, ref_nt=args.ref_nt, cfg=cfg, eps2=args.eps2)
        header = ["nt_steps", "error_max_abs"]
    else:
        nxs = [int(s) for s in args.sizes.split(",")] if args.sizes else (16, 32, 64)
        rows = levy2d_spatial_study(nxs, ref_nx=args.ref_n, nt=args.nt, cfg=cfg,
                                    eps2=args.eps2, cache_dir=args.cache_dir)
        header = ["n_points", "error_max_abs"]
    order = fit_order(*zip(*rows))
    for p, e in rows:
        print(f"{header[0]}={p}: error={e:.4e}")
    print(f"fitted convergence order: {order:.3f}")
    write_csv(args.out, header, rows, _meta(args, [f"fitted_order: {order:.4f}",
                                                   "units: error in max norm (dimensionless)"]))
    return 0


# ---------------------------------------------------------------------------
# fractional studies
# ---------------------------------------------------------------------------


def gaussian_frac_exact(s):
    """Closed form of the fractional derivative of exp(-x^2) at x = 0."""
    return 2.0**(2 * s) * _gamma((1 + 2 * s) / 2.0) / math.sqrt(math.pi)


def frac_eval_study(s=0.5, hs=(1 / 64, 1 / 128, 1 / 256, 1 / 512), L_W=5.0, rho_r=0.2):
    """Pointwise error at x=0 for u = exp(-x^2); rows ``(1/h, error)``."""
    exact = gaussian_frac_exact(s)
    rows = []
    for h in hs:
        cfg = frac.FracConfig(s=s, h=h, L=0.0, L_W=L_W, rho_r=rho_r)
        x = h * np.arange(-cfg.n_window, cfg.n_window + 1)
        val = -frac_apply_center(np.exp(-(x**2)), cfg)
        rows.append((1.0 / h, abs(val - exact)))
    return rows


def frac_apply_center(u, cfg):
    return float(frac.frac_apply_1d(u, cfg)[cfg.n_main])


def frac_poisson1d_study(ns=(32, 64, 128), ref_mult=8, s=0.5, L_W=2.0, rho_r=0.2, tol=1e-12):
    """Fractional Dirichlet problem on [-1, 1] with unit source.

    Each grid is solved by CG on the dense operator; the reference is a
    dense-LU solve at ``h_min / ref_mult``. Rows ``(1/h, error)``.
    """
    n_ref = max(ns) * ref_mult
    A_ref, x_ref = frac.assemble_fractional_poisson_1d(s, n_ref, L_W=L_W, rho_r=rho_r)
    u_ref = np.linalg.solve(A_ref, np.ones_like(x_ref))
    rows = []
    for n in ns:
        A, x = frac.assemble_fractional_poisson_1d(s, n, L_W=L_W, rho_r=rho_r)
        u, log = pcg(A, None, np.ones_like(x), tol=tol, max_iter=10 * A.shape[0])
        stride = n_ref // n
        uref_c = u_ref[stride - 1 :: stride][: u.shape[0]]
        rows.append((float(n), float(np.abs(u - uref_c).max())))
    return rows


def frac_ball2d_study(h=1 / 32, s=0.5, L=1.0, L_W=2.0, rho_r=0.2):
    """Apply the generator to the 2D ball profile; returns (error map, center error)."""
    cfg = frac.FracConfig(s=s, h=h, L=L, L_W=L_W, rho_r=rho_r, dim=2)
    M, K = cfg.n_window, cfg.n_main
    xs = h * np.arange(-(M + K), M + K + 1)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    R2 = X**2 + Y**2
    u = np.where(R2 < 1, np.maximum(1 - R2, 0.0) ** s, 0.0) / (2.0**(2 * s) * _gamma(1 + s) ** 2)
    out = -frac.frac_apply_2d(u, cfg)
    err = np.abs(out - 1.0)
    return err, float(err[K, K])


def frac_lshape_study(n, eps1=1e-4, eps2=1e-10, tol=1e-8, max_iter=400, threads=None,
                      leaf_size=64, n_block=4, eta=1.0):
    """Variable-order L-shape solve: H-LU direct vs dense, and Krylov counts.

    Returns a dict with the relative solution error of the H-LU direct
    solve against the dense solve, plus preconditioned/unpreconditioned
    iteration counts at the given tolerance.
    """
    A, b, pts = frac.assemble_variable_order(n, threads=threads)
    u_dense = np.linalg.solve(A, b)

    ct = build_cluster_tree(pts, leaf_size=leaf_size, strategy="kmeans2")
    perm = ct.perm
    A_t = A[np.ix_(perm.inverse, perm.inverse)]
    cfg = HConfig(n_min=leaf_size, n_block=n_block, eta=eta, eps1=eps1)
    H = build_from_dense(A_t, ct, ct, cfg)
    mem = memory_report(H)
    F = hlu(H, eps2)
    u_h = perm.from_tree(solve(F, perm.to_tree(b)))
    rel_err = float(np.linalg.norm(u_h - u_dense) / np.linalg.norm(u_dense))
    direct_res = float(np.linalg.norm(A @ u_h - b) / np.linalg.norm(b))

    b_t = perm.to_tree(b)
    _, log_pre = gmres_restarted(lambda v: A_t @ v, lambda v: solve(F, v), b_t,
                                 tol=tol, restart=50, max_iter=max_iter)
    _, log_raw = gmres_restarted(lambda v: A_t @ v, None, b_t,
                                 tol=tol, restart=50, max_iter=max_iter)
    return {
        "n_points": A.shape[0],
        "rel_error_vs_dense": rel_err,
        "direct_residual": direct_res,
        "iters_preconditioned": log_pre.iterations,
        "iters_unpreconditioned": log_raw.iterations,
        "unpreconditioned_converged": log_raw.converged,
        "stored_scalars": mem["stored_scalars"],
    }


def cmd_frac(args):
    if args.experiment == "eval":
        rows = frac_eval_study(s=args.s, L_W=args.lw if args.lw else 5.0, rho_r=args.rho_r)
        order = fit_order(*zip(*rows))
        for invh, e in rows:
            print(f"1/h={invh:.0f}: error={e:.4e}")
        print(f"fitted convergence rate: {order:.3f}")
        write_csv(args.out, ["inv_h_per_unit", "error_abs"], rows,
                  _meta(args, [f"fitted_order: {order:.4f}"]))
        return 0
    if args.experiment == "poisson1d":
        ns = [int(s) for s in args.sizes.split(",")] if args.sizes else (32, 64, 128)
        rows = frac_poisson1d_study(ns, s=args.s)
        order = fit_order(*zip(*rows))
        for n, e in rows:
            print(f"n={n:.0f}: error={e:.4e}")
        print(f"fitted convergence order: {order:.3f}")
        write_csv(args.out, ["n_intervals_per_unit", "error_max_abs"], rows,
                  _meta(args, [f"fitted_order: {order:.4f}"]))
        return 0
    if args.experiment == "ball2d":
        err, center = frac_ball2d_study(h=args.h, s=args.s)
        print(f"center error: {center:.4e}; interior max error: {err.max():.4e}")
        K = err.shape[0] // 2
        xs = args.h * np.arange(-K, K + 1)
        X, Y = np.meshgrid(xs, xs, indexing="ij")
        pts = np.column_stack([X.ravel(), Y.ravel()])
        if args.out:
            frac.write_field_csv(args.out, pts, err.ravel(),
                                 meta=[f"center_error: {center:.6e}", "units: absolute error"])
        return 0
    if args.experiment == "lshape":
        ns = [int(s) for s in args.sizes.split(",")] if args.sizes else (30, 40, 60)
        rows = []
        for n in ns:
            r = frac_lshape_study(n, eps1=args.eps1, eps2=args.eps2, threads=args.threads,
                                  leaf_size=args.leaf_size, n_block=args.nblock, eta=args.eta)
            rows.append(r)
            print(f"N={r['n_points']}: rel_error={r['rel_error_vs_dense']:.4e} "
                  f"iters precond={r['iters_preconditioned']} "
                  f"unprecond={r['iters_unpreconditioned']}"
                  f"{'' if r['unpreconditioned_converged'] else ' (not converged)'}")
        header = list(rows[0])
        write_csv(args.out, header, [[r[k] for k in header] for r in rows],
                  _meta(args, ["units: relative errors (dimensionless), iteration counts"]))
        return 0
    raise ValueError(args.experiment)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--eps1", type=float, default=1e-4, help="low-rank truncation threshold")
    p.add_argument("--eps2", type=float, default=1e-10, help="recompression tolerance for H-LU")
    p.add_argument("--eta", type=float, default=1.0, help="admissibility parameter")
    p.add_argument("--rank", type=int, default=10, help="expansion terms per dimension")
    p.add_argument("--leaf-size", type=int, default=64, dest="leaf_size")
    p.add_argument("--nblock", type=int, default=4, help="max block size is N/nblock")
    p.add_argument("--threads", type=int, default=os.cpu_count(), help="assembly threads")
    p.add_argument("--out", type=str, default=None, help="CSV output path (default: stdout)")
    p.add_argument("--cache-dir", type=str, default=".levyh_cache", dest="cache_dir")
    p.add_argument("--seed", type=int, default=0)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="levyh", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="complexity benchmarks: construct|matvec|lu|solve")
    p.add_argument("kind", choices=["construct", "matvec", "lu", "solve"])
    p.add_argument("--sizes", type=str, default="1024,2048,4096,8192,16384")
    p.add_argument("--mode", choices=["hmatrix", "dense", "both"], default="both")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--max-dense-gb", type=float, default=4.0, dest="max_dense_gb")
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("levy1d", help="1D jump-diffusion convergence study")
    p.add_argument("--sweep", choices=["time", "space"], default="time")
    p.add_argument("--n", type=int, default=1024, help="grid points (time sweep)")
    p.add_argument("--nt", type=int, default=100, help="time steps (space sweep)")
    p.add_argument("--ref-nt", type=int, default=100, dest="ref_nt")
    p.add_argument("--ref-n", type=int, default=16384, dest="ref_n")
    p.add_argument("--sizes", type=str, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_levy1d)

    p = sub.add_parser("levy2d", help="2D jump-diffusion convergence study")
    p.add_argument("--sweep", choices=["time", "space"], default="time")
    p.add_argument("--n", type=int, default=32, help="grid points per dim (time sweep)")
    p.add_argument("--nt", type=int, default=20, help="time steps (space sweep)")
    p.add_argument("--ref-nt", type=int, default=100, dest="ref_nt")
    p.add_argument("--ref-n", type=int, default=128, dest="ref_n")
    p.add_argument("--sizes", type=str, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_levy2d)

    p = sub.add_parser("frac", help="singular-measure experiments")
    p.add_argument("experiment", choices=["eval", "poisson1d", "ball2d", "lshape"])
    p.add_argument("--s", type=float, default=0.5, help="fractional order")
    p.add_argument("--h", type=float, default=1 / 32, help="grid spacing (ball2d)")
    p.add_argument("--lw", type=float, default=None, help="near-field half width")
    p.add_argument("--rho-r", type=float, default=0.2, dest="rho_r")
    p.add_argument("--sizes", type=str, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_frac)

    args = parser.parse_args(argv)
    np.random.seed(args.seed)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
