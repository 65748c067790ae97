"""Benchmark the numba and numpy kernel paths side by side.

Usage::

    python -m chemolab.bench [--sizes 128,1024,8192] [--repeats 200]

Times the tridiagonal solve and the flux-divergence kernel on Helmholtz-type
systems, plus a full IMEX step loop under each backend.  The active default
backend is chosen at import time (CHEMOLAB_NO_NUMBA=1 forces numpy); this
module times every available backend regardless of the flag.
"""

import argparse
import json
import math
import time

import numpy as np

from . import kernels
from .grid import build_radial_grid, helmholtz_diagonals
from .motility import exponential_motility
from .stepper import State, step


def _time_call(fn, repeats):
    fn()  # warmup (JIT compilation lands here for the numba path)
    best = math.inf
    for _ in range(3):
        start = time.perf_counter()
        for _ in range(repeats):
            fn()
        best = min(best, (time.perf_counter() - start) / repeats)
    return best


def bench_backend(name, solver, fluxdiv, sizes, repeats):
    rows = []
    spec = exponential_motility()
    for m in sizes:
        g = build_radial_grid(3, 1.0, m)
        rng = np.random.default_rng(42)
        f = rng.random(m)
        lower, diag, upper = helmholtz_diagonals(g)
        inv_vol = 1.0 / g.cell_volumes
        t_solve = _time_call(lambda: solver(lower, diag, upper, f), repeats)
        t_flux = _time_call(lambda: fluxdiv(f, g.flux_areas, inv_vol, g.h), repeats)

        saved = (kernels.solve_tridiag, kernels.flux_divergence)
        kernels.solve_tridiag, kernels.flux_divergence = solver, fluxdiv
        try:
            u = 1.0 + 0.4 * np.cos(math.pi * g.r_centers / g.R)
            v = 1.0 + 0.3 * np.cos(math.pi * g.r_centers / g.R)
            state = State(0.0, u, v)
            t_step = _time_call(lambda: step(g, spec, state, 1e-4), max(1, repeats // 4))
        finally:
            kernels.solve_tridiag, kernels.flux_divergence = saved

        rows.append({"backend": name, "M": m, "tridiag_us": t_solve * 1e6,
                     "fluxdiv_us": t_flux * 1e6, "step_us": t_step * 1e6})
    return rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="kernel backend benchmark")
    parser.add_argument("--sizes", default="128,1024,8192")
    parser.add_argument("--repeats", type=int, default=200)
    parser.add_argument("--json", default=None, help="also write results to this JSON file")
    args = parser.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]

    all_rows = []
    for name, (solver, fluxdiv) in kernels.backends().items():
        all_rows.extend(bench_backend(name, solver, fluxdiv, sizes, args.repeats))

    print(f"active default backend: {kernels.BACKEND}")
    print(f"{'backend':<8} {'M':>6} {'tridiag [us]':>14} {'fluxdiv [us]':>14} {'step [us]':>12}")
    for row in all_rows:
        print(f"{row['backend']:<8} {row['M']:>6} {row['tridiag_us']:>14.2f} "
              f"{row['fluxdiv_us']:>14.2f} {row['step_us']:>12.2f}")

    by_size = {}
    for row in all_rows:
        by_size.setdefault(row["M"], {})[row["backend"]] = row["tridiag_us"]
    for m, pair in sorted(by_size.items()):
        if "numba" in pair and "numpy" in pair:
            print(f"M={m}: numba tridiag speedup x{pair['numpy'] / pair['numba']:.2f}")

    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(all_rows, fh, indent=2)
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
