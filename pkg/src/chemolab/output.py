"""CSV/JSON artifact writers.

Floats are written with 17 significant digits so files round-trip exactly;
all acceptance tolerances live in the verifier, not in the files.  Nothing
here writes wall-clock information: identical configs must produce
bit-identical outputs.
"""

import json

import numpy as np

from .grid import RadialGrid, helmholtz_solve

SERIES_COLUMNS = ("t", "dt_used", "mass", "F", "D", "w_identity_residual",
                  "w_growth_margin", "vw_ratio", "sup_u", "sup_v", "min_u")


def fmt(value) -> str:
    if value is None:
        return ""
    return format(float(value), ".17g")


def write_series_csv(path, records):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(SERIES_COLUMNS) + "\n")
        for rec in records:
            row = [fmt(getattr(rec, col)) for col in SERIES_COLUMNS]
            fh.write(",".join(row) + "\n")


def write_snapshot_csv(path, grid: RadialGrid, state):
    w = helmholtz_solve(grid, np.asarray(state.u, dtype=float))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("r,u,v,w\n")
        for i in range(grid.M):
            fh.write(f"{fmt(grid.r_centers[i])},{fmt(state.u[i])},{fmt(state.v[i])},{fmt(w[i])}\n")


def write_meta_json(path, meta: dict):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_sweep_summary(path, axis_name: str, rows):
    """rows: iterables of (value, final_sup_u, F0, status, classify_label, exit_code)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{axis_name},final_sup_u,F0,status,classify,exit_code\n")
        for value, sup_u, f0, status, label, code in rows:
            fh.write(f"{value},{fmt(sup_u)},{fmt(f0)},{status},{label},{code}\n")
