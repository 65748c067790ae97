"""Render chemolab run artifacts into figures.

This package talks to the simulator only through its documented file
contract: ``series.csv`` (fixed column schema), ``snapshot_*.csv``
(columns r,u,v,w), ``sweep_summary.csv`` and ``meta.json``.  Input headers
are checked against the schema before any plotting; a mismatch aborts with
the offending column named.  Rendering is deterministic and never mutates
its inputs.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

SERIES_COLUMNS = ["t", "dt_used", "mass", "F", "D", "w_identity_residual",
                  "w_growth_margin", "vw_ratio", "sup_u", "sup_v", "min_u"]
SNAPSHOT_COLUMNS = ["r", "u", "v", "w"]
FIGURE_KINDS = ("supnorm_growth", "energy_decay", "profiles", "sweep_energy")

# tolerated per-sample energy uptick, mirroring the simulator's gate
ENERGY_EPS = 1e-6


class SchemaError(ValueError):
    """Input file does not match the documented artifact schema."""


@dataclass
class FigureSpec:
    kind: str
    in_dir: Path
    out_path: Path
    logx: bool = False
    logy: bool = False
    extras: dict = field(default_factory=dict)


def _check_columns(frame: pd.DataFrame, expected, path) -> None:
    got = list(frame.columns)
    for col in expected:
        if col not in got:
            raise SchemaError(f"{path}: missing column {col!r} (expected {expected})")
    if list(got) != list(expected):
        raise SchemaError(f"{path}: header {got} does not match schema {expected}")


def load_series(run_dir: Path) -> pd.DataFrame:
    path = run_dir / "series.csv"
    if not path.exists():
        raise SchemaError(f"{path}: file not found")
    frame = pd.read_csv(path)
    _check_columns(frame, SERIES_COLUMNS, path)
    return frame


def load_meta(run_dir: Path) -> dict:
    path = run_dir / "meta.json"
    if not path.exists():
        raise SchemaError(f"{path}: file not found")
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _title_tag(meta: dict) -> str:
    label = meta.get("label", "run")
    digest = meta.get("config_sha256", "")[:12]
    return f"{label} [cfg {digest}]"


def render(spec: FigureSpec) -> dict:
    """Produce the figure file; returns info about what was drawn."""
    if spec.kind not in FIGURE_KINDS:
        raise SchemaError(f"unknown figure kind {spec.kind!r} (choose from {FIGURE_KINDS})")
    renderer = {
        "supnorm_growth": _render_supnorm,
        "energy_decay": _render_energy,
        "profiles": _render_profiles,
        "sweep_energy": _render_sweep,
    }[spec.kind]
    spec.out_path.parent.mkdir(parents=True, exist_ok=True)
    return renderer(spec)


def _render_supnorm(spec: FigureSpec) -> dict:
    frame = load_series(spec.in_dir)
    meta = load_meta(spec.in_dir)
    cls = meta.get("classify_blowup") or {}
    annotation = cls.get("label", "unclassified")

    fig, (ax_lin, ax_log) = plt.subplots(1, 2, figsize=(10, 4))
    ax_lin.plot(frame["t"], frame["sup_u"], color="tab:red", lw=1.2)
    ax_lin.set_xlabel("t")
    ax_lin.set_ylabel("sup u")
    ax_lin.set_title("linear")
    positive = frame[frame["t"] > 0]
    ax_log.plot(positive["t"], positive["sup_u"], color="tab:red", lw=1.2)
    ax_log.set_xscale("log")
    ax_log.set_yscale("log")
    ax_log.set_xlabel("t")
    ax_log.set_title("log-log")
    ax_log.annotate(annotation, xy=(0.05, 0.92), xycoords="axes fraction",
                    fontsize=10, fontweight="bold", color="tab:blue")
    fig.suptitle(f"sup-norm growth - {_title_tag(meta)}")
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=110)
    plt.close(fig)
    return {"out": str(spec.out_path), "annotation": annotation, "points": len(frame)}


def _energy_violations(ts, energies) -> list:
    bad = []
    for j in range(len(energies) - 1):
        if energies[j + 1] > energies[j] + ENERGY_EPS * (1.0 + abs(energies[j])):
            bad.append(j + 1)
    return bad


def _render_energy(spec: FigureSpec) -> dict:
    frame = load_series(spec.in_dir)
    meta = load_meta(spec.in_dir)
    ts = frame["t"].to_numpy()
    energies = frame["F"].to_numpy()
    violations = _energy_violations(ts, energies)

    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.plot(ts, energies, color="tab:green", lw=1.2, label="F(t)")
    if violations:
        ax.plot(ts[violations], energies[violations], "rv", ms=7,
                label=f"monotonicity violations ({len(violations)})")
        ax.legend()
    ax.set_xlabel("t")
    ax.set_ylabel("F")
    if spec.logx:
        ax.set_xscale("symlog")
    ax.set_title(f"energy decay - {_title_tag(meta)}")
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=110)
    plt.close(fig)
    return {"out": str(spec.out_path), "violations": len(violations), "points": len(frame)}


def _render_profiles(spec: FigureSpec) -> dict:
    meta = load_meta(spec.in_dir)
    snaps = meta.get("snapshots", {})
    if not snaps:
        raise SchemaError(f"{spec.in_dir}/meta.json lists no snapshots")
    fig, (ax_u, ax_v) = plt.subplots(1, 2, figsize=(10, 4))
    for name, t_snap in sorted(snaps.items(), key=lambda kv: kv[1]):
        path = spec.in_dir / name
        frame = pd.read_csv(path)
        _check_columns(frame, SNAPSHOT_COLUMNS, path)
        ax_u.plot(frame["r"], frame["u"], lw=1.1, label=f"t={t_snap:g}")
        ax_v.plot(frame["r"], frame["v"], lw=1.1, ls="--")
    ax_u.set_xlabel("r")
    ax_u.set_ylabel("u")
    ax_u.set_yscale("log" if spec.logy else "linear")
    ax_u.legend(fontsize=8)
    ax_v.set_xlabel("r")
    ax_v.set_ylabel("v")
    fig.suptitle(f"radial profiles - {_title_tag(meta)}")
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=110)
    plt.close(fig)
    return {"out": str(spec.out_path), "snapshots": len(snaps)}


def _render_sweep(spec: FigureSpec) -> dict:
    path = spec.in_dir / "sweep_summary.csv"
    if not path.exists():
        raise SchemaError(f"{path}: file not found")
    frame = pd.read_csv(path)
    expected_tail = ["final_sup_u", "F0", "status", "classify", "exit_code"]
    for col in expected_tail:
        if col not in frame.columns:
            raise SchemaError(f"{path}: missing column {col!r}")
    axis_name = frame.columns[0]
    values = frame[axis_name].to_numpy(dtype=float)
    f0 = frame["F0"].to_numpy(dtype=float)
    decreasing = bool(np.all(np.diff(f0) < 0.0))

    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    ax.plot(values, f0, "o-", color="tab:purple")
    ax.set_xlabel(axis_name)
    ax.set_ylabel("initial energy F0")
    ax.set_title(f"sweep energy ({'strictly decreasing' if decreasing else 'non-monotone'})")
    if spec.logx:
        ax.set_xscale("log")
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=110)
    plt.close(fig)
    return {"out": str(spec.out_path), "rows": len(frame), "strictly_decreasing": decreasing}
