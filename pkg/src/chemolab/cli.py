"""Command line entry point: run, verify, sweep.

Exit codes for ``run`` (and per-child in ``sweep``): 0 completed to T_end,
2 invalid configuration (including motility assumption failures), 3 solver
breakdown or step-size underflow, 4 sup-norm guard tripped.  ``verify``
exits 0 only if every check in the suite passes (2 for an unknown suite).
``CHEMOLAB_THREADS`` caps sweep concurrency.
"""

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .config import (
    _KNOWN_KEYS,
    RunConfig,
    build_grid,
    build_motility,
    build_scenario,
    build_step_control,
    load_config,
    parse_config_text,
)
from .diagnostics import classify_blowup
from .errors import ConfigError, SolverFailure
from .motility import validate_motility
from .output import write_meta_json, write_series_csv, write_snapshot_csv, write_sweep_summary
from .scenarios import energy_report, make_initial
from .stepper import run as run_simulation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_SUPNORM = 4

_STATUS_EXIT = {"ReachedTEnd": EXIT_OK, "DtUnderflow": EXIT_SOLVER, "SupNormGuard": EXIT_SUPNORM}


def execute_run(cfg: RunConfig, out_dir: Path, echo=print) -> tuple:
    """Validate, simulate, and write artifacts; returns (exit_code, summary)."""
    summary = {"final_sup_u": None, "F0": None, "status": "ConfigError", "classify": ""}
    try:
        grid = build_grid(cfg)
        spec = build_motility(cfg)
        scenario = build_scenario(cfg)
        ctl = build_step_control(cfg)
        t_end = cfg.req_float("run.T_end")
        sample_every = cfg.req_float("run.sample_every")
        snapshot_times = cfg.float_list("run.snapshot_times")
        label = cfg.get("run.label", "run")

        report = validate_motility(spec)
        if not report.core_ok:
            echo(f"motility fails required assumptions: {'; '.join(report.messages)}")
            return EXIT_CONFIG, summary
        for msg in report.messages:
            echo(f"warning: {msg}")

        initial = make_initial(grid, scenario)
        initial_energy = energy_report(grid, initial)
        summary["F0"] = initial_energy.F
    except ConfigError as exc:
        echo(f"configuration error: {exc}")
        return EXIT_CONFIG, summary

    try:
        result = run_simulation(grid, spec, initial, T_end=t_end, ctl=ctl,
                                sample_every=sample_every, snapshot_times=snapshot_times)
    except SolverFailure as exc:
        echo(f"solver failure: {exc}")
        summary["status"] = "SolverFailure"
        return EXIT_SOLVER, summary

    out_dir.mkdir(parents=True, exist_ok=True)
    write_series_csv(out_dir / "series.csv", result.records)
    snapshot_files = {}
    for idx, (t_snap, state) in enumerate(result.snapshots):
        name = f"snapshot_{idx:03d}.csv"
        write_snapshot_csv(out_dir / name, grid, state)
        snapshot_files[name] = t_snap

    classification = None
    classify_note = ""
    positive = [(r.t, r.sup_u) for r in result.records if r.t > 0.0]
    try:
        cls = classify_blowup([p[0] for p in positive], [p[1] for p in positive])
        classification = cls.as_dict()
        summary["classify"] = cls.label
    except ValueError as exc:
        classify_note = str(exc)

    meta = {
        "artifact_version": __version__,
        "label": label,
        "config_text": cfg.raw_text,
        "config": dict(sorted(cfg.values.items())),
        "config_sha256": cfg.sha256,
        "motility_validation": report.as_dict(),
        "initial_energy": initial_energy.as_dict(),
        "status": result.status,
        "steps": result.steps,
        "failure_message": result.failure_message,
        "classify_blowup": classification,
        "classify_note": classify_note,
        "snapshots": snapshot_files,
        "records_written": len(result.records),
    }
    write_meta_json(out_dir / "meta.json", meta)

    summary["status"] = result.status
    summary["final_sup_u"] = result.records[-1].sup_u
    echo(f"status {result.status} after {result.steps} steps; "
         f"{len(result.records)} records -> {out_dir}")
    return _STATUS_EXIT[result.status], summary


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except (OSError, ConfigError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(args.out) if args.out else Path(cfg.get("output.dir", "out"))
    code, _ = execute_run(cfg, out_dir)
    return code


def cmd_verify(args) -> int:
    from . import verify
    try:
        all_ok, rows = verify.run_suite(args.suite)
    except KeyError:
        known = ", ".join(sorted(verify.SUITES) + ["all"])
        print(f"unknown suite {args.suite!r} (choose from: {known})", file=sys.stderr)
        return EXIT_CONFIG
    width = max(len(name) for name, _, _ in rows)
    for name, ok, detail in rows:
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  {detail}")
    print(f"verify {args.suite}: {'all checks passed' if all_ok else 'FAILURES PRESENT'}")
    return EXIT_OK if all_ok else 1


def cmd_sweep(args) -> int:
    try:
        cfg = load_config(args.config)
        values = [v.strip() for v in args.values.split(",") if v.strip()]
        if not values:
            raise ConfigError("sweep needs at least one value")
        if args.axis not in _KNOWN_KEYS:
            raise ConfigError(f"axis {args.axis!r} is not a config key")
    except (OSError, ConfigError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out_root = Path(args.out) if args.out else Path(cfg.get("output.dir", "sweep"))
    out_root.mkdir(parents=True, exist_ok=True)

    threads = os.environ.get("CHEMOLAB_THREADS", "")
    max_workers = max(1, int(threads)) if threads.isdigit() and int(threads) > 0 else min(4, len(values))

    def child(value):
        text = cfg.raw_text + f"\n{args.axis} = {value}\n"
        child_dir = out_root / f"{args.axis.replace('.', '_')}={value}"
        try:
            child_cfg = parse_config_text(text)
        except ConfigError as exc:
            return value, EXIT_CONFIG, {"final_sup_u": None, "F0": None,
                                        "status": f"ConfigError: {exc}", "classify": ""}
        code, summary = execute_run(child_cfg, child_dir, echo=lambda *a, **k: None)
        return value, code, summary

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        results = list(pool.map(child, values))

    rows = []
    for value, code, summary in results:
        rows.append((value, summary["final_sup_u"], summary["F0"],
                     summary["status"], summary["classify"], code))
        print(f"{args.axis}={value}: status={summary['status']} exit={code} "
              f"F0={summary['F0']} classify={summary['classify']}")
    write_sweep_summary(out_root / "sweep_summary.csv", args.axis, rows)
    return max((code for _, code, _ in results), default=EXIT_OK)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="chemolab",
        description="Finite-volume laboratory for chemotaxis with density-suppressed motility")
    parser.add_argument("--version", action="version", version=f"chemolab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one simulation from a config file")
    p_run.add_argument("--config", required=True, help="path to the run configuration")
    p_run.add_argument("--out", default=None, help="output directory (overrides output.dir)")
    p_run.set_defaults(func=cmd_run)

    p_verify = sub.add_parser("verify", help="run an invariant suite")
    p_verify.add_argument("--suite", required=True,
                          help="grid | motility | stepper | diagnostics | scenarios | all")
    p_verify.set_defaults(func=cmd_verify)

    p_sweep = sub.add_parser("sweep", help="run a one-axis parameter sweep")
    p_sweep.add_argument("--config", required=True, help="template configuration")
    p_sweep.add_argument("--axis", required=True, help="config key to vary, e.g. scenario.epsilon")
    p_sweep.add_argument("--values", required=True, help="comma-separated values for the axis")
    p_sweep.add_argument("--out", default=None, help="sweep output root")
    p_sweep.set_defaults(func=cmd_sweep)

    args = parser.parse_args(argv)
    code = args.func(args)
    return int(code)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
