"""Fixtures generating real simulator artifacts through the chemolab CLI."""

import subprocess

import pytest

AGGREGATION_CFG = """\
grid.n = 3
grid.R = 2.0
grid.M = 128
motility.kind = exponential
scenario.kind = negative_energy_bump
scenario.m = 10
scenario.epsilon = 0.125
stepper.dt_init = 1e-4
stepper.dt_min = 1e-12
stepper.dt_max = 0.25
stepper.target_rel_change = 0.02
run.T_end = 1000
run.sample_every = 1.0
run.snapshot_times = 0, 10, 1000
run.label = aggregation-n3-m10
"""

SWEEP_CFG = """\
grid.n = 3
grid.R = 1.0
grid.M = 64
motility.kind = exponential
scenario.kind = negative_energy_bump
scenario.m = 50
scenario.epsilon = 0.125
stepper.dt_init = 1e-3
stepper.dt_max = 0.1
run.T_end = 0.5
run.sample_every = 0.1
run.label = ladder
"""


def run_cli(args):
    proc = subprocess.run(args, capture_output=True, text=True)
    assert proc.returncode == 0, f"{args} failed: {proc.stdout}\n{proc.stderr}"
    return proc


@pytest.fixture(scope="session")
def aggregation_run_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("agg")
    cfg = root / "run.cfg"
    cfg.write_text(AGGREGATION_CFG)
    out = root / "out"
    run_cli(["chemolab", "run", "--config", str(cfg), "--out", str(out)])
    return out


@pytest.fixture(scope="session")
def sweep_run_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("sweep")
    cfg = root / "sweep.cfg"
    cfg.write_text(SWEEP_CFG)
    out = root / "out"
    run_cli(["chemolab", "sweep", "--config", str(cfg), "--axis", "scenario.epsilon",
             "--values", "0.125,0.0625,0.03125", "--out", str(out)])
    return out
