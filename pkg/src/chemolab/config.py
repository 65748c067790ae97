"""Flat key/value run configuration with dotted sections.

Example::

    grid.n = 3
    grid.R = 7.2
    grid.M = 128
    motility.kind = exponential
    scenario.kind = negative_energy_bump
    scenario.m = 50
    scenario.epsilon = 0.45
    stepper.dt_init = 1e-4
    run.T_end = 1000
    run.sample_every = 1.0
    run.snapshot_times = 0, 10, 1000
    run.label = aggregation-n3-m50

Lines starting with ``#`` are comments.  Unknown keys are rejected so typos
fail loudly before any compute starts.
"""

import hashlib
from dataclasses import dataclass, field

from .errors import ConfigError
from .grid import build_radial_grid
from .motility import exponential_motility, power_law_motility
from .scenarios import constant_scenario, negative_energy_bump, small_mass_bump
from .stepper import StepControl

_KNOWN_KEYS = {
    "grid.n", "grid.R", "grid.M",
    "motility.kind", "motility.k",
    "scenario.kind", "scenario.c", "scenario.m", "scenario.width", "scenario.epsilon",
    "stepper.dt_init", "stepper.dt_min", "stepper.dt_max",
    "stepper.safety", "stepper.growth_cap", "stepper.target_rel_change",
    "run.T_end", "run.sample_every", "run.snapshot_times", "run.label",
    "output.dir",
}

_DEFAULTS = {
    "stepper.dt_init": "1e-3",
    "stepper.dt_min": "1e-12",
    "stepper.dt_max": "1.0",
    "stepper.safety": "0.9",
    "stepper.growth_cap": "1.2",
    "stepper.target_rel_change": "0.05",
    "run.snapshot_times": "",
    "run.label": "run",
}


@dataclass
class RunConfig:
    raw_text: str
    values: dict = field(default_factory=dict)

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.raw_text.encode()).hexdigest()

    def get(self, key: str, default=None):
        return self.values.get(key, default)

    def _req(self, key: str) -> str:
        if key not in self.values:
            raise ConfigError(f"missing required config key {key!r}")
        return self.values[key]

    def req_int(self, key: str) -> int:
        raw = self._req(key)
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"config key {key!r} must be an integer, got {raw!r}") from exc

    def req_float(self, key: str) -> float:
        raw = self._req(key)
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"config key {key!r} must be a number, got {raw!r}") from exc

    def float_list(self, key: str) -> list:
        raw = self.values.get(key, "")
        if not raw.strip():
            return []
        try:
            return [float(tok) for tok in raw.split(",")]
        except ValueError as exc:
            raise ConfigError(f"config key {key!r} must be a comma-separated number list") from exc


def parse_config_text(text: str) -> RunConfig:
    values = dict(_DEFAULTS)
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"config line {lineno} is not 'key = value': {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config key {key!r} (line {lineno})")
        values[key] = raw.strip()
    return RunConfig(raw_text=text, values=values)


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def build_grid(cfg: RunConfig):
    return build_radial_grid(cfg.req_int("grid.n"), cfg.req_float("grid.R"), cfg.req_int("grid.M"))


def build_motility(cfg: RunConfig):
    kind = cfg._req("motility.kind").lower()
    if kind == "exponential":
        return exponential_motility()
    if kind == "powerlaw":
        return power_law_motility(cfg.req_float("motility.k"))
    raise ConfigError(f"unknown motility.kind {kind!r} (expected exponential or powerlaw)")


def build_scenario(cfg: RunConfig):
    kind = cfg._req("scenario.kind").lower()
    if kind == "constant":
        return constant_scenario(cfg.req_float("scenario.c"))
    if kind == "small_mass_bump":
        return small_mass_bump(cfg.req_float("scenario.m"), cfg.req_float("scenario.width"))
    if kind == "negative_energy_bump":
        return negative_energy_bump(cfg.req_float("scenario.m"), cfg.req_float("scenario.epsilon"))
    raise ConfigError(f"unknown scenario.kind {kind!r}")


def build_step_control(cfg: RunConfig) -> StepControl:
    return StepControl(
        dt_init=cfg.req_float("stepper.dt_init"),
        dt_min=cfg.req_float("stepper.dt_min"),
        dt_max=cfg.req_float("stepper.dt_max"),
        safety=cfg.req_float("stepper.safety"),
        growth_cap=cfg.req_float("stepper.growth_cap"),
        target_rel_change=cfg.req_float("stepper.target_rel_change"),
    )
