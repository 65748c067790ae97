"""Initial-data constructors for the experiment classes.

All profiles are radial.  Bumps use the C^1 compactly supported shape
phi(r) = (1 - (r/eps)^2)^2 on r <= eps, normalized against the discrete
cell-volume quadrature so the requested mass is met to roundoff.

The aggregation scenario pairs a concentrated density bump with HALF the
Helmholtz lift of the density, v0 = 0.5 * (I-Lap)^{-1} u0.  With the full
lift the interaction integral cancels exactly against the gradient term of
the energy (int |grad v|^2 = int u v - int v^2 when v is the lift), leaving
F = int u log u - 1/2 int v^2, which grows under concentration in three
dimensions.  Halving the lift breaks that cancellation and makes the
interaction dominate, so F ~ -(1/4) int u0 (I-Lap)^{-1} u0 decreases
without bound as the bump concentrates.
"""

from dataclasses import dataclass, field

import numpy as np

from .diagnostics import lyapunov
from .errors import ConfigError
from .grid import RadialGrid, helmholtz_solve, integrate
from .stepper import State

VZERO_LIFT_FACTOR = 0.5


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str  # "constant" | "small_mass_bump" | "negative_energy_bump" | "custom"
    params: dict = field(default_factory=dict)


def constant_scenario(c: float) -> ScenarioSpec:
    return ScenarioSpec("constant", {"c": float(c)})


def small_mass_bump(m: float, width: float) -> ScenarioSpec:
    return ScenarioSpec("small_mass_bump", {"m": float(m), "width": float(width)})


def negative_energy_bump(m: float, epsilon: float) -> ScenarioSpec:
    return ScenarioSpec("negative_energy_bump", {"m": float(m), "epsilon": float(epsilon)})


def custom_scenario(u_values, v_values) -> ScenarioSpec:
    return ScenarioSpec("custom", {"u_values": np.asarray(u_values, dtype=float),
                                   "v_values": np.asarray(v_values, dtype=float)})


def bump_profile(r: np.ndarray, eps: float) -> np.ndarray:
    s2 = (r / eps) ** 2
    return np.where(s2 < 1.0, (1.0 - np.minimum(s2, 1.0)) ** 2, 0.0)


def _normalized_bump(grid: RadialGrid, m: float, eps: float) -> np.ndarray:
    if not (m > 0.0):
        raise ConfigError(f"bump mass must be positive, got {m}")
    phi = bump_profile(grid.r_centers, eps)
    total = integrate(grid, phi)
    if total <= 0.0:
        raise ConfigError(f"bump of width {eps:g} is not resolved by the grid (h={grid.h:g})")
    return (m / total) * phi


def make_initial(grid: RadialGrid, spec: ScenarioSpec) -> State:
    if spec.kind == "constant":
        c = spec.params["c"]
        if not (c > 0.0):
            raise ConfigError(f"constant scenario needs c > 0, got {c}")
        u0 = np.full(grid.M, c)
        v0 = np.full(grid.M, c)
    elif spec.kind == "small_mass_bump":
        width = spec.params["width"]
        if not (0.0 < width <= grid.R):
            raise ConfigError(f"bump width must lie in (0, R], got {width}")
        u0 = _normalized_bump(grid, spec.params["m"], width)
        v0 = helmholtz_solve(grid, u0)
    elif spec.kind == "negative_energy_bump":
        eps = spec.params["epsilon"]
        if not (0.0 < eps <= 0.25 * grid.R):
            raise ConfigError(f"concentration radius must lie in (0, R/4], got {eps}")
        u0 = _normalized_bump(grid, spec.params["m"], eps)
        v0 = VZERO_LIFT_FACTOR * helmholtz_solve(grid, u0)
    elif spec.kind == "custom":
        u0 = np.asarray(spec.params["u_values"], dtype=float).copy()
        v0 = np.asarray(spec.params["v_values"], dtype=float).copy()
        if u0.shape != (grid.M,) or v0.shape != (grid.M,):
            raise ConfigError("custom profiles must match the grid size")
    else:
        raise ConfigError(f"unknown scenario kind {spec.kind!r}")

    if np.any(u0 < 0.0) or np.any(v0 < 0.0) or not np.any(u0 > 0.0):
        raise ConfigError("initial data must be nonnegative with nonvanishing density")
    return State(t=0.0, u=u0, v=v0)


@dataclass(frozen=True)
class EnergyReport:
    mass: float
    F: float
    sup_u: float
    sup_v: float

    def as_dict(self) -> dict:
        return {"mass": self.mass, "F": self.F, "sup_u": self.sup_u, "sup_v": self.sup_v}


def energy_report(grid: RadialGrid, state: State) -> EnergyReport:
    return EnergyReport(
        mass=integrate(grid, state.u),
        F=lyapunov(grid, state),
        sup_u=float(np.max(state.u)),
        sup_v=float(np.max(state.v)),
    )
