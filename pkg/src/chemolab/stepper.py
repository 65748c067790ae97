"""Linearly implicit IMEX time stepping for the coupled system.

One step advances (u, v) by two tridiagonal solves:

(i)  density, conservative and implicit with the motility frozen at the
     current signal level:  u+ = u + dt * Lap(gamma(v) u+), discretized so
     the face flux is a_{j} * (gamma(v_j) u+_j - gamma(v_{j-1}) u+_{j-1})/h
     with zero boundary fluxes;
(ii) signal, backward Euler sourced by the fresh density:
     v+ = v + dt * (Lap v+ - v+ + u+).

Both solves are written in delta form: the unknown is the increment and the
right-hand side is assembled from face-flux differences of the current
state.  On spatially constant states every flux difference is exactly zero
in floating point, so constants are bitwise fixed points for any dt.  The
density matrix has column sums equal to the cell volumes, which makes the
cell-volume weighted sum of the increment vanish: mass is conserved to
solver roundoff, with no time-step restriction (both matrices are
M-matrices, so positivity is unconditional in exact arithmetic; roundoff
negatives are clipped with a mass-restoring rescale).
"""

from dataclasses import dataclass, replace

import numpy as np

from . import diagnostics, kernels
from .errors import ConfigError, SolverFailure
from .grid import RadialGrid, helmholtz_solve, integrate
from .motility import MotilitySpec

SUP_GUARD_DEFAULT = 1e14
NEG_TOL_FACTOR = 1e-12


@dataclass
class State:
    t: float
    u: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class StepControl:
    dt_init: float
    dt_min: float
    dt_max: float
    safety: float = 0.9
    growth_cap: float = 1.2
    target_rel_change: float = 0.05

    def __post_init__(self):
        if not (0.0 < self.dt_min <= self.dt_init <= self.dt_max):
            raise ConfigError(
                f"need 0 < dt_min <= dt_init <= dt_max, got "
                f"({self.dt_min}, {self.dt_init}, {self.dt_max})")
        if not (0.0 < self.safety <= 1.0):
            raise ConfigError(f"safety must lie in (0, 1], got {self.safety}")
        if self.growth_cap < 1.0:
            raise ConfigError(f"growth_cap must be >= 1, got {self.growth_cap}")
        if not (self.target_rel_change > 0.0):
            raise ConfigError("target_rel_change must be positive")


def _face_flux_difference(lam_faces: np.ndarray, cellvals: np.ndarray) -> np.ndarray:
    """diff of face fluxes lam_j * (c_j - c_{j-1}); boundary fluxes are zero
    because lam carries the zeroed boundary areas.  Identical neighbor values
    produce exactly zero."""
    flux = np.zeros(cellvals.shape[0] + 1)
    flux[1:-1] = lam_faces[1:-1] * np.diff(cellvals)
    return np.diff(flux)


def step(grid: RadialGrid, spec: MotilitySpec, state: State, dt: float) -> State:
    """Advance one IMEX step of size dt; raises SolverFailure on breakdown."""
    if not (dt > 0.0):
        raise ValueError(f"dt must be positive, got {dt}")
    u = state.u
    v = state.v
    omega = grid.cell_volumes
    lam = (dt / grid.h) * grid.flux_areas  # face-indexed, boundaries zero

    gam = np.asarray(spec.gamma(v), dtype=float)
    if not np.all(np.isfinite(gam)):
        raise SolverFailure("motility evaluation produced non-finite values", kind="nonfinite")

    # --- density sub-step (delta form)
    rhs_u = _face_flux_difference(lam, gam * u)
    diag = omega + gam * (lam[:-1] + lam[1:])
    lower = -lam[1:-1] * gam[:-1]
    upper = -lam[1:-1] * gam[1:]
    delta_u = kernels.solve_tridiag(lower, diag, upper, rhs_u)
    u_new = u + delta_u
    if not np.all(np.isfinite(u_new)):
        raise SolverFailure("density solve produced non-finite values", kind="nonfinite")
    neg_tol = NEG_TOL_FACTOR * float(np.max(u))
    u_min = float(np.min(u_new))
    if u_min < -neg_tol:
        raise SolverFailure(f"density undershoot {u_min:.3e} exceeds tolerance {neg_tol:.3e}",
                            kind="negativity")
    if u_min < 0.0:
        mass_before = float(np.dot(omega, u_new))
        u_new = np.maximum(u_new, 0.0)
        mass_after = float(np.dot(omega, u_new))
        if mass_after > 0.0:
            u_new *= mass_before / mass_after

    # --- signal sub-step (delta form, backward Euler)
    rhs_v = dt * omega * (u_new - v) + _face_flux_difference(lam, v)
    diag_v = omega * (1.0 + dt) + (lam[:-1] + lam[1:])
    lower_v = -lam[1:-1]
    upper_v = -lam[1:-1].copy()
    delta_v = kernels.solve_tridiag(lower_v, diag_v, upper_v, rhs_v)
    v_new = v + delta_v
    if not np.all(np.isfinite(v_new)):
        raise SolverFailure("signal solve produced non-finite values", kind="nonfinite")
    v_min = float(np.min(v_new))
    neg_tol_v = NEG_TOL_FACTOR * max(float(np.max(v)), float(np.max(u_new)), 1.0)
    if v_min < -neg_tol_v:
        raise SolverFailure(f"signal undershoot {v_min:.3e} exceeds tolerance {neg_tol_v:.3e}",
                            kind="negativity")
    if v_min < 0.0:
        v_new = np.maximum(v_new, 0.0)

    return State(t=state.t + dt, u=u_new, v=v_new)


def adapt_dt(prev_state: State, next_state: State, dt: float, ctl: StepControl) -> float:
    """Proportional controller on the relative sup-norm change of both fields."""
    observed = 0.0
    for a, b in ((prev_state.u, next_state.u), (prev_state.v, next_state.v)):
        denom = float(np.max(np.abs(a)))
        change = float(np.max(np.abs(b - a)))
        if change > 0.0:
            observed = max(observed, change / max(denom, 1e-300))
    if observed == 0.0:
        cand = dt * ctl.growth_cap
    else:
        cand = dt * ctl.safety * (ctl.target_rel_change / observed)
        cand = min(max(cand, 0.5 * dt), dt * ctl.growth_cap)
    return min(max(cand, ctl.dt_min), ctl.dt_max)


@dataclass
class RunResult:
    records: list
    snapshots: list  # (time, State) pairs
    status: str      # "ReachedTEnd" | "SupNormGuard" | "DtUnderflow"
    final_state: State
    steps: int
    failure_message: str = ""


def _validate_initial(grid: RadialGrid, initial: State):
    u = np.asarray(initial.u, dtype=float)
    v = np.asarray(initial.v, dtype=float)
    if u.shape != (grid.M,) or v.shape != (grid.M,):
        raise ConfigError("initial fields do not match the grid")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise ConfigError("initial data contains non-finite entries")
    if np.any(u < 0.0) or np.any(v < 0.0):
        raise ConfigError("initial data must be nonnegative")
    if not np.any(u > 0.0):
        raise ConfigError("initial density must not vanish identically")


def run(grid: RadialGrid, spec: MotilitySpec, initial: State, T_end: float,
        ctl: StepControl, sample_every: float, snapshot_times=(),
        sup_guard: float = SUP_GUARD_DEFAULT) -> RunResult:
    """Integrate to T_end, emitting one diagnostics record per sample time.

    Steps are clipped to land exactly on sample and snapshot times.  On a
    failed step the step size is halved and retried down to dt_min; a
    negativity failure at dt_min stops the run with status DtUnderflow,
    while a non-finite failure at dt_min propagates as SolverFailure.
    """
    _validate_initial(grid, initial)
    if not (T_end > 0.0):
        raise ConfigError(f"T_end must be positive, got {T_end}")
    if not (sample_every > 0.0):
        raise ConfigError(f"sample_every must be positive, got {sample_every}")

    state = State(t=float(initial.t), u=np.asarray(initial.u, dtype=float).copy(),
                  v=np.asarray(initial.v, dtype=float).copy())
    w0 = helmholtz_solve(grid, state.u)
    gamma0 = float(spec.gamma(np.asarray(0.0)))

    records = [diagnostics.build_record(grid, spec, None, state, 0.0, w0, gamma0)]
    snapshots = []
    pending_snaps = sorted(float(s) for s in snapshot_times if 0.0 <= s <= T_end)
    tiny = 1e-9 * max(1.0, T_end)
    if pending_snaps and pending_snaps[0] <= tiny:
        snapshots.append((0.0, replace(state, u=state.u.copy(), v=state.v.copy())))
        pending_snaps.pop(0)

    dt_ctrl = min(max(ctl.dt_init, ctl.dt_min), ctl.dt_max)
    sample_k = 1
    steps = 0
    status = "ReachedTEnd"
    failure_message = ""

    while state.t < T_end - tiny:
        next_sample = min(sample_k * sample_every, T_end)
        boundary = min(next_sample, T_end)
        if pending_snaps:
            boundary = min(boundary, pending_snaps[0])
        dt_try = min(dt_ctrl, boundary - state.t)
        clipped = dt_try < dt_ctrl * (1.0 - 1e-12)
        shrunk = False

        while True:
            try:
                new_state = step(grid, spec, state, dt_try)
                break
            except SolverFailure as exc:
                if dt_try <= ctl.dt_min * (1.0 + 1e-9):
                    if exc.kind == "nonfinite":
                        raise
                    status = "DtUnderflow"
                    failure_message = str(exc)
                    new_state = None
                    break
                dt_try = max(0.5 * dt_try, ctl.dt_min)
                shrunk = True
        if new_state is None:
            break

        steps += 1
        cand = adapt_dt(state, new_state, dt_try, ctl)
        if shrunk:
            dt_ctrl = cand
        elif clipped:
            dt_ctrl = max(cand, dt_ctrl)
        else:
            dt_ctrl = cand

        prev_state = state
        state = new_state
        if abs(state.t - boundary) <= tiny:
            state.t = boundary  # keep sample/snapshot times exact

        if pending_snaps and state.t >= pending_snaps[0] - tiny:
            snapshots.append((state.t, replace(state, u=state.u.copy(), v=state.v.copy())))
            pending_snaps.pop(0)

        emitted = False
        if state.t >= next_sample - tiny:
            records.append(diagnostics.build_record(grid, spec, prev_state, state,
                                                    dt_try, w0, gamma0))
            emitted = True
            while sample_k * sample_every <= state.t + tiny:
                sample_k += 1

        if float(np.max(state.u)) > sup_guard:
            status = "SupNormGuard"
            if not emitted:
                records.append(diagnostics.build_record(grid, spec, prev_state, state,
                                                        dt_try, w0, gamma0))
            break

    if records[-1].t < state.t - tiny:
        records.append(diagnostics.build_record(grid, spec, None, state, 0.0, w0, gamma0))

    return RunResult(records=records, snapshots=snapshots, status=status,
                     final_state=state, steps=steps, failure_message=failure_message)
