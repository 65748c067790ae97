"""Time integrator tests: equilibria, conservation, convergence, control."""

import math

import numpy as np
import pytest

from chemolab.errors import ConfigError, SolverFailure
from chemolab.grid import build_radial_grid, integrate
from chemolab.motility import custom_motility, exponential_motility, power_law_motility
from chemolab.stepper import State, StepControl, adapt_dt, run, step


def smooth_state(grid, amp_u=0.3, amp_v=0.2):
    ru = 1.0 + amp_u * np.cos(math.pi * grid.r_centers / grid.R)
    rv = 1.0 + amp_v * np.cos(math.pi * grid.r_centers / grid.R)
    return State(t=0.0, u=ru, v=rv)


# ------------------------------------------------------------- single step


def test_constant_state_is_bitwise_fixed_point():
    g = build_radial_grid(3, 1.0, 64)
    spec = exponential_motility()
    for c in (0.37, 1.0, 5.0):
        state = State(0.0, np.full(g.M, c), np.full(g.M, c))
        for dt in (1e-4, 1e-2, 0.5, 2.0):
            out = step(g, spec, state, dt)
            assert np.array_equal(out.u, state.u)
            assert np.array_equal(out.v, state.v)


def test_constant_state_many_steps_stays_exact():
    g = build_radial_grid(3, 1.0, 48)
    spec = power_law_motility(2.0)
    state = State(0.0, np.full(g.M, 2.0), np.full(g.M, 2.0))
    for _ in range(200):
        state = step(g, spec, state, 0.05)
    assert np.all(state.u == 2.0)
    assert np.all(state.v == 2.0)


def test_mass_conserved_every_step():
    g = build_radial_grid(3, 1.0, 96)
    spec = exponential_motility()
    state = smooth_state(g, amp_u=0.8, amp_v=0.5)
    m0 = integrate(g, state.u)
    for _ in range(200):
        prev_mass = integrate(g, state.u)
        state = step(g, spec, state, 2e-3)
        mass = integrate(g, state.u)
        assert abs(mass - prev_mass) <= 1e-12 * m0
    assert abs(integrate(g, state.u) - m0) <= 1e-11 * m0


def test_positivity_with_sharp_data():
    g = build_radial_grid(3, 1.0, 128)
    spec = exponential_motility()
    u = np.where(g.r_centers < 0.15, 100.0, 1e-8)
    v = np.zeros(g.M)
    state = State(0.0, u, v)
    for _ in range(50):
        state = step(g, spec, state, 1e-3)
        assert np.min(state.u) >= 0.0
        assert np.min(state.v) >= 0.0


def test_step_rejects_nonfinite_motility():
    g = build_radial_grid(1, 1.0, 32)
    bad = custom_motility(lambda s: np.full_like(np.asarray(s, dtype=float), np.nan),
                          lambda s: np.zeros_like(np.asarray(s, dtype=float)))
    state = smooth_state(g)
    with pytest.raises(SolverFailure):
        step(g, bad, state, 1e-3)


def test_temporal_self_convergence_first_order():
    g = build_radial_grid(1, 1.0, 256)
    spec = exponential_motility()
    T = 0.1

    def advance(dt):
        state = smooth_state(g)
        nsteps = round(T / dt)
        for _ in range(nsteps):
            state = step(g, spec, state, dt)
        return state.u

    u1 = advance(2.0e-3)
    u2 = advance(1.0e-3)
    u3 = advance(0.5e-3)
    e12 = np.max(np.abs(u1 - u2))
    e23 = np.max(np.abs(u2 - u3))
    order = math.log2(e12 / e23)
    assert abs(order - 1.0) <= 0.2


# ------------------------------------------------------------- controller


def make_ctl(**kw):
    defaults = dict(dt_init=1e-3, dt_min=1e-12, dt_max=10.0, safety=0.9, growth_cap=1.2)
    defaults.update(kw)
    return StepControl(**defaults)


def test_adapt_dt_zero_change_grows_by_cap():
    g = build_radial_grid(1, 1.0, 16)
    s = State(0.0, np.ones(g.M), np.ones(g.M))
    ctl = make_ctl()
    assert adapt_dt(s, State(0.1, s.u.copy(), s.v.copy()), 0.1, ctl) == pytest.approx(0.12)


def test_adapt_dt_at_target_applies_safety():
    g = build_radial_grid(1, 1.0, 16)
    prev = State(0.0, np.ones(g.M), np.ones(g.M))
    nxt_u = np.ones(g.M)
    nxt_u[0] = 1.05  # exactly the default 5% target
    nxt = State(0.1, nxt_u, np.ones(g.M))
    ctl = make_ctl()
    assert adapt_dt(prev, nxt, 0.1, ctl) == pytest.approx(0.09)


def test_adapt_dt_shrinks_on_doubling():
    g = build_radial_grid(1, 1.0, 16)
    prev = State(0.0, np.ones(g.M), np.ones(g.M))
    nxt = State(0.1, 2.0 * np.ones(g.M), np.ones(g.M))
    ctl = make_ctl()
    out = adapt_dt(prev, nxt, 0.1, ctl)
    assert out < 0.1
    assert out == pytest.approx(0.05)  # lower clamp dt/2


def test_adapt_dt_respects_bounds():
    g = build_radial_grid(1, 1.0, 16)
    prev = State(0.0, np.ones(g.M), np.ones(g.M))
    same = State(0.1, np.ones(g.M), np.ones(g.M))
    ctl = make_ctl(dt_max=0.105)
    assert adapt_dt(prev, same, 0.1, ctl) == pytest.approx(0.105)
    ctl2 = make_ctl(dt_min=0.09999, dt_init=0.1)
    nxt = State(0.1, 5.0 * np.ones(g.M), np.ones(g.M))
    assert adapt_dt(prev, nxt, 0.1, ctl2) >= 0.09999


def test_step_control_validation():
    with pytest.raises(ConfigError):
        StepControl(dt_init=1.0, dt_min=2.0, dt_max=3.0)
    with pytest.raises(ConfigError):
        StepControl(dt_init=1e-3, dt_min=1e-6, dt_max=1e-4)
    with pytest.raises(ConfigError):
        StepControl(dt_init=1e-3, dt_min=1e-6, dt_max=1.0, safety=1.5)
    with pytest.raises(ConfigError):
        StepControl(dt_init=1e-3, dt_min=1e-6, dt_max=1.0, growth_cap=0.8)


# ------------------------------------------------------------- full runs


def test_run_constant_state_reaches_tend():
    g = build_radial_grid(3, 1.0, 32)
    spec = exponential_motility()
    c = 1.3
    initial = State(0.0, np.full(g.M, c), np.full(g.M, c))
    ctl = StepControl(dt_init=1e-2, dt_min=1e-10, dt_max=0.5)
    result = run(g, spec, initial, T_end=10.0, ctl=ctl, sample_every=1.0)
    assert result.status == "ReachedTEnd"
    masses = [rec.mass for rec in result.records]
    expected = c * g.volume
    assert all(abs(m - expected) <= 1e-12 * expected for m in masses)
    energies = [rec.F for rec in result.records]
    assert max(energies) - min(energies) <= 1e-12 * (1.0 + abs(energies[0]))
    assert result.records[0].t == 0.0
    assert result.records[-1].t == pytest.approx(10.0)
    assert len(result.records) == 11


def test_run_validates_initial_data():
    g = build_radial_grid(3, 1.0, 32)
    spec = exponential_motility()
    ctl = StepControl(dt_init=1e-2, dt_min=1e-10, dt_max=0.5)
    with pytest.raises(ConfigError):
        run(g, spec, State(0.0, np.zeros(g.M), np.ones(g.M)), 1.0, ctl, 0.5)
    bad_u = np.ones(g.M)
    bad_u[2] = -0.5
    with pytest.raises(ConfigError):
        run(g, spec, State(0.0, bad_u, np.ones(g.M)), 1.0, ctl, 0.5)
    bad_v = np.ones(g.M)
    bad_v[0] = -1.0
    with pytest.raises(ConfigError):
        run(g, spec, State(0.0, np.ones(g.M), bad_v), 1.0, ctl, 0.5)


def test_run_emits_snapshots_at_requested_times():
    g = build_radial_grid(1, 1.0, 64)
    spec = exponential_motility()
    initial = smooth_state(g)
    ctl = StepControl(dt_init=1e-3, dt_min=1e-12, dt_max=0.3)
    result = run(g, spec, initial, T_end=2.0, ctl=ctl, sample_every=0.5,
                 snapshot_times=(0.0, 0.75, 2.0))
    times = [t for t, _ in result.snapshots]
    assert times == pytest.approx([0.0, 0.75, 2.0])


def test_run_propagates_nonfinite_failure():
    g = build_radial_grid(1, 1.0, 32)
    bad = custom_motility(lambda s: np.full_like(np.asarray(s, dtype=float), np.nan),
                          lambda s: np.zeros_like(np.asarray(s, dtype=float)))
    ctl = StepControl(dt_init=1e-3, dt_min=1e-6, dt_max=0.1)
    with pytest.raises(SolverFailure):
        run(g, bad, smooth_state(g), T_end=1.0, ctl=ctl, sample_every=0.5)


def test_run_stops_with_dt_underflow_on_persistent_negativity(monkeypatch):
    import chemolab.stepper as stepper_mod

    def always_negative(grid, spec, state, dt):
        raise SolverFailure("forced undershoot", kind="negativity")

    monkeypatch.setattr(stepper_mod, "step", always_negative)
    g = build_radial_grid(1, 1.0, 32)
    ctl = StepControl(dt_init=1e-3, dt_min=1e-6, dt_max=0.1)
    result = stepper_mod.run(g, exponential_motility(), smooth_state(g),
                             T_end=1.0, ctl=ctl, sample_every=0.5)
    assert result.status == "DtUnderflow"
    assert "undershoot" in result.failure_message
    assert result.records  # partial series retained


def test_run_smooth_bump_relaxes_toward_uniform():
    g = build_radial_grid(3, 1.0, 64)
    spec = exponential_motility()
    u0 = 0.2 + np.exp(-((g.r_centers / 0.35) ** 2))
    initial = State(0.0, u0, np.zeros(g.M))
    ctl = StepControl(dt_init=1e-3, dt_min=1e-12, dt_max=1.0)
    result = run(g, spec, initial, T_end=40.0, ctl=ctl, sample_every=2.0)
    assert result.status == "ReachedTEnd"
    sups = [rec.sup_u for rec in result.records]
    # monotone tail: the density spreads toward the homogeneous state
    tail = sups[len(sups) // 2 :]
    assert all(b <= a + 1e-12 for a, b in zip(tail, tail[1:]))
    mean = integrate(g, result.final_state.u) / g.volume
    assert result.records[-1].sup_u - mean < 0.5 * (max(sups) - mean)
