"""Executable invariant suites behind the ``verify`` CLI verb.

Each check returns (ok, detail).  Checks call public operations through
their modules so fault injection (e.g. patching the Laplacian) is visible
to the suite.
"""

import math

import numpy as np

from . import diagnostics as diag_mod
from . import grid as grid_mod
from . import motility as mot_mod
from . import scenarios as scen_mod
from . import stepper as step_mod


# ------------------------------------------------------------------- grid


def _check_grid_conservation():
    worst = 0.0
    rng = np.random.default_rng(101)
    for n, M in ((1, 64), (3, 32), (3, 128), (4, 64)):
        g = grid_mod.build_radial_grid(n, 1.5, M)
        f = rng.standard_normal(M)
        total = abs(grid_mod.integrate(g, grid_mod.apply_laplacian(g, f)))
        scale = np.max(np.abs(f)) * g.volume
        worst = max(worst, total / scale)
    return worst <= 1e-12, f"max weighted Laplacian sum {worst:.2e} (tol 1e-12)"


def _check_grid_max_principle():
    rng = np.random.default_rng(55)
    for n in (1, 2, 3, 4):
        g = grid_mod.build_radial_grid(n, 1.0, 96)
        w = grid_mod.helmholtz_solve(g, rng.random(g.M))
        if not np.all(w >= 0.0):
            return False, f"negative entries in (I-Lap)^-1 output at n={n}"
    return True, "nonnegative inputs map to nonnegative solutions"


def _eigen_orders():
    R = 1.0
    errs_lap, errs_helm = [], []
    for M in (64, 128, 256):
        g = grid_mod.build_radial_grid(1, R, M)
        f = np.cos(math.pi * g.r_centers / R)
        errs_lap.append(np.max(np.abs(grid_mod.apply_laplacian(g, f) + (math.pi / R) ** 2 * f)))
        rhs = (1.0 + (math.pi / R) ** 2) * f
        errs_helm.append(np.max(np.abs(grid_mod.helmholtz_solve(g, rhs) - f)))
    orders = [math.log2(errs_lap[k] / errs_lap[k + 1]) for k in range(2)]
    orders += [math.log2(errs_helm[k] / errs_helm[k + 1]) for k in range(2)]
    return orders


def _check_grid_order():
    orders = _eigen_orders()
    ok = all(abs(p - 2.0) <= 0.1 for p in orders)
    return ok, "empirical orders " + ", ".join(f"{p:.3f}" for p in orders)


def _check_grid_self_adjoint():
    rng = np.random.default_rng(7)
    g = grid_mod.build_radial_grid(3, 1.0, 64)
    f = rng.standard_normal(g.M)
    q = rng.standard_normal(g.M)
    lhs = grid_mod.integrate(g, f * grid_mod.apply_laplacian(g, q))
    rhs = grid_mod.integrate(g, q * grid_mod.apply_laplacian(g, f))
    denom = max(abs(lhs), abs(rhs), 1e-300)
    rel = abs(lhs - rhs) / denom
    return rel <= 1e-11, f"symmetry defect {rel:.2e} (tol 1e-11)"


# --------------------------------------------------------------- motility


def _check_motility_derivative():
    rng = np.random.default_rng(321)
    worst = 0.0
    for spec in (mot_mod.exponential_motility(), mot_mod.power_law_motility(2.0),
                 mot_mod.power_law_motility(0.7)):
        s = rng.random(1000) * 50.0
        h = 1e-6 * (1.0 + s)
        fd = (spec.gamma(s + h) - spec.gamma(s - h)) / (2.0 * h)
        rel = np.max(np.abs(fd - spec.dgamma(s)) / np.maximum(np.abs(spec.dgamma(s)), 1e-300))
        worst = max(worst, float(rel))
    return worst <= 1e-6, f"max derivative mismatch {worst:.2e} (tol 1e-6)"


def _check_motility_gamma0_max():
    s = np.linspace(0.0, 200.0, 4000)
    for spec in (mot_mod.exponential_motility(), mot_mod.power_law_motility(3.0)):
        if mot_mod.eval_gamma(spec, 0.0) < np.max(np.asarray(spec.gamma(s))):
            return False, f"gamma(0) is not the maximum for {spec.label}"
    return True, "gamma(0) dominates sampled range for built-in kinds"


# ---------------------------------------------------------------- stepper


def _check_stepper_equilibrium():
    g = grid_mod.build_radial_grid(3, 1.0, 48)
    spec = mot_mod.exponential_motility()
    state = step_mod.State(0.0, np.full(g.M, 1.5), np.full(g.M, 1.5))
    s = state
    for _ in range(1000):
        s = step_mod.step(g, spec, s, 0.1)
    ok = np.array_equal(s.u, state.u) and np.array_equal(s.v, state.v)
    return ok, "constant state bitwise invariant over 1000 steps"


def _check_stepper_mass():
    g = grid_mod.build_radial_grid(3, 1.0, 96)
    spec = mot_mod.exponential_motility()
    u = 0.3 + 2.0 * np.exp(-((g.r_centers / 0.3) ** 2))
    s = step_mod.State(0.0, u, grid_mod.helmholtz_solve(g, u))
    m0 = grid_mod.integrate(g, s.u)
    worst = 0.0
    for _ in range(200):
        prev = grid_mod.integrate(g, s.u)
        s = step_mod.step(g, spec, s, 2e-3)
        worst = max(worst, abs(grid_mod.integrate(g, s.u) - prev))
    rel = worst / m0
    return rel <= 1e-12, f"max per-step mass drift {rel:.2e} relative (tol 1e-12)"


def _check_stepper_positivity():
    g = grid_mod.build_radial_grid(3, 1.0, 128)
    spec = mot_mod.exponential_motility()
    u = np.where(g.r_centers < 0.15, 50.0, 1e-9)
    s = step_mod.State(0.0, u, np.zeros(g.M))
    floor = 0.0
    for _ in range(100):
        s = step_mod.step(g, spec, s, 1e-3)
        floor = min(floor, float(np.min(s.u)), float(np.min(s.v)))
    return floor >= 0.0, f"minimum field value along the run: {floor:.2e}"


def _check_stepper_identity_refinement():
    # defect of the one-step auxiliary identity: halves with dt at fixed h,
    # quarters with h on restricted near-exact states
    spec = mot_mod.exponential_motility()
    g = grid_mod.build_radial_grid(1, 1.0, 256)

    def smooth(grid):
        u = 1.0 + 0.4 * np.cos(math.pi * grid.r_centers / grid.R)
        v = 1.0 + 0.3 * np.cos(math.pi * grid.r_centers / grid.R)
        return step_mod.State(0.0, u, v)

    res = []
    for dt in (2e-3, 1e-3):
        s = smooth(g)
        for _ in range(6):
            s = step_mod.step(g, spec, s, dt)
        nxt = step_mod.step(g, spec, s, dt)
        res.append(diag_mod.w_identity_residual(g, spec, s, nxt, dt))
    dt_ratio = res[0] / res[1]

    fine = grid_mod.build_radial_grid(1, 1.0, 256)
    s = smooth(fine)
    dt_ref = 1e-6
    for _ in range(4):
        s = step_mod.step(fine, spec, s, dt_ref)
    nxt = step_mod.step(fine, spec, s, dt_ref)
    res_h = []
    for M in (16, 32, 64):
        coarse = grid_mod.build_radial_grid(1, 1.0, M)
        p = step_mod.State(s.t, grid_mod.restrict_volume_average(fine, coarse, s.u),
                           grid_mod.restrict_volume_average(fine, coarse, s.v))
        nn = step_mod.State(nxt.t, grid_mod.restrict_volume_average(fine, coarse, nxt.u),
                            grid_mod.restrict_volume_average(fine, coarse, nxt.v))
        res_h.append(diag_mod.w_identity_residual(coarse, spec, p, nn, dt_ref))
    h_orders = [math.log2(res_h[k] / res_h[k + 1]) for k in range(2)]
    ok = 1.7 <= dt_ratio <= 2.3 and all(1.7 <= p <= 2.3 for p in h_orders)
    return ok, (f"dt-halving ratio {dt_ratio:.2f}; h-orders " +
                ", ".join(f"{p:.2f}" for p in h_orders))


# ------------------------------------------------------------ diagnostics


def _relaxing_bump_run(sample_every=0.25, T_end=10.0):
    g = grid_mod.build_radial_grid(3, 1.0, 96)
    spec = mot_mod.exponential_motility()
    st = scen_mod.make_initial(g, scen_mod.small_mass_bump(2.0, 0.4))
    ctl = step_mod.StepControl(dt_init=1e-4, dt_min=1e-12, dt_max=0.25)
    return g, spec, step_mod.run(g, spec, st, T_end=T_end, ctl=ctl, sample_every=sample_every)


def _check_energy_monotone():
    _, _, result = _relaxing_bump_run()
    F = [r.F for r in result.records]
    worst = max((F[j + 1] - F[j]) - 1e-6 * (1.0 + abs(F[j])) for j in range(len(F) - 1))
    return worst <= 0.0, f"max tolerated-uptick excess {worst:.2e} (must be <= 0)"


def _check_dissipation_consistency():
    # the identity-consistent residual (half gradient coefficient plus the
    # explicit signal-rate term) decreases under dt refinement; the
    # printed-normalization offset and best-fit gradient coefficient are
    # reported alongside, not asserted
    g = grid_mod.build_radial_grid(1, 1.0, 192)
    spec = mot_mod.exponential_motility()
    u = 0.5 + 2.0 * np.exp(-((g.r_centers / 0.3) ** 2))
    v0 = grid_mod.helmholtz_solve(g, u)
    t_settle = 0.05
    vals = []
    raws = []
    thetas = []
    for dt in (2e-3, 1e-3, 5e-4):
        s = step_mod.State(0.0, u.copy(), v0.copy())
        for _ in range(round(t_settle / dt)):
            s = step_mod.step(g, spec, s, dt)
        a_num = b_num = bb = 0.0
        corr = raw = 0.0
        for _ in range(8):
            nxt = step_mod.step(g, spec, s, dt)
            res = diag_mod.energy_identity_residuals(g, s, nxt, dt)
            corr = max(corr, abs(res["corrected"]))
            raw = max(raw, abs(res["raw"]))
            a = res["raw"] + res["vt_squared"]
            b = res["grad_rate"]
            a_num += a * b
            bb += b * b
            s = nxt
        vals.append(corr)
        raws.append(raw)
        thetas.append(1.0 - a_num / bb if bb > 0 else float("nan"))
    decreasing = vals[0] > vals[1] > vals[2]
    return decreasing, (f"corrected residuals {vals[0]:.2e} > {vals[1]:.2e} > {vals[2]:.2e}; "
                        f"printed-normalization offsets ~{raws[-1]:.2e}; "
                        f"best-fit gradient coefficient ~{thetas[-1]:.3f}")


def _check_w_bounds():
    g, _, result = _relaxing_bump_run()
    margins = [r.w_growth_margin for r in result.records]
    st = scen_mod.make_initial(g, scen_mod.small_mass_bump(2.0, 0.4))
    sup_w0 = float(np.max(grid_mod.helmholtz_solve(g, st.u)))
    ok = max(margins) <= 1e-6 * sup_w0
    return ok, f"max growth margin {max(margins):.2e} (tol {1e-6 * sup_w0:.2e})"


def _check_classifier():
    t1 = np.linspace(0.05, 50.0, 60)
    c1 = diag_mod.classify_blowup(t1, 5.0 + np.exp(-t1))
    t2 = np.linspace(0.4, 50.0, 80)
    c2 = diag_mod.classify_blowup(t2, np.exp(0.3 * t2))
    t3 = np.linspace(0.01, 1.8, 40)
    c3 = diag_mod.classify_blowup(t3, (1.0 - t3 / 2.0) ** (-1.0))
    ok = (c1.label == "Bounded" and c2.label == "InfiniteTimeGrowth"
          and c3.label == "FiniteTimeLike"
          and abs(c3.fits["finite_time"]["T_star"] - 2.0) <= 0.1)
    inv = (diag_mod.classify_blowup(2.0 * t1 + 0.01, 3.0 * (5.0 + np.exp(-t1))).label == "Bounded"
           and diag_mod.classify_blowup(t2, 4.0 * np.exp(0.3 * t2)).label == "InfiniteTimeGrowth")
    return ok and inv, (f"labels {c1.label}/{c2.label}/{c3.label}, "
                        f"T*={c3.fits['finite_time']['T_star']:.3f}, rescale-invariant={inv}")


# -------------------------------------------------------------- scenarios


def _check_scenario_mass():
    g = grid_mod.build_radial_grid(3, 1.0, 256)
    worst = 0.0
    for spec in (scen_mod.small_mass_bump(3.0, 0.3), scen_mod.negative_energy_bump(50.0, 0.0625),
                 scen_mod.negative_energy_bump(10.0, 0.125)):
        st = scen_mod.make_initial(g, spec)
        m = spec.params["m"]
        worst = max(worst, abs(grid_mod.integrate(g, st.u) - m) / m)
    return worst <= 1e-10, f"max relative mass defect {worst:.2e} (tol 1e-10)"


def _check_scenario_ladder():
    g = grid_mod.build_radial_grid(3, 1.0, 256)
    F = [scen_mod.energy_report(g, scen_mod.make_initial(g, scen_mod.negative_energy_bump(50.0, eps))).F
         for eps in (1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0)]
    ok = F[0] > F[1] > F[2]
    return ok, "F ladder " + " > ".join(f"{x:.1f}" for x in F)


def _check_scenario_boundary():
    g = grid_mod.build_radial_grid(3, 1.0, 128)
    st = scen_mod.make_initial(g, scen_mod.negative_energy_bump(10.0, 0.125))
    ok = st.u[-1] == 0.0 and st.u[-2] == 0.0
    stc = scen_mod.make_initial(g, scen_mod.constant_scenario(2.0))
    ok = ok and stc.u[-1] == stc.u[-2]
    return ok, "compact bumps vanish at the outer cells; constants are flat"


SUITES = {
    "grid": [
        ("grid.conservation", _check_grid_conservation),
        ("grid.maximum_principle", _check_grid_max_principle),
        ("grid.order_of_accuracy", _check_grid_order),
        ("grid.self_adjointness", _check_grid_self_adjoint),
    ],
    "motility": [
        ("motility.derivative_consistency", _check_motility_derivative),
        ("motility.gamma0_is_max", _check_motility_gamma0_max),
    ],
    "stepper": [
        ("stepper.equilibrium_exactness", _check_stepper_equilibrium),
        ("stepper.mass_conservation", _check_stepper_mass),
        ("stepper.positivity", _check_stepper_positivity),
        ("stepper.identity_refinement", _check_stepper_identity_refinement),
    ],
    "diagnostics": [
        ("diagnostics.energy_monotone", _check_energy_monotone),
        ("diagnostics.dissipation_consistency", _check_dissipation_consistency),
        ("diagnostics.w_bounds", _check_w_bounds),
        ("diagnostics.blowup_classifier", _check_classifier),
    ],
    "scenarios": [
        ("scenarios.mass_accuracy", _check_scenario_mass),
        ("scenarios.energy_ladder", _check_scenario_ladder),
        ("scenarios.boundary_compatibility", _check_scenario_boundary),
    ],
}


def run_suite(name: str):
    """Execute one suite (or 'all'); returns (all_ok, rows)."""
    if name == "all":
        checks = [c for suite in SUITES.values() for c in suite]
    elif name in SUITES:
        checks = SUITES[name]
    else:
        raise KeyError(name)
    rows = []
    all_ok = True
    for label, fn in checks:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"check raised {type(exc).__name__}: {exc}"
        rows.append((label, ok, detail))
        all_ok = all_ok and ok
    return all_ok, rows
