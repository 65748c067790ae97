"""Per-state and per-trajectory diagnostics.

Everything here is a pure function of grid + states.  The quantities:

* ``lyapunov``: F = int u log u - int u v + 1/2 int v^2 + int |grad v|^2,
  with the convention 0 log 0 = 0 and a 1e-300 floor inside logarithms.
* ``dissipation``: face quadrature of u e^{-v} |grad(log u - v)|^2, the decay
  rate paired with F when gamma(s) = e^{-s}.
* ``aux_w``: the auxiliary field w solving (I - Lap) w = u.
* ``w_identity_residual``: sup-norm defect of the discrete evolution identity
  (w+ - w-)/dt + gamma(v) u - (I-Lap)^{-1}[gamma(v) u] across one time step.
* ``w_growth_margin``: sup of w(t) - w0 * exp(gamma(0) t); nonpositive up to
  discretization error.
* ``vw_ratio``: sup of v / (w + 1); the comparison constant is not
  constructive, so runs monitor boundedness of the running maximum.
* ``classify_blowup``: label a (t, sup u) series as Bounded /
  InfiniteTimeGrowth / FiniteTimeLike from tail fits.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import RadialGrid, gradient_squared_integral, helmholtz_solve, integrate
from .motility import MotilitySpec

LOG_FLOOR = 1e-300
# classification thresholds (artifact choices, echoed into run metadata)
R2_MIN = 0.98
BOUNDED_GROWTH_PER_DECADE = 0.01
TSTAR_HORIZON_FACTOR = 3.0
_EXP_CLAMP = 600.0  # caps gamma(0)*t inside exp() on very long horizons


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    dt_used: float
    mass: float
    F: float
    D: Optional[float]  # None when the motility is not exponential
    w_identity_residual: float
    w_growth_margin: float
    vw_ratio: float
    sup_u: float
    sup_v: float
    min_u: float


def lyapunov(grid: RadialGrid, state) -> float:
    u = np.asarray(state.u, dtype=float)
    v = np.asarray(state.v, dtype=float)
    xlogx = np.where(u > 0.0, u * np.log(np.maximum(u, LOG_FLOOR)), 0.0)
    entropy = integrate(grid, xlogx)
    interaction = integrate(grid, u * v)
    quad = 0.5 * integrate(grid, v * v)
    grad = gradient_squared_integral(grid, v)
    return entropy - interaction + quad + grad


def dissipation(grid: RadialGrid, state) -> float:
    """Decay-rate quadrature for exponential motility; cells below the log
    floor contribute nothing."""
    u = np.asarray(state.u, dtype=float)
    v = np.asarray(state.v, dtype=float)
    ok = (u[:-1] > LOG_FLOOR) & (u[1:] > LOG_FLOOR)
    if not np.any(ok):
        return 0.0
    dlog = np.zeros(grid.M - 1)
    dlog[ok] = (np.log(u[1:][ok]) - np.log(u[:-1][ok]) - (v[1:][ok] - v[:-1][ok])) / grid.h
    ubar = 0.5 * (u[:-1] + u[1:])
    vbar = 0.5 * (v[:-1] + v[1:])
    weights = grid.face_areas[1:-1] * grid.h
    terms = np.where(ok, weights * ubar * np.exp(-vbar) * dlog**2, 0.0)
    return float(np.sum(terms))


def aux_w(grid: RadialGrid, state) -> np.ndarray:
    return helmholtz_solve(grid, np.asarray(state.u, dtype=float))


def w_identity_residual(grid: RadialGrid, spec: MotilitySpec, prev, next_state,
                        dt: float, u_level: str = "next") -> float:
    """Defect of the one-step auxiliary identity, sup norm.

    The pointwise term uses gamma frozen at the earlier state (matching the
    scheme); ``u_level`` selects which time level enters it ("next" is the
    scheme-consistent choice, "prev" is also reported by the verify suite).
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    w_prev = helmholtz_solve(grid, np.asarray(prev.u, dtype=float))
    w_next = helmholtz_solve(grid, np.asarray(next_state.u, dtype=float))
    gam = np.asarray(spec.gamma(np.asarray(prev.v, dtype=float)), dtype=float)
    lifted = helmholtz_solve(grid, gam * np.asarray(prev.u, dtype=float))
    if u_level == "next":
        u_mid = np.asarray(next_state.u, dtype=float)
    elif u_level == "prev":
        u_mid = np.asarray(prev.u, dtype=float)
    else:
        raise ValueError(f"u_level must be 'next' or 'prev', got {u_level!r}")
    res = (w_next - w_prev) / dt + gam * u_mid - lifted
    return float(np.max(np.abs(res)))


def w_growth_margin(grid: RadialGrid, state, w0: np.ndarray, gamma0: float) -> float:
    w = aux_w(grid, state)
    expo = min(gamma0 * state.t, _EXP_CLAMP)
    bound = np.asarray(w0, dtype=float) * np.exp(expo)
    return float(np.max(w - bound))


def vw_ratio(grid: RadialGrid, state) -> float:
    w = aux_w(grid, state)
    return float(np.max(np.asarray(state.v, dtype=float) / (w + 1.0)))


def build_record(grid: RadialGrid, spec: MotilitySpec, prev, state, dt_used: float,
                 w0: np.ndarray, gamma0: float) -> DiagnosticsRecord:
    u = np.asarray(state.u, dtype=float)
    v = np.asarray(state.v, dtype=float)
    d_val = dissipation(grid, state) if spec.kind == "exponential" else None
    if prev is not None and dt_used > 0.0:
        residual = w_identity_residual(grid, spec, prev, state, dt_used)
    else:
        residual = 0.0
    return DiagnosticsRecord(
        t=float(state.t),
        dt_used=float(dt_used),
        mass=integrate(grid, u),
        F=lyapunov(grid, state),
        D=d_val,
        w_identity_residual=residual,
        w_growth_margin=w_growth_margin(grid, state, w0, gamma0),
        vw_ratio=vw_ratio(grid, state),
        sup_u=float(np.max(u)),
        sup_v=float(np.max(v)),
        min_u=float(np.min(u)),
    )


def energy_identity_residuals(grid: RadialGrid, prev, next_state, dt: float) -> dict:
    """Defects of the energy-decay identity across one step, two normalizations.

    ``raw`` pairs the functional as printed (gradient coefficient 1) with the
    single dissipation term: dF/dt + D.  Along trajectories it converges to a
    finite offset carrying the signal's time-derivative terms, so it is
    reported rather than asserted.  ``corrected`` uses the half-coefficient
    functional together with the explicit rate term:
    d(F - 1/2 int |grad v|^2)/dt + D + int v_t^2, which vanishes under
    refinement.  ``grad_rate`` (d/dt of the gradient integral) lets callers
    fit the gradient coefficient that best closes the identity.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    f_prev = lyapunov(grid, prev)
    f_next = lyapunov(grid, next_state)
    g_prev = gradient_squared_integral(grid, np.asarray(prev.v, dtype=float))
    g_next = gradient_squared_integral(grid, np.asarray(next_state.v, dtype=float))
    d_val = dissipation(grid, prev)
    vt = (np.asarray(next_state.v, dtype=float) - np.asarray(prev.v, dtype=float)) / dt
    vt_sq = integrate(grid, vt * vt)
    raw = (f_next - f_prev) / dt + d_val
    corrected = ((f_next - 0.5 * g_next) - (f_prev - 0.5 * g_prev)) / dt + d_val + vt_sq
    return {
        "raw": raw,
        "corrected": corrected,
        "grad_rate": (g_next - g_prev) / dt,
        "vt_squared": vt_sq,
        "dissipation": d_val,
    }


# ------------------------------------------------------------------ blow-up


@dataclass(frozen=True)
class BlowupClassification:
    label: str  # "Bounded" | "InfiniteTimeGrowth" | "FiniteTimeLike"
    growth_per_decade: float
    fits: dict
    n_samples: int
    t_range: tuple

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "growth_per_decade": self.growth_per_decade,
            "fits": self.fits,
            "n_samples": self.n_samples,
            "t_range": list(self.t_range),
            "thresholds": {
                "r_squared_min": R2_MIN,
                "bounded_growth_per_decade": BOUNDED_GROWTH_PER_DECADE,
                "t_star_horizon_factor": TSTAR_HORIZON_FACTOR,
            },
        }


def _linfit(x: np.ndarray, y: np.ndarray):
    """Least-squares line y = a + b x; returns (b, r_squared)."""
    xm = x - x.mean()
    ym = y - y.mean()
    ss_tot = float(np.dot(ym, ym))
    denom = float(np.dot(xm, xm))
    if denom <= 0.0 or ss_tot <= 1e-20:
        return 0.0, 0.0
    b = float(np.dot(xm, ym) / denom)
    resid = ym - b * xm
    r2 = 1.0 - float(np.dot(resid, resid)) / ss_tot
    return b, r2


def classify_blowup(times, sup_values) -> BlowupClassification:
    """Classify the tail of a sup-norm series.

    Precedence: a finite-time power fit sup ~ C (T*-t)^{-p} with extrapolated
    T* inside TSTAR_HORIZON_FACTOR times the horizon wins first; otherwise
    tail growth below BOUNDED_GROWTH_PER_DECADE means Bounded; otherwise a
    good power-law or exponential fit means InfiniteTimeGrowth.  Ambiguous
    series get the label of the best-R^2 fit, with all fit data attached.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(sup_values, dtype=float)
    keep = np.isfinite(t) & np.isfinite(y) & (t > 0.0) & (y > 0.0)
    t, y = t[keep], y[keep]
    order = np.argsort(t)
    t, y = t[order], y[order]
    if len(t) < 20:
        raise ValueError(f"need at least 20 positive-time samples, got {len(t)}")
    if t[-1] / t[0] < 100.0 * (1.0 - 1e-12):
        raise ValueError("samples must span at least two decades of t")

    half = len(t) // 2
    tt, yy = t[half:], y[half:]
    ly = np.log(yy)
    t_max = float(tt[-1])

    # (c) finite-time-like: scan extrapolated singularity times
    ft = {"T_star": None, "p": None, "r_squared": 0.0}
    if float(np.max(ly) - np.min(ly)) > 1e-12:
        q_grid = np.logspace(-4.0, 1.0, 600)
        best = (0.0, None, None)
        for q in q_grid:
            T_star = t_max * (1.0 + q)
            slope, r2 = _linfit(np.log(T_star - tt), ly)
            if slope < 0.0 and r2 > best[0]:
                best = (r2, T_star, -slope)
        ft = {"T_star": best[1], "p": best[2], "r_squared": best[0]}
    finite_ok = (
        ft["r_squared"] >= R2_MIN
        and ft["p"] is not None
        and ft["p"] > 0.0
        and ft["T_star"] <= TSTAR_HORIZON_FACTOR * t_max
    )

    # (a) bounded: relative growth per decade of t on the tail
    slope_dec, _ = _linfit(np.log10(tt), ly)
    growth_per_decade = float(np.expm1(slope_dec))

    # (b) unbounded trends: power law in t and exponential in t
    alpha, r2_pow = _linfit(np.log(tt), ly)
    beta, r2_exp = _linfit(tt, ly)
    fits = {
        "finite_time": ft,
        "power": {"exponent": alpha, "r_squared": r2_pow},
        "exponential": {"rate": beta, "r_squared": r2_exp},
    }

    if finite_ok:
        label = "FiniteTimeLike"
    elif growth_per_decade < BOUNDED_GROWTH_PER_DECADE:
        label = "Bounded"
    elif (r2_pow >= R2_MIN and alpha > 0.0) or (r2_exp >= R2_MIN and beta > 0.0):
        label = "InfiniteTimeGrowth"
    else:
        # ambiguous: best-R^2 fit decides, values attached for inspection;
        # a finite-time candidate only counts with T* inside the horizon factor
        candidates = []
        if ft["p"] is not None and ft["p"] > 0.0 and ft["T_star"] <= TSTAR_HORIZON_FACTOR * t_max:
            candidates.append((ft["r_squared"], "FiniteTimeLike"))
        if alpha > 0.0:
            candidates.append((r2_pow, "InfiniteTimeGrowth"))
        if beta > 0.0:
            candidates.append((r2_exp, "InfiniteTimeGrowth"))
        candidates.sort(key=lambda c: c[0])
        label = candidates[-1][1] if candidates[-1][0] > 0.0 else "Bounded"

    return BlowupClassification(
        label=label,
        growth_per_decade=growth_per_decade,
        fits=fits,
        n_samples=len(t),
        t_range=(float(t[0]), float(t[-1])),
    )
