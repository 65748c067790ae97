"""Motility functions gamma(s) and validation of the standing assumptions.

A motility is admissible when gamma is positive and nonincreasing on
[0, infinity); the decay of gamma at infinity is additionally required
for long-time statements, so its failure is reported as a warning rather
than an error.  Smoothness beyond first derivatives is assumed, not
checked: custom evaluators are black boxes here.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError

DEFAULT_S_MAX = 50.0
DEFAULT_VANISH_TOL = 1e-3


@dataclass(frozen=True)
class MotilitySpec:
    kind: str                       # "exponential" | "powerlaw" | "custom"
    gamma: Callable[[np.ndarray], np.ndarray]
    dgamma: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)
    label: str = ""


def exponential_motility() -> MotilitySpec:
    """gamma(s) = exp(-s)."""
    return MotilitySpec(
        kind="exponential",
        gamma=lambda s: np.exp(-np.asarray(s, dtype=float)),
        dgamma=lambda s: -np.exp(-np.asarray(s, dtype=float)),
        label="exp(-s)",
    )


def power_law_motility(k: float) -> MotilitySpec:
    """gamma(s) = (1+s)^(-k) with k > 0."""
    if not (k > 0.0):
        raise ConfigError(f"power-law exponent must be positive, got {k}")
    return MotilitySpec(
        kind="powerlaw",
        gamma=lambda s: (1.0 + np.asarray(s, dtype=float)) ** (-k),
        dgamma=lambda s: -k * (1.0 + np.asarray(s, dtype=float)) ** (-k - 1.0),
        params={"k": k},
        label=f"(1+s)^-{k:g}",
    )


def custom_motility(gamma, dgamma, label="custom") -> MotilitySpec:
    return MotilitySpec(kind="custom", gamma=gamma, dgamma=dgamma, label=label)


def eval_gamma(spec: MotilitySpec, s):
    """Evaluate gamma at s >= 0 (scalar or array)."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0.0):
        raise ValueError("motility argument must be nonnegative")
    out = spec.gamma(s_arr)
    if np.isscalar(s) or s_arr.ndim == 0:
        return float(out)
    return np.asarray(out, dtype=float)


@dataclass(frozen=True)
class ValidationReport:
    positivity_ok: bool
    monotonicity_ok: bool
    derivative_ok: bool
    vanishing_ok: bool
    gamma0: float
    gamma_at_smax: float
    max_derivative_mismatch: float
    s_max: float
    samples: int
    vanish_tol: float
    messages: tuple

    @property
    def core_ok(self) -> bool:
        """Positivity + monotonicity (+ consistent derivative); the decay
        condition is reported separately as it only matters for long runs."""
        return self.positivity_ok and self.monotonicity_ok and self.derivative_ok

    def as_dict(self) -> dict:
        return {
            "positivity_ok": self.positivity_ok,
            "monotonicity_ok": self.monotonicity_ok,
            "derivative_ok": self.derivative_ok,
            "vanishing_ok": self.vanishing_ok,
            "core_ok": self.core_ok,
            "gamma0": self.gamma0,
            "gamma_at_smax": self.gamma_at_smax,
            "max_derivative_mismatch": self.max_derivative_mismatch,
            "s_max": self.s_max,
            "samples": self.samples,
            "vanish_tol": self.vanish_tol,
            "messages": list(self.messages),
        }


def validate_motility(spec: MotilitySpec, s_max: float = DEFAULT_S_MAX,
                      samples: int = 1000, vanish_tol: float = DEFAULT_VANISH_TOL) -> ValidationReport:
    """Check positivity, monotonicity and decay by dense sampling on [0, s_max].

    The derivative is cross-checked against centered finite differences;
    custom evaluators whose dgamma disagrees with gamma are flagged.
    """
    if not (s_max > 0.0):
        raise ConfigError(f"s_max must be positive, got {s_max}")
    if samples < 100:
        raise ConfigError(f"need at least 100 samples, got {samples}")

    s = np.linspace(0.0, s_max, samples)
    g = np.asarray(spec.gamma(s), dtype=float)
    dg = np.asarray(spec.dgamma(s), dtype=float)
    messages = []

    positivity_ok = bool(np.all(np.isfinite(g)) and np.all(g > 0.0))
    if not positivity_ok:
        messages.append("gamma is not strictly positive on the sampled range")

    monotonicity_ok = bool(np.all(dg <= 0.0) and np.all(np.diff(g) <= 1e-14 * np.max(np.abs(g))))
    if not monotonicity_ok:
        messages.append("gamma' > 0 somewhere: motility must be nonincreasing")

    # finite-difference cross-check on interior points, relative to local scale
    hstep = 1e-6 * (1.0 + s[1:-1])
    fd = (np.asarray(spec.gamma(s[1:-1] + hstep)) - np.asarray(spec.gamma(s[1:-1] - hstep))) / (2.0 * hstep)
    scale = np.maximum(np.abs(dg[1:-1]), np.max(np.abs(g)) * 1e-12)
    mismatch = float(np.max(np.abs(fd - dg[1:-1]) / scale)) if len(s) > 2 else 0.0
    derivative_ok = mismatch <= 1e-4
    if not derivative_ok:
        messages.append(f"dgamma disagrees with finite differences (rel {mismatch:.2e})")

    gamma0 = float(g[0])
    gamma_at_smax = float(g[-1])
    vanishing_ok = gamma_at_smax < vanish_tol
    if not vanishing_ok:
        messages.append(
            f"gamma({s_max:g}) = {gamma_at_smax:.3e} >= {vanish_tol:g}: decay at infinity not evident "
            "(warning: long-time statements assume it)")

    return ValidationReport(
        positivity_ok=positivity_ok,
        monotonicity_ok=monotonicity_ok,
        derivative_ok=derivative_ok,
        vanishing_ok=vanishing_ok,
        gamma0=gamma0,
        gamma_at_smax=gamma_at_smax,
        max_derivative_mismatch=mismatch,
        s_max=float(s_max),
        samples=samples,
        vanish_tol=float(vanish_tol),
        messages=tuple(messages),
    )
