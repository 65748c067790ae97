"""Geometry and operator tests for the radial finite-volume grid.

Expected values come from closed forms (ball volumes, Neumann eigenfunctions)
or from independent oracles computed in-test: dense LU solves of the same
tridiagonal matrix, scipy quadrature, and Richardson-style refinement ladders.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from chemolab.errors import ConfigError
from chemolab.grid import (
    RadialGrid,
    apply_laplacian,
    build_radial_grid,
    gradient_squared_integral,
    helmholtz_solve,
    integrate,
)


def ball_volume(n, R):
    return math.pi ** (n / 2.0) * R**n / math.gamma(n / 2.0 + 1.0)


def dense_helmholtz_matrix(g: RadialGrid) -> np.ndarray:
    """Assemble (I - Laplacian) densely, straight from the flux formula."""
    A = np.zeros((g.M, g.M))
    for i in range(g.M):
        a_lo = g.face_areas[i] if i > 0 else 0.0
        a_hi = g.face_areas[i + 1] if i < g.M - 1 else 0.0
        A[i, i] = 1.0 + (a_lo + a_hi) / (g.cell_volumes[i] * g.h)
        if i > 0:
            A[i, i - 1] = -a_lo / (g.cell_volumes[i] * g.h)
        if i < g.M - 1:
            A[i, i + 1] = -a_hi / (g.cell_volumes[i] * g.h)
    return A


# ---------------------------------------------------------------- geometry


def test_volume_n3_unit_ball():
    for M in (4, 17, 64, 256):
        g = build_radial_grid(3, 1.0, M)
        assert abs(g.cell_volumes.sum() - 4.0 * math.pi / 3.0) <= 1e-12 * (4.0 * math.pi / 3.0)


def test_volume_n1_is_interval_measure():
    g = build_radial_grid(1, 1.0, 10)
    assert abs(g.cell_volumes.sum() - 2.0) <= 1e-12 * 2.0


def test_volume_n5_R2_against_gamma_function():
    # pi^{5/2} * 2^5 / Gamma(7/2) = 256 pi^2 / 15 = 168.4412484452584
    g = build_radial_grid(5, 2.0, 64)
    exact = ball_volume(5, 2.0)
    assert abs(exact - 168.4412484452584) < 1e-12 * exact
    assert abs(g.cell_volumes.sum() - exact) <= 1e-12 * exact


@pytest.mark.parametrize("n,R,M", [(1, 1.0, 4), (2, 0.5, 9), (3, 2.5, 33), (4, 1.0, 50), (5, 3.0, 128)])
def test_volume_sum_matches_gamma_formula(n, R, M):
    g = build_radial_grid(n, R, M)
    exact = ball_volume(n, R)
    assert abs(g.cell_volumes.sum() - exact) <= 1e-12 * exact


def test_mesh_layout():
    g = build_radial_grid(3, 2.0, 8)
    assert g.r_faces[0] == 0.0
    assert g.r_faces[-1] == 2.0
    assert g.h == pytest.approx(0.25)
    assert np.all(np.diff(g.r_centers) > 0)
    assert np.all(g.r_centers > g.r_faces[:-1])
    assert np.all(g.r_centers < g.r_faces[1:])


@pytest.mark.parametrize("n,R,M", [(0, 1.0, 8), (-1, 1.0, 8), (3, 0.0, 8), (3, -2.0, 8), (3, 1.0, 3)])
def test_bad_grid_parameters_rejected(n, R, M):
    with pytest.raises(ConfigError):
        build_radial_grid(n, R, M)


# ---------------------------------------------------------------- laplacian


def test_laplacian_of_constant_is_zero_exactly():
    g = build_radial_grid(3, 1.0, 32)
    f = np.full(g.M, 3.7)
    out = apply_laplacian(g, f)
    assert np.all(out == 0.0)


def test_laplacian_eigenfunction_order_two():
    # n=1 Neumann eigenfunction cos(pi r / R): Laplacian -> -(pi/R)^2 f + O(h^2)
    R = 1.0
    errs = []
    for M in (64, 128, 256):
        g = build_radial_grid(1, R, M)
        f = np.cos(math.pi * g.r_centers / R)
        lap = apply_laplacian(g, f)
        errs.append(np.max(np.abs(lap + (math.pi / R) ** 2 * f)))
    orders = [math.log2(errs[k] / errs[k + 1]) for k in range(len(errs) - 1)]
    for p in orders:
        assert abs(p - 2.0) <= 0.1


def test_laplacian_discrete_conservation_example():
    # random field, n=3, M=32: the weighted sum of the Laplacian telescopes to zero
    rng = np.random.default_rng(12345)
    g = build_radial_grid(3, 1.0, 32)
    f = rng.random(g.M)
    total = integrate(g, apply_laplacian(g, f))
    assert abs(total) <= 1e-13 * np.max(np.abs(f))


@pytest.mark.parametrize("n,M,seed", [(1, 64, 0), (2, 48, 1), (3, 128, 2), (4, 64, 3)])
def test_laplacian_conservation_property(n, M, seed):
    rng = np.random.default_rng(seed)
    g = build_radial_grid(n, 1.5, M)
    f = rng.standard_normal(g.M)
    total = integrate(g, apply_laplacian(g, f))
    assert abs(total) <= 1e-12 * np.max(np.abs(f)) * g.cell_volumes.sum()


def test_laplacian_self_adjoint():
    rng = np.random.default_rng(7)
    g = build_radial_grid(3, 1.0, 64)
    f = rng.standard_normal(g.M)
    q = rng.standard_normal(g.M)
    lhs = integrate(g, f * apply_laplacian(g, q))
    rhs = integrate(g, q * apply_laplacian(g, f))
    denom = max(abs(lhs), abs(rhs))
    assert abs(lhs - rhs) <= 1e-11 * denom


def test_laplacian_length_mismatch():
    g = build_radial_grid(3, 1.0, 16)
    with pytest.raises(ValueError):
        apply_laplacian(g, np.ones(17))


# ---------------------------------------------------------------- helmholtz


def test_helmholtz_constant():
    g = build_radial_grid(3, 1.0, 24)
    f = np.full(g.M, 2.5)
    w = helmholtz_solve(g, f)
    assert np.max(np.abs(w - 2.5)) <= 1e-12


def test_helmholtz_eigenfunction_order_two():
    R = 1.0
    errs = []
    for M in (64, 128, 256):
        g = build_radial_grid(1, R, M)
        target = np.cos(math.pi * g.r_centers / R)
        f = (1.0 + (math.pi / R) ** 2) * target
        w = helmholtz_solve(g, f)
        errs.append(np.max(np.abs(w - target)))
    orders = [math.log2(errs[k] / errs[k + 1]) for k in range(len(errs) - 1)]
    for p in orders:
        assert abs(p - 2.0) <= 0.1


def test_helmholtz_matches_dense_lu():
    rng = np.random.default_rng(99)
    g = build_radial_grid(3, 1.0, 48)
    f = rng.random(g.M)
    w = helmholtz_solve(g, f)
    w_dense = np.linalg.solve(dense_helmholtz_matrix(g), f)
    assert np.max(np.abs(w - w_dense)) <= 1e-12


def test_helmholtz_residual():
    rng = np.random.default_rng(5)
    for n, M in ((1, 64), (3, 128), (4, 256)):
        g = build_radial_grid(n, 1.0, M)
        f = rng.standard_normal(g.M)
        w = helmholtz_solve(g, f)
        resid = np.max(np.abs(np.asarray(dense_helmholtz_matrix(g) @ w) - f))
        assert resid <= 1e-10 * np.max(np.abs(f))


@pytest.mark.parametrize("n,seed", [(1, 11), (2, 12), (3, 13), (4, 14)])
def test_helmholtz_maximum_principle(n, seed):
    rng = np.random.default_rng(seed)
    g = build_radial_grid(n, 1.0, 96)
    f = rng.random(g.M)  # nonnegative input
    w = helmholtz_solve(g, f)
    assert np.all(w >= 0.0)
    # also with compact support (zeros in the input)
    f2 = np.where(g.r_centers < 0.2, 1.0, 0.0)
    w2 = helmholtz_solve(g, f2)
    assert np.all(w2 >= 0.0)


def test_helmholtz_preserves_integral():
    # integrate((I-Lap)^{-1} f) = integrate(f) under zero-flux boundaries
    rng = np.random.default_rng(21)
    g = build_radial_grid(3, 1.0, 48)
    f = 0.5 + rng.random(g.M)
    w = helmholtz_solve(g, f)
    assert abs(integrate(g, w) - integrate(g, f)) <= 1e-11 * abs(integrate(g, f))


def test_helmholtz_rejects_nonfinite():
    g = build_radial_grid(3, 1.0, 16)
    f = np.ones(g.M)
    f[3] = np.nan
    with pytest.raises(ValueError):
        helmholtz_solve(g, f)


# ---------------------------------------------------------------- integrals


def test_integrate_constants():
    g = build_radial_grid(3, 1.0, 40)
    assert integrate(g, np.ones(g.M)) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-12)
    assert integrate(g, np.zeros(g.M)) == 0.0


def test_gradient_squared_of_constant_is_zero():
    g = build_radial_grid(3, 1.0, 32)
    assert gradient_squared_integral(g, np.full(g.M, 4.2)) == 0.0


def test_gradient_squared_eigenfunction_value_and_order():
    # n=1, R=1, f = cos(pi r): integral of |f'|^2 over the two-sided interval is pi^2
    exact, quad_err = quad(lambda r: 2.0 * (math.pi * math.sin(math.pi * r)) ** 2, 0.0, 1.0)
    assert abs(exact - math.pi**2) < 1e-10
    errs = []
    for M in (64, 128, 256):
        g = build_radial_grid(1, 1.0, M)
        f = np.cos(math.pi * g.r_centers)
        errs.append(abs(gradient_squared_integral(g, f) - exact))
    orders = [math.log2(errs[k] / errs[k + 1]) for k in range(len(errs) - 1)]
    for p in orders:
        assert abs(p - 2.0) <= 0.15


def test_integral_length_mismatch():
    g = build_radial_grid(1, 1.0, 8)
    with pytest.raises(ValueError):
        integrate(g, np.ones(9))
    with pytest.raises(ValueError):
        gradient_squared_integral(g, np.ones(7))
