"""Radial finite-volume discretization of the ball B_R(0) in R^n.

The mesh is uniform in the radial coordinate with M cells, faces at
r_j = j*h (h = R/M) and cell centers at midpoints.  A field holds one
sample per cell.  Cell volumes are the n-dimensional shell measures

    omega_i = |S^{n-1}|/n * (r_{i+1}^n - r_i^n),

and face areas a_j = |S^{n-1}| r_j^{n-1}.  Both boundary fluxes are zero:
at r=R by the no-flux condition, at r=0 by radial symmetry (for n >= 2
the face area vanishes there anyway; for n=1 the flux is forced to zero).

The discrete Laplacian is the conservative flux-difference form, so its
weighted sum telescopes to zero, and (I - Lap) is a tridiagonal M-matrix:
its inverse is entrywise nonnegative, which gives the discrete maximum
principle used by the diagnostics.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConfigError


@dataclass(frozen=True)
class RadialGrid:
    n: int
    R: float
    M: int
    h: float
    r_centers: np.ndarray
    r_faces: np.ndarray
    cell_volumes: np.ndarray
    face_areas: np.ndarray
    # a_j / (omega_i * h) with boundary faces zeroed; used by operators and solvers
    coef_lo: np.ndarray = field(repr=False, default=None)
    coef_hi: np.ndarray = field(repr=False, default=None)
    # face areas with the two boundary faces zeroed (flux coefficients)
    flux_areas: np.ndarray = field(repr=False, default=None)

    @property
    def volume(self) -> float:
        return float(self.cell_volumes.sum())


def unit_sphere_area(n: int) -> float:
    """Surface measure of S^{n-1}; equals 2 for n=1."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def build_radial_grid(n: int, R: float, M: int) -> RadialGrid:
    if n < 1:
        raise ConfigError(f"spatial dimension must be >= 1, got {n}")
    if not (R > 0.0) or not math.isfinite(R):
        raise ConfigError(f"ball radius must be positive, got {R}")
    if M < 4:
        raise ConfigError(f"cell count must be >= 4, got {M}")

    h = R / M
    r_faces = np.linspace(0.0, R, M + 1)
    r_centers = 0.5 * (r_faces[:-1] + r_faces[1:])
    area = unit_sphere_area(n)
    cell_volumes = (area / n) * np.diff(r_faces**n)
    face_areas = area * r_faces ** (n - 1)

    flux_areas = face_areas.copy()
    flux_areas[0] = 0.0   # symmetry at the origin (n=1: |S^0| r^0 would be 2)
    flux_areas[-1] = 0.0  # no-flux outer boundary

    coef = flux_areas / h
    coef_lo = coef[:-1] / cell_volumes
    coef_hi = coef[1:] / cell_volumes

    return RadialGrid(
        n=n,
        R=float(R),
        M=M,
        h=h,
        r_centers=r_centers,
        r_faces=r_faces,
        cell_volumes=cell_volumes,
        face_areas=face_areas,
        coef_lo=coef_lo,
        coef_hi=coef_hi,
        flux_areas=flux_areas,
    )


def _check_field(grid: RadialGrid, f: np.ndarray, require_finite: bool = False) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.M,):
        raise ValueError(f"field has shape {f.shape}, grid expects ({grid.M},)")
    if require_finite and not np.all(np.isfinite(f)):
        raise ValueError("field contains non-finite entries")
    return f


def apply_laplacian(grid: RadialGrid, f: np.ndarray) -> np.ndarray:
    """Conservative second-order Laplacian with zero boundary fluxes."""
    f = _check_field(grid, f, require_finite=True)
    inv_vol = 1.0 / grid.cell_volumes
    return kernels.flux_divergence(f, grid.flux_areas, inv_vol, grid.h)


def helmholtz_diagonals(grid: RadialGrid):
    """Tridiagonal bands of (I - Lap): (lower, diag, upper)."""
    diag = 1.0 + grid.coef_lo + grid.coef_hi
    lower = -grid.coef_lo[1:]
    upper = -grid.coef_hi[:-1]
    return lower, diag, upper


def helmholtz_solve(grid: RadialGrid, f: np.ndarray) -> np.ndarray:
    """Solve (I - Lap) w = f with zero-flux boundaries (direct tridiagonal).

    The matrix is an irreducible M-matrix, so nonnegative f yields
    nonnegative w.
    """
    f = _check_field(grid, f, require_finite=True)
    lower, diag, upper = helmholtz_diagonals(grid)
    w = kernels.solve_tridiag(lower, diag, upper, f)
    if not np.all(np.isfinite(w)):
        raise RuntimeError("tridiagonal solve produced non-finite values")
    return w


def integrate(grid: RadialGrid, f: np.ndarray) -> float:
    f = _check_field(grid, f)
    return float(np.dot(grid.cell_volumes, f))


def restrict_volume_average(fine: RadialGrid, coarse: RadialGrid, f: np.ndarray) -> np.ndarray:
    """Project a fine-grid field onto a nested coarser grid by volume averaging.

    Used by refinement studies: the coarse value on each cell is the
    volume-weighted mean of the fine cells it covers.
    """
    if fine.n != coarse.n or fine.R != coarse.R:
        raise ValueError("grids must share dimension and radius")
    if fine.M % coarse.M != 0:
        raise ValueError(f"fine M={fine.M} is not a multiple of coarse M={coarse.M}")
    f = _check_field(fine, f)
    k = fine.M // coarse.M
    w = fine.cell_volumes.reshape(coarse.M, k)
    return (w * f.reshape(coarse.M, k)).sum(axis=1) / w.sum(axis=1)


def gradient_squared_integral(grid: RadialGrid, f: np.ndarray) -> float:
    """Face-based quadrature of the squared radial gradient.

    Interior face j contributes (a_j * h) * ((f_j - f_{j-1})/h)^2; the
    boundary faces carry no gradient (zero-flux).
    """
    f = _check_field(grid, f)
    if grid.M < 2:
        return 0.0
    slopes = np.diff(f) / grid.h
    weights = grid.face_areas[1:-1] * grid.h
    return float(np.dot(weights, slopes**2))
