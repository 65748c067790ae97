"""Hot numeric kernels with a numba fast path and a numpy/scipy fallback.

The only sequential inner loop in the package is the Thomas solve for
tridiagonal systems; everything else vectorizes.  By default the numba
path is used when numba imports cleanly.  Set the environment variable
``CHEMOLAB_NO_NUMBA=1`` (any non-empty value other than ``0``) before
import to force the pure numpy/scipy path; ``python -m chemolab.bench``
times the two side by side.

All systems solved here are diagonally dominant M-matrices, so the
pivot-free Thomas recursion is numerically safe.
"""

import os

import numpy as np
from scipy.linalg import solve_banded


def _flag_disables_numba() -> bool:
    val = os.environ.get("CHEMOLAB_NO_NUMBA", "")
    return val not in ("", "0")


try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def _thomas_numba(lower, diag, upper, rhs):
    n = diag.shape[0]
    x = np.empty(n)
    gam = np.empty(n)
    beta = diag[0]
    x[0] = rhs[0] / beta
    for i in range(1, n):
        gam[i] = upper[i - 1] / beta
        beta = diag[i] - lower[i - 1] * gam[i]
        x[i] = (rhs[i] - lower[i - 1] * x[i - 1]) / beta
    for i in range(n - 2, -1, -1):
        x[i] = x[i] - gam[i + 1] * x[i + 1]
    return x


def _thomas_numpy(lower, diag, upper, rhs):
    n = diag.shape[0]
    ab = np.zeros((3, n))
    ab[0, 1:] = upper
    ab[1, :] = diag
    ab[2, :-1] = lower
    return solve_banded((1, 1), ab, rhs, overwrite_ab=True, check_finite=False)


@njit(cache=True)
def _flux_divergence_numba(values, face_coef, inv_volumes, h):
    m = values.shape[0]
    out = np.empty(m)
    prev_flux = 0.0
    for i in range(m):
        if i < m - 1:
            flux = face_coef[i + 1] * (values[i + 1] - values[i]) / h
        else:
            flux = 0.0
        out[i] = (flux - prev_flux) * inv_volumes[i]
        prev_flux = flux
    return out


def _flux_divergence_numpy(values, face_coef, inv_volumes, h):
    flux = np.zeros(values.shape[0] + 1)
    flux[1:-1] = face_coef[1:-1] * np.diff(values) / h
    return np.diff(flux) * inv_volumes


USING_NUMBA = _HAVE_NUMBA and not _flag_disables_numba()
BACKEND = "numba" if USING_NUMBA else "numpy"

if USING_NUMBA:
    solve_tridiag = _thomas_numba
    flux_divergence = _flux_divergence_numba
else:
    solve_tridiag = _thomas_numpy
    flux_divergence = _flux_divergence_numpy


def backends():
    """Name -> (tridiag solver, flux divergence) for every available path."""
    table = {"numpy": (_thomas_numpy, _flux_divergence_numpy)}
    if _HAVE_NUMBA:
        table["numba"] = (_thomas_numba, _flux_divergence_numba)
    return table
