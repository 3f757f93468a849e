"""Hot loops of the classical map, with a numba path and a numpy fallback.

Both backends implement the same two in-place contracts:

* ``step_ensemble(theta, l_tilde, kappa, n_kicks)`` advances every
  trajectory by n_kicks map iterations.
* ``weighted_sq_series(theta, l_tilde, weights, kappa, n_kicks, out)``
  does the same while filling ``out[0..n_kicks]`` with the signed-weighted
  second moment sum_i w_i L_i^2 recorded before the first kick and after
  every kick.

The map update follows the printed two-stage leapfrog order
``L' = L + kappa sin(theta + L/2)`` then ``theta' = theta + (L + L')/2``,
with the same floating-point evaluation order in both backends so that a
single trajectory is reproducible bit for bit under a fixed backend.

Backend choice: numba when importable, unless the environment variable
ROTORLAB_NO_NUMBA is set to a non-empty value other than "0".  The numba
kernels are compiled single-threaded without fastmath: results must not
depend on thread scheduling or on value-unsafe reassociation.
"""

from __future__ import annotations

import os

import numpy as np

TWO_PI = 2.0 * np.pi


def step_ensemble_numpy(theta: np.ndarray, l_tilde: np.ndarray, kappa: float, n_kicks: int) -> None:
    for _ in range(n_kicks):
        half = theta + 0.5 * l_tilde
        l_new = l_tilde + kappa * np.sin(half)
        theta[:] = (theta + 0.5 * (l_tilde + l_new)) % TWO_PI
        l_tilde[:] = l_new


def weighted_sq_series_numpy(
    theta: np.ndarray,
    l_tilde: np.ndarray,
    weights: np.ndarray,
    kappa: float,
    n_kicks: int,
    out: np.ndarray,
) -> None:
    out[0] = np.sum(weights * l_tilde * l_tilde)
    for kick in range(1, n_kicks + 1):
        half = theta + 0.5 * l_tilde
        l_new = l_tilde + kappa * np.sin(half)
        theta[:] = (theta + 0.5 * (l_tilde + l_new)) % TWO_PI
        l_tilde[:] = l_new
        out[kick] = np.sum(weights * l_tilde * l_tilde)


try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    njit = None
    HAS_NUMBA = False


if HAS_NUMBA:

    @njit(cache=True)
    def step_ensemble_numba(theta, l_tilde, kappa, n_kicks):  # pragma: no cover - thin jit wrapper
        n = theta.shape[0]
        for i in range(n):
            th = theta[i]
            el = l_tilde[i]
            for _ in range(n_kicks):
                half = th + 0.5 * el
                el_new = el + kappa * np.sin(half)
                th = (th + 0.5 * (el + el_new)) % TWO_PI
                el = el_new
            theta[i] = th
            l_tilde[i] = el

    @njit(cache=True)
    def weighted_sq_series_numba(theta, l_tilde, weights, kappa, n_kicks, out):  # pragma: no cover
        n = theta.shape[0]
        acc = 0.0
        for i in range(n):
            acc += weights[i] * l_tilde[i] * l_tilde[i]
        out[0] = acc
        for kick in range(1, n_kicks + 1):
            acc = 0.0
            for i in range(n):
                half = theta[i] + 0.5 * l_tilde[i]
                el_new = l_tilde[i] + kappa * np.sin(half)
                theta[i] = (theta[i] + 0.5 * (l_tilde[i] + el_new)) % TWO_PI
                l_tilde[i] = el_new
                acc += weights[i] * el_new * el_new
            out[kick] = acc

else:
    step_ensemble_numba = None
    weighted_sq_series_numba = None


_NUMBA_DISABLED = os.environ.get("ROTORLAB_NO_NUMBA", "") not in ("", "0")

if HAS_NUMBA and not _NUMBA_DISABLED:
    BACKEND = "numba"
    step_ensemble = step_ensemble_numba
    weighted_sq_series = weighted_sq_series_numba
else:
    BACKEND = "numpy"
    step_ensemble = step_ensemble_numpy
    weighted_sq_series = weighted_sq_series_numpy
