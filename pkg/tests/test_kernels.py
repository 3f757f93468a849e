"""Backend parity between the numba kernels and the numpy fallbacks."""

import os
import subprocess
import sys

import numpy as np
import pytest

from rotorlab import _kernels


def _fresh_ensemble(n: int = 20_000, seed: int = 11):
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2 * np.pi, n)
    l_tilde = rng.uniform(-2.0, 2.0, n)
    weights = np.full(n, 1.0 / n)
    return theta, l_tilde, weights


def test_numpy_series_consistent_with_plain_stepping():
    theta, l_tilde, weights = _fresh_ensemble(500)
    t1, l1 = theta.copy(), l_tilde.copy()
    out = np.empty(11)
    _kernels.weighted_sq_series_numpy(t1, l1, weights, 2.5, 10, out)
    t2, l2 = theta.copy(), l_tilde.copy()
    _kernels.step_ensemble_numpy(t2, l2, 2.5, 10)
    assert out[10] == pytest.approx(float(np.sum(weights * l2 * l2)), rel=1e-12)
    np.testing.assert_array_equal(t1, t2)
    np.testing.assert_array_equal(l1, l2)


@pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba not installed")
def test_backends_agree_exactly_at_short_times():
    theta, l_tilde, _ = _fresh_ensemble()
    t_np, l_np = theta.copy(), l_tilde.copy()
    t_nb, l_nb = theta.copy(), l_tilde.copy()
    _kernels.step_ensemble_numpy(t_np, l_np, 2.5, 3)
    _kernels.step_ensemble_numba(t_nb, l_nb, 2.5, 3)
    # same formula evaluation order; only libm sin ulps can differ
    np.testing.assert_allclose(l_nb, l_np, atol=1e-9)
    np.testing.assert_allclose(t_nb, t_np, atol=1e-9)


@pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba not installed")
def test_backend_series_agree_statistically_at_long_times():
    theta, l_tilde, weights = _fresh_ensemble(50_000)
    out_np = np.empty(61)
    out_nb = np.empty(61)
    _kernels.weighted_sq_series_numpy(theta.copy(), l_tilde.copy(), weights, 2.5, 60, out_np)
    _kernels.weighted_sq_series_numba(theta.copy(), l_tilde.copy(), weights, 2.5, 60, out_nb)
    # chaos amplifies last-ulp sin differences per trajectory; the ensemble
    # second moment stays statistically identical
    assert abs(out_nb[60] - out_np[60]) / out_np[60] < 0.05
    np.testing.assert_allclose(out_nb[:4], out_np[:4], rtol=1e-9)


def test_active_backend_label_matches_selection():
    assert _kernels.BACKEND in ("numba", "numpy")
    if _kernels.BACKEND == "numba":
        assert _kernels.step_ensemble is _kernels.step_ensemble_numba
    else:
        assert _kernels.step_ensemble is _kernels.step_ensemble_numpy


def test_env_flag_forces_numpy_backend():
    env = dict(os.environ, ROTORLAB_NO_NUMBA="1")
    code = "import rotorlab._kernels as k; print(k.BACKEND)"
    result = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    assert result.stdout.strip() == "numpy"
