"""Standard-map dynamics and the signed phase-space ensemble."""

import math

import numpy as np
import pytest

from rotorlab import (
    ClassicalTrajectory,
    SimulationParams,
    SuperpositionSpec,
    ensemble_energy,
    evolve_ensemble,
    make_plan,
    prepare_superposition,
    propagate,
    propagate_ensemble,
    standard_map_step,
    wigner_ensemble,
)
from rotorlab.classical import STRATUM_LABELS

CASE_A = SuperpositionSpec(m=2, n=-1, alpha=math.pi / 4, beta=0.0)

CASE_B = SuperpositionSpec(m=1, n=2, alpha=math.pi / 4, beta=0.0)


def test_single_step_two_stage_order():
    traj = ClassicalTrajectory(theta=0.3, l_tilde=0.7, weight=1.0)
    out = standard_map_step(traj, 2.5)
    l_new = 0.7 + 2.5 * math.sin(0.3 + 0.35)
    theta_new = (0.3 + 0.5 * (0.7 + l_new)) % (2 * math.pi)
    assert out.l_tilde == pytest.approx(l_new, abs=1e-15)
    assert out.theta == pytest.approx(theta_new, abs=1e-15)
    assert out.weight == 1.0


def test_zero_kappa_is_free_rotation():
    traj = ClassicalTrajectory(theta=1.0, l_tilde=0.5, weight=0.3)
    out = standard_map_step(traj, 0.0)
    assert out.l_tilde == 0.5
    assert out.theta == pytest.approx(1.5)


def test_map_is_area_preserving():
    eps = 1e-6
    for theta0, l0 in ((0.4, 1.2), (3.0, -0.8)):
        def f(th, el):
            t = standard_map_step(ClassicalTrajectory(th, el, 1.0), 2.5)
            return t.theta, t.l_tilde

        j11 = (f(theta0 + eps, l0)[0] - f(theta0 - eps, l0)[0]) / (2 * eps)
        j21 = (f(theta0 + eps, l0)[1] - f(theta0 - eps, l0)[1]) / (2 * eps)
        j12 = (f(theta0, l0 + eps)[0] - f(theta0, l0 - eps)[0]) / (2 * eps)
        j22 = (f(theta0, l0 + eps)[1] - f(theta0, l0 - eps)[1]) / (2 * eps)
        assert j11 * j22 - j12 * j21 == pytest.approx(1.0, abs=1e-6)


def test_wigner_ensemble_weights_are_exact():
    ens = wigner_ensemble(CASE_A, tau=0.5, samples_per_line=5000)
    assert float(np.sum(ens.weights)) == pytest.approx(1.0, abs=1e-14)
    inter = ens.stratum("interference")
    # the signed stratum is a pure oscillation over the grid: exact zero sum
    assert abs(float(np.sum(ens.weights[inter]))) < 1e-12
    assert set(STRATUM_LABELS) == {"m-line", "n-line", "interference"}
    lines = ens.l_tilde[ens.stratum("m-line")]
    assert np.all(lines == 2 * 0.5)


def test_wigner_ensemble_initial_energy():
    ens = wigner_ensemble(CASE_A, tau=0.5, samples_per_line=2000)
    # cos^2(pi/4) (m tau)^2/2 + sin^2(pi/4) (n tau)^2/2 = 0.3125 for case a
    assert ensemble_energy(ens) == pytest.approx(0.3125, abs=1e-12)


def test_wigner_ensemble_rejects_unresolved_oscillation():
    with pytest.raises(ValueError, match="resolve"):
        wigner_ensemble(CASE_A, tau=0.5, samples_per_line=100)
    with pytest.raises(ValueError, match="momentum"):
        wigner_ensemble(
            SuperpositionSpec(1, 2, 0.3, 0.0, basis_kind="sine-parity"), tau=0.5
        )


def test_weights_unchanged_by_evolution():
    ens = wigner_ensemble(CASE_A, tau=0.5, samples_per_line=1000)
    evolved = evolve_ensemble(ens, kappa=2.5, n_kicks=30)
    np.testing.assert_array_equal(ens.weights, evolved.weights)
    assert not np.array_equal(ens.theta, evolved.theta)


def test_propagate_ensemble_matches_evolve_endpoint():
    ens = wigner_ensemble(CASE_B, tau=1.0, samples_per_line=1500)
    series = propagate_ensemble(ens, kappa=5.0, n_kicks=12)
    evolved = evolve_ensemble(ens, kappa=5.0, n_kicks=12)
    assert series.energy_at(12) == pytest.approx(ensemble_energy(evolved), rel=1e-12)
    assert series.energy_at(0) == pytest.approx(ensemble_energy(ens), rel=1e-12)


def test_chaotic_growth_matches_refined_reference():
    # frozen reference from a 1e6-samples-per-line run of the same sampler:
    # case a E(60) = 21.394 (beta=0) and 25.812 (beta=pi)
    for beta, reference in ((0.0, 21.394), (math.pi, 25.812)):
        ens = wigner_ensemble(CASE_A.with_beta(beta), tau=0.5, samples_per_line=100_000)
        series = propagate_ensemble(ens, kappa=2.5, n_kicks=60)
        assert series.energy_at(60) == pytest.approx(reference, rel=0.05)
        fit = np.polyfit(series.kicks, series.energies, 1)
        assert fit[0] > 0
        resid = series.energies - np.polyval(fit, series.kicks)
        r_sq = 1 - np.sum(resid**2) / np.sum((series.energies - series.energies.mean()) ** 2)
        assert r_sq > 0.98


def test_bounded_motion_below_chaos_threshold():
    # kappa = 0.5 is far below the global-chaos border: energy stays bounded
    ens = wigner_ensemble(CASE_A, tau=0.5, samples_per_line=5000)
    series = propagate_ensemble(ens, kappa=0.5, n_kicks=200)
    assert float(np.max(series.energies)) < 10 * series.energy_at(0) + 1.0


def test_short_time_agreement_with_quantum_propagation():
    # the signed ensemble reproduces the quantum energies exactly at N=0,1
    # and within ~10% at N=2; beyond that interference physics departs
    params = SimulationParams(tau=0.5, k=5.0, n_basis=256, kicks=3)
    plan = make_plan(params)
    for beta in (0.0, math.pi):
        spec = CASE_A.with_beta(beta)
        quantum = propagate(prepare_superposition(spec, 256), plan, 2)
        ens = wigner_ensemble(spec, params.tau, samples_per_line=200_000)
        classical = propagate_ensemble(ens, params.kappa, 2)
        assert classical.energy_at(0) == pytest.approx(quantum.energy_at(0), rel=1e-10)
        assert classical.energy_at(1) == pytest.approx(quantum.energy_at(1), rel=0.01)
        assert classical.energy_at(2) == pytest.approx(quantum.energy_at(2), rel=0.10)
