"""Split-operator propagation against independent analytic oracles."""

import math

import numpy as np
import pytest
from scipy.special import jv

from rotorlab import (
    BasisTruncationError,
    SimulationParams,
    SuperpositionSpec,
    choose_basis_size,
    edge_band_population,
    floquet_step,
    floquet_step_inverse,
    make_plan,
    prepare_superposition,
    propagate,
    scaled_energy,
)
from rotorlab.states import AngularState

CASE_A = SimulationParams(tau=0.5, k=5.0, n_basis=256, kicks=60)

CASE_B = SimulationParams(tau=1.0, k=5.0, n_basis=512, kicks=60)


def _ground(d: int) -> AngularState:
    return prepare_superposition(SuperpositionSpec(0, 1, 0.0, 0.0), d)


def test_one_kick_energy_matches_analytic_value():
    plan = make_plan(CASE_A)
    kicked = floquet_step(_ground(plan.d), plan)
    energy = scaled_energy(kicked, CASE_A.tau)
    assert energy == pytest.approx(CASE_A.tau**2 * CASE_A.k**2 / 4, abs=1e-10)


def test_one_kick_populations_are_squared_bessel():
    # free rotation is momentum-diagonal, so P(m) after one kick from |0>
    # equals J_m(k)^2 regardless of tau
    params = SimulationParams(tau=0.7, k=3.0, n_basis=128, kicks=1)
    plan = make_plan(params)
    kicked = floquet_step(_ground(plan.d), plan)
    pops = np.abs(kicked.amplitudes) ** 2
    m = np.arange(128) - 64
    np.testing.assert_allclose(pops, jv(m, 3.0) ** 2, atol=1e-12)


def test_two_kicks_at_trivial_free_phase_compose_bessel_orders():
    # tau = 8 pi makes exp(-i m^2 tau / 4) = 1 exactly, so two kicks act as
    # one kick of strength 2k and P(m) = J_m(2k)^2
    params = SimulationParams(tau=8 * math.pi, k=2.0, n_basis=128, kicks=2)
    plan = make_plan(params, guard=False)
    state = _ground(plan.d)
    for _ in range(2):
        state = floquet_step(state, plan)
    pops = np.abs(state.amplitudes) ** 2
    m = np.arange(128) - 64
    np.testing.assert_allclose(pops, jv(m, 4.0) ** 2, atol=1e-12)


def test_step_matches_dense_bessel_operator():
    # independent representation: F = P K P with P = diag(exp(-i tau m^2/4))
    # and K_{mn} = (-i)^{m-n} J_{m-n}(k).  The FFT kick is circulant, so
    # the identity holds only while the state carries no weight within a
    # Bessel bandwidth of the basis edge; d = 128 buries that leak below
    # floating-point roundoff for a width-6 Gaussian.
    d, tau, k = 128, 0.5, 5.0
    m = np.arange(d) - d // 2
    p = np.exp(-1j * tau * m**2 / 4)
    delta = m[:, None] - m[None, :]
    kick = (-1j) ** delta * jv(delta, k)
    dense = (p[:, None] * kick) * p[None, :]
    rng = np.random.default_rng(7)
    amps = np.exp(-((m / 6.0) ** 2)) * np.exp(2j * np.pi * rng.random(d))
    amps /= np.linalg.norm(amps)
    state = AngularState(amps, d)
    plan = make_plan(SimulationParams(tau=tau, k=k, n_basis=d, kicks=1), guard=False)
    stepped = floquet_step(state, plan)
    np.testing.assert_allclose(stepped.amplitudes, dense @ amps, atol=1e-10)


def test_step_inverse_is_exact_inverse():
    plan = make_plan(CASE_A)
    spec = SuperpositionSpec(2, -1, math.pi / 4, 1.3)
    state = prepare_superposition(spec, plan.d)
    forward = state
    for _ in range(7):
        forward = floquet_step(forward, plan)
    back = forward
    for _ in range(7):
        back = floquet_step_inverse(back, plan)
    np.testing.assert_allclose(back.amplitudes, state.amplitudes, atol=1e-12)


def test_norm_is_preserved_over_many_kicks():
    plan = make_plan(CASE_B)
    state = prepare_superposition(SuperpositionSpec(1, 2, math.pi / 4, 0.0), plan.d)
    for _ in range(200):
        state = floquet_step(state, plan)
    assert abs(np.sum(np.abs(state.amplitudes) ** 2) - 1.0) < 1e-12


def test_propagate_series_shape_and_snapshots():
    plan = make_plan(CASE_A)
    state = prepare_superposition(SuperpositionSpec(2, -1, math.pi / 4, 0.0), plan.d)
    series = propagate(state, plan, 10, record_snapshots_at=(0, 5))
    assert list(series.kicks) == list(range(11))
    assert series.energy_at(0) == pytest.approx(scaled_energy(state, CASE_A.tau))
    assert set(series.snapshots) == {0, 5}
    assert series.snapshots[5].sum() == pytest.approx(1.0, abs=1e-12)


def test_guard_trips_on_undersized_basis():
    small = SimulationParams(tau=1.0, k=5.0, n_basis=64, kicks=60)
    plan = make_plan(small)
    state = prepare_superposition(SuperpositionSpec(1, 2, math.pi / 4, 0.0), plan.d)
    with pytest.raises(BasisTruncationError, match="edge-band"):
        propagate(state, plan, 60)
    relaxed = make_plan(small, guard=False)
    propagate(state, relaxed, 60)  # must not raise


def test_edge_band_population_reads_outer_bands():
    probs = np.zeros(100)
    probs[2] = 3e-7
    assert edge_band_population(probs) == pytest.approx(3e-7)
    probs = np.zeros(100)
    probs[50] = 1.0
    assert edge_band_population(probs) == 0.0


def test_choose_basis_size_frozen_outcomes():
    # pinned by probe propagation of the standard superpositions
    spec_a = (
        SuperpositionSpec(2, -1, math.pi / 4, 0.0),
        SuperpositionSpec(2, -1, math.pi / 4, math.pi),
    )
    spec_b = (
        SuperpositionSpec(1, 2, math.pi / 4, 0.0),
        SuperpositionSpec(1, 2, math.pi / 4, math.pi),
    )
    assert choose_basis_size(CASE_A, 60, specs=spec_a) == 256
    assert choose_basis_size(CASE_B, 60, specs=spec_b) == 512
    resonant = SimulationParams(tau=math.pi / 3, k=5.0, n_basis=256, kicks=60)
    assert choose_basis_size(resonant, 60, specs=spec_b) == 1024
    assert choose_basis_size(CASE_B, 60, specs=spec_b, dephasing_r=0.15) == 512
