"""Headline checks: every major claim of the package, one pass/fail each.

Each criterion measures a physical quantity with the public API and
compares it against its target at a stated tolerance.  Results carry the
measured numbers so a failing check documents exactly what was observed;
checks are never weakened to force a pass.  The `rotorlab check` command
and the acceptance test module both drive `run_all`.
"""

from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass, replace
from functools import cache

import numpy as np
from scipy.special import jv

from .classical import (
    ClassicalTrajectory,
    evolve_ensemble,
    propagate_ensemble,
    standard_map_step,
    wigner_ensemble,
)
from .decoherence import DecoherenceConfig, propagate_with_decoherence
from .experiments import PRESETS, run_preset
from .propagator import floquet_step, make_plan, propagate
from .spectral import (
    banded_random_model,
    build_floquet_matrix,
    control_criterion,
    diagonalize,
    energy_via_spectrum,
    interference_ratio,
)
from .states import (
    AngularState,
    SimulationParams,
    SuperpositionSpec,
    prepare_superposition,
    scaled_energy,
    tail_probability,
)


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    details: str

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} criterion {self.index}: {self.name} | {self.details}"


def _rel(measured: float, target: float) -> float:
    return abs(measured - target) / abs(target)


_CASE_PARAMS = {
    "a": SimulationParams(tau=0.5, k=5.0, n_basis=256, kicks=60),
    "b": SimulationParams(tau=1.0, k=5.0, n_basis=512, kicks=60),
}

_CASE_SPECS = {
    "a": SuperpositionSpec(m=2, n=-1, alpha=math.pi / 4, beta=0.0),
    "b": SuperpositionSpec(m=1, n=2, alpha=math.pi / 4, beta=0.0),
}


@cache
def _quantum_pair(case: str, kicks: int = 60):
    """Propagated series for beta=0 and beta=pi, plus the basis states."""
    params = replace(_CASE_PARAMS[case], kicks=kicks)
    spec = _CASE_SPECS[case]
    plan = make_plan(params)
    out = {}
    for label, variant in (
        ("beta0", spec),
        ("betapi", spec.with_beta(math.pi)),
        ("single_m", replace(spec, alpha=0.0, beta=0.0)),
        ("single_n", replace(spec, alpha=math.pi / 2, beta=0.0)),
    ):
        state = prepare_superposition(variant, plan.d)
        out[label] = propagate(state, plan, kicks, record_snapshots_at=(60,))
    return out


@cache
def _classical_pair(case: str):
    params = _CASE_PARAMS[case]
    spec = _CASE_SPECS[case]
    out = {}
    for label, variant in (("beta0", spec), ("betapi", spec.with_beta(math.pi))):
        ensemble = wigner_ensemble(variant, params.tau, 100_000)
        out[label] = propagate_ensemble(ensemble, params.kappa, params.kicks)
    return out


@cache
def _spectrum(case: str, d: int):
    params = replace(_CASE_PARAMS[case], n_basis=d)
    return diagonalize(build_floquet_matrix(params))


def _fit_slope(series, start: int, stop: int) -> float:
    lo = np.searchsorted(series.kicks, start)
    hi = np.searchsorted(series.kicks, stop, side="right")
    return float(np.polyfit(series.kicks[lo:hi], series.energies[lo:hi], 1)[0])


def criterion_1() -> CriterionResult:
    t0 = time.perf_counter()
    runs = _quantum_pair("a")
    measured = {
        "E(betapi,40)": runs["betapi"].energy_at(40),
        "E(beta0,40)": runs["beta0"].energy_at(40),
        "E(m=+2,40)": runs["single_m"].energy_at(40),
        "E(m=-1,40)": runs["single_n"].energy_at(40),
    }
    targets = {
        "E(betapi,40)": 9.6,
        "E(beta0,40)": 1.6,
        "E(m=+2,40)": 5.4,
        "E(m=-1,40)": 6.0,
    }
    elapsed = time.perf_counter() - t0
    checks = {key: _rel(measured[key], targets[key]) < 0.15 for key in targets}
    ok = all(checks.values()) and elapsed < 10.0
    details = ", ".join(
        f"{key}={measured[key]:.4g} (target {targets[key]} ±15%)" for key in targets
    )
    details += f", runtime {elapsed:.2f}s (< 10s)"
    return CriterionResult(1, "case-a energies at kick 40", ok, details)


def criterion_2() -> CriterionResult:
    runs = _quantum_pair("b")
    e45 = runs["beta0"].energy_at(45)
    grow_ok = e45 > 77.1
    e4 = runs["betapi"].energy_at(4)
    e60 = runs["betapi"].energy_at(60)
    freeze = e60 - e4
    freeze_ok = freeze < 0.25 * e4
    ok = grow_ok and freeze_ok
    details = (
        f"E(beta0,45)={e45:.4g} (> 77.1: {grow_ok}); "
        f"E(betapi,60)-E(betapi,4)={freeze:.4g} vs 25% of E(betapi,4)={0.25 * e4:.4g} "
        f"({freeze_ok})"
    )
    return CriterionResult(2, "case-b growth and freeze-out", ok, details)


def criterion_3() -> CriterionResult:
    parts = []
    ok = True
    for case, m_min, target_hi, target_lo, hi_label in (
        ("a", 10, 0.158, 0.034, "betapi"),
        ("b", 20, 0.172, 0.032, "beta0"),
    ):
        runs = _quantum_pair(case)
        lo_label = "beta0" if hi_label == "betapi" else "betapi"
        tail_hi = tail_probability(runs[hi_label].snapshots[60], m_min)
        tail_lo = tail_probability(runs[lo_label].snapshots[60], m_min)
        good = _rel(tail_hi, target_hi) < 0.25 and _rel(tail_lo, target_lo) < 0.25
        ok = ok and good
        parts.append(
            f"case {case} |m|>={m_min}: {tail_hi:.4g}/{tail_lo:.4g} "
            f"(targets {target_hi}/{target_lo} ±25%)"
        )
    return CriterionResult(3, "momentum-tail populations at kick 60", ok, "; ".join(parts))


def criterion_4() -> CriterionResult:
    parts = []
    ok = True
    for case in ("a", "b"):
        classical = _classical_pair(case)
        quantum = _quantum_pair(case)
        ca = classical["beta0"].energies[-1]
        cb = classical["betapi"].energies[-1]
        c_contrast = abs(ca - cb) / (0.5 * (ca + cb))
        qa = quantum["beta0"].energies[-1]
        qb = quantum["betapi"].energies[-1]
        q_contrast = abs(qa - qb) / min(qa, qb)
        linear_ok = True
        for series in classical.values():
            fit = np.polyfit(series.kicks, series.energies, 1)
            resid = series.energies - np.polyval(fit, series.kicks)
            r2 = 1.0 - np.sum(resid**2) / np.sum((series.energies - series.energies.mean()) ** 2)
            linear_ok = linear_ok and fit[0] > 0 and r2 > 0.98
        good = c_contrast < 0.10 and q_contrast > 1.0 and linear_ok
        ok = ok and good
        parts.append(
            f"case {case}: classical contrast {c_contrast:.3f} (< 0.10), "
            f"quantum contrast {q_contrast:.2f} (> 1), linear growth {linear_ok}"
        )
    return CriterionResult(4, "classical vs quantum phase contrast", ok, "; ".join(parts))


@cache
def _decoherence_medians():
    params = _CASE_PARAMS["b"]
    spec = _CASE_SPECS["b"]
    plan = make_plan(params)
    stats: dict[str, list[float]] = {
        "ratio05": [],
        "s05_min": [],
        "slope_dev15": [],
        "slope15_max": [],
    }
    for seed in range(5):
        series = {}
        for r_label, r in (("05", 0.05), ("15", 0.15)):
            config = DecoherenceConfig(r=r, n_realizations=100, seed=seed, entropy_every=60)
            for b_label, variant in (("0", spec), ("pi", spec.with_beta(math.pi))):
                series[r_label + b_label] = propagate_with_decoherence(
                    variant, plan, config, n_kicks=60
                )
        e0 = series["050"].energies[-1]
        epi = series["05pi"].energies[-1]
        stats["ratio05"].append(max(e0, epi) / min(e0, epi))
        stats["s05_min"].append(
            min(float(series["050"].entropies[-1]), float(series["05pi"].entropies[-1]))
        )
        s0 = _fit_slope(series["150"], 20, 60)
        spi = _fit_slope(series["15pi"], 20, 60)
        stats["slope_dev15"].append(abs(s0 - spi) / max(abs(s0), abs(spi)))
        stats["slope15_max"].append(max(s0, spi))
    return {key: float(np.median(vals)) for key, vals in stats.items()}


def criterion_5() -> CriterionResult:
    med = _decoherence_medians()
    classical = _classical_pair("b")
    c_slope = 0.5 * (
        _fit_slope(classical["beta0"], 20, 60) + _fit_slope(classical["betapi"], 20, 60)
    )
    ratio_ok = med["ratio05"] > 2.0
    entropy_ok = med["s05_min"] > 0.4
    agree_ok = med["slope_dev15"] < 0.15
    below_ok = med["slope15_max"] < 0.5 * c_slope
    ok = ratio_ok and entropy_ok and agree_ok and below_ok
    details = (
        f"r=0.05: energy ratio {med['ratio05']:.3g} (> 2: {ratio_ok}), "
        f"min S(60) {med['s05_min']:.3g} (> 0.4: {entropy_ok}); "
        f"r=0.15: slope mismatch {med['slope_dev15']:.3g} (< 0.15: {agree_ok}), "
        f"max slope {med['slope15_max']:.3g} vs 50% classical {0.5 * c_slope:.3g} ({below_ok}); "
        f"medians over 5 seeds, 100 realizations"
    )
    return CriterionResult(5, "decoherence thresholds (r=0.05, r=0.15)", ok, details)


def criterion_6() -> CriterionResult:
    worst = 0.0
    for case in ("a", "b"):
        params = replace(_CASE_PARAMS[case], n_basis=256)
        spectrum = _spectrum(case, 256)
        plan = make_plan(params, guard=False)
        for beta in (0.0, math.pi):
            spec = _CASE_SPECS[case].with_beta(beta)
            state = prepare_superposition(spec, plan.d)
            direct = propagate(state, plan, 100)
            for n in range(101):
                total, _, _ = energy_via_spectrum(spectrum, spec, n)
                worst = max(worst, _rel(total, direct.energy_at(n)))
    ok = worst < 1e-6
    details = f"max relative deviation over N<=100, both cases, both beta: {worst:.3e} (< 1e-6)"
    return CriterionResult(6, "spectral energy split equals direct propagation", ok, details)


@cache
def _rmt_ratios():
    dims = (64, 128, 256)
    medians = {}
    for d in dims:
        ratios = [
            interference_ratio(diagonalize(banded_random_model(d, 10, seed)), 2, -1)
            for seed in range(20)
        ]
        medians[d] = float(np.median(ratios))
    rotor = interference_ratio(_spectrum("a", 256), 2, -1)
    return medians, rotor


def criterion_7() -> CriterionResult:
    medians, rotor = _rmt_ratios()
    scale = float(np.exp(np.mean([math.log(m * math.sqrt(d)) for d, m in medians.items()])))
    devs = {d: m * math.sqrt(d) / scale for d, m in medians.items()}
    scaling_ok = all(1.0 / 3.0 < dev < 3.0 for dev in devs.values())
    separation = rotor / medians[256]
    separation_ok = separation > 3.0
    ok = scaling_ok and separation_ok
    details = (
        "banded medians "
        + ", ".join(f"d={d}: {m:.4g} (x sqrt(d)/c = {devs[d]:.2f})" for d, m in medians.items())
        + f"; rotor ratio {rotor:.4g}, rotor/banded(d=256) = {separation:.2f} (> 3: {separation_ok})"
    )
    return CriterionResult(7, "eigenvector correlations vs banded random model", ok, details)


def criterion_8() -> CriterionResult:
    params = _CASE_PARAMS["a"]
    plan = make_plan(params, guard=False)
    state = prepare_superposition(_CASE_SPECS["a"], plan.d)
    for _ in range(1000):
        state = floquet_step(state, plan)
    drift = abs(float(np.sum(np.abs(state.amplitudes) ** 2)) - 1.0)
    norm_ok = drift < 1e-10

    spectrum = _spectrum("a", 128)
    matrix = build_floquet_matrix(replace(params, n_basis=128))
    recon = (spectrum.vectors.conj().T * np.exp(-1j * spectrum.eigenphases)) @ spectrum.vectors
    residual = float(np.abs(recon - matrix.entries).max())
    recon_ok = residual < 1e-8

    jac_dev = 0.0
    eps = 1e-6
    for theta0, l0 in ((0.3, 0.7), (2.0, -1.1), (5.5, 3.3)):
        def advance(th, el):
            t = standard_map_step(ClassicalTrajectory(th, el, 1.0), params.kappa)
            return t.theta, t.l_tilde

        th_p, l_p = advance(theta0 + eps, l0)
        th_m, l_m = advance(theta0 - eps, l0)
        th_q, l_q = advance(theta0, l0 + eps)
        th_r, l_r = advance(theta0, l0 - eps)
        j11 = (th_p - th_m) / (2 * eps)
        j21 = (l_p - l_m) / (2 * eps)
        j12 = (th_q - th_r) / (2 * eps)
        j22 = (l_q - l_r) / (2 * eps)
        jac_dev = max(jac_dev, abs(j11 * j22 - j12 * j21 - 1.0))
    jac_ok = jac_dev < 1e-6

    ensemble = wigner_ensemble(_CASE_SPECS["a"], params.tau, 3000)
    evolved = evolve_ensemble(ensemble, params.kappa, 25)
    weights_ok = np.array_equal(ensemble.weights, evolved.weights)

    with tempfile.TemporaryDirectory() as tmp:
        r1 = run_preset(PRESETS["fig4a"], seed=3, out_dir=tmp + "/x", kicks=10, quiet=True)
        r2 = run_preset(PRESETS["fig4a"], seed=3, out_dir=tmp + "/y", kicks=10, quiet=True)
        bytes_equal = all(
            p1.read_bytes() == p2.read_bytes() for p1, p2 in zip(r1.files, r2.files)
        )

    ok = norm_ok and recon_ok and jac_ok and weights_ok and bytes_equal
    details = (
        f"norm drift over 1000 kicks {drift:.2e} (< 1e-10: {norm_ok}); "
        f"reconstruction residual {residual:.2e} (< 1e-8: {recon_ok}); "
        f"map Jacobian deviation {jac_dev:.2e} (< 1e-6: {jac_ok}); "
        f"weight conservation exact: {weights_ok}; seeded runs byte-identical: {bytes_equal}"
    )
    return CriterionResult(8, "structural invariants", ok, details)


def criterion_9() -> CriterionResult:
    params = replace(_CASE_PARAMS["a"], kicks=1)
    plan = make_plan(params)
    zero = SuperpositionSpec(m=0, n=1, alpha=0.0, beta=0.0)
    state = prepare_superposition(zero, plan.d)
    kicked = floquet_step(state, plan)
    measured = scaled_energy(kicked, params.tau)
    analytic = params.tau**2 * params.k**2 / 4.0
    orders = np.arange(-80, 81)
    bessel = 0.5 * params.tau**2 * float(np.sum(orders**2 * jv(orders, params.k) ** 2))
    ok = abs(measured - analytic) < 1e-8 and abs(measured - bessel) < 1e-8
    details = (
        f"propagated {measured:.12g}, analytic {analytic:.12g}, "
        f"independent series {bessel:.12g} (both within 1e-8)"
    )
    return CriterionResult(9, "analytic one-kick energy", ok, details)


def criterion_10() -> CriterionResult:
    pass_a = control_criterion(SimulationParams(tau=0.5, k=5.0)).passes
    pass_b = control_criterion(SimulationParams(tau=1.0, k=5.0)).passes
    fail_1 = control_criterion(SimulationParams(tau=0.25, k=20.0)).passes
    fail_2 = control_criterion(SimulationParams(tau=0.4, k=12.5)).passes
    ok = pass_a and pass_b and not fail_1 and not fail_2
    details = (
        f"(tau=0.5, k=5) passes: {pass_a}; (tau=1, k=5) passes: {pass_b}; "
        f"kappa=5 at tau=0.25 passes: {fail_1} (expected False); "
        f"kappa=5 at tau=0.4 passes: {fail_2} (expected False)"
    )
    return CriterionResult(10, "control-criterion predicate", ok, details)


_CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


def run_all(only: tuple[int, ...] | None = None, printer=print) -> list[CriterionResult]:
    """Run the requested criteria (all by default), printing one line each."""
    indices = sorted(only) if only else sorted(_CRITERIA)
    unknown = [i for i in indices if i not in _CRITERIA]
    if unknown:
        raise ValueError(f"unknown criterion indices: {unknown}")
    results = []
    for index in indices:
        result = _CRITERIA[index]()
        if printer is not None:
            printer(result.line())
        results.append(result)
    return results
