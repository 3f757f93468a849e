"""Classical standard-map dynamics and signed phase-space ensembles.

The classical counterpart of the kicked rotor is the standard map in the
scaled momentum L = tau * m at stochasticity kappa = k * tau, written in
the symmetric two-stage order that mirrors the split-step propagator:

    L_N     = L_{N-1} + kappa * sin(theta_{N-1} + L_{N-1} / 2)
    theta_N = theta_{N-1} + (L_{N-1} + L_N) / 2      (mod 2 pi)

Scaled energy is sum_i w_i L_i^2 / 2 over a weighted trajectory ensemble.

A two-component momentum superposition cos(a)|m> + sin(a) e^{i b}|n> maps
to a signed phase-space ensemble of three strata, all uniform in theta on
the grid theta_j = 2 pi j / S:

* the m line, L = m tau, weight cos^2(a) / S per sample,
* the n line, L = n tau, weight sin^2(a) / S per sample,
* the interference line, L = (m + n) tau / 2, signed weight
  sin(2 a) cos(b - (m - n) theta_j) / S per sample.

The signed stratum integrates to zero and the total weight is exactly 1,
so the ensemble is a quasiprobability, not a probability.  Weights are
carried unchanged through the dynamics; only (theta, L) evolve.  The grid
must resolve the cos((m - n) theta) oscillation, hence the build-time
floor samples_per_line >= 100 * |m - n|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .states import ObservableSeries, SuperpositionSpec

TWO_PI = 2.0 * np.pi

MIN_SAMPLES_PER_DELTA = 100

STRATUM_LABELS = ("m-line", "n-line", "interference")


@dataclass(frozen=True)
class ClassicalTrajectory:
    """One weighted point of the standard map; the weight never changes."""

    theta: float
    l_tilde: float
    weight: float


def standard_map_step(traj: ClassicalTrajectory, kappa: float) -> ClassicalTrajectory:
    """Advance one trajectory by one kick, in the printed two-stage order."""
    half = traj.theta + 0.5 * traj.l_tilde
    l_new = traj.l_tilde + kappa * np.sin(half)
    theta_new = (traj.theta + 0.5 * (traj.l_tilde + l_new)) % TWO_PI
    return ClassicalTrajectory(theta=float(theta_new), l_tilde=float(l_new), weight=traj.weight)


@dataclass(frozen=True, eq=False)
class ClassicalEnsemble:
    """Weighted trajectory arrays plus the superposition they sample.

    The three strata occupy equal consecutive blocks of samples_per_line
    points, in STRATUM_LABELS order.  Arrays are read-only; evolution
    returns a new ensemble.
    """

    theta: np.ndarray
    l_tilde: np.ndarray
    weights: np.ndarray
    spec: SuperpositionSpec
    samples_per_line: int

    def __post_init__(self) -> None:
        theta = np.asarray(self.theta, dtype=np.float64)
        l_tilde = np.asarray(self.l_tilde, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        n = 3 * self.samples_per_line
        if theta.shape != (n,) or l_tilde.shape != (n,) or weights.shape != (n,):
            raise ValueError("ensemble arrays must all have shape (3 * samples_per_line,)")
        total = float(np.sum(weights))
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"total ensemble weight {total!r} is not 1")
        for arr in (theta, l_tilde, weights):
            arr.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "l_tilde", l_tilde)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.theta.shape[0]

    def stratum(self, label: str) -> slice:
        """Index slice of one stratum; label is one of STRATUM_LABELS."""
        idx = STRATUM_LABELS.index(label)
        s = self.samples_per_line
        return slice(idx * s, (idx + 1) * s)

    def trajectories(self):
        """Iterate the ensemble as ClassicalTrajectory values."""
        for th, el, w in zip(self.theta, self.l_tilde, self.weights):
            yield ClassicalTrajectory(theta=float(th), l_tilde=float(el), weight=float(w))


def wigner_ensemble(
    spec: SuperpositionSpec,
    tau: float,
    samples_per_line: int = 100_000,
) -> ClassicalEnsemble:
    """Sample the signed three-line ensemble for a momentum superposition."""
    if spec.basis_kind != "momentum":
        raise ValueError("classical ensembles are defined for momentum superpositions only")
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    delta = abs(spec.m - spec.n)
    floor = MIN_SAMPLES_PER_DELTA * delta
    if samples_per_line < floor:
        raise ValueError(
            f"samples_per_line={samples_per_line} cannot resolve the interference "
            f"oscillation for |m - n|={delta}; need at least {floor}"
        )
    s = samples_per_line
    grid = TWO_PI * np.arange(s, dtype=np.float64) / s
    theta = np.concatenate([grid, grid, grid])
    l_tilde = np.concatenate(
        [
            np.full(s, spec.m * tau),
            np.full(s, spec.n * tau),
            np.full(s, 0.5 * (spec.m + spec.n) * tau),
        ]
    )
    ca, sa = np.cos(spec.alpha), np.sin(spec.alpha)
    weights = np.concatenate(
        [
            np.full(s, ca * ca / s),
            np.full(s, sa * sa / s),
            (2.0 * sa * ca / s) * np.cos(spec.beta - (spec.m - spec.n) * grid),
        ]
    )
    return ClassicalEnsemble(
        theta=theta, l_tilde=l_tilde, weights=weights, spec=spec, samples_per_line=s
    )


def ensemble_energy(ensemble: ClassicalEnsemble) -> float:
    """Signed-weighted scaled energy sum_i w_i L_i^2 / 2."""
    return 0.5 * float(np.sum(ensemble.weights * ensemble.l_tilde * ensemble.l_tilde))


def evolve_ensemble(ensemble: ClassicalEnsemble, kappa: float, n_kicks: int) -> ClassicalEnsemble:
    """Return the ensemble after n_kicks map iterations; weights unchanged."""
    if n_kicks < 0:
        raise ValueError("n_kicks must be non-negative")
    theta = ensemble.theta.copy()
    l_tilde = ensemble.l_tilde.copy()
    _kernels.step_ensemble(theta, l_tilde, float(kappa), int(n_kicks))
    return ClassicalEnsemble(
        theta=theta,
        l_tilde=l_tilde,
        weights=ensemble.weights.copy(),
        spec=ensemble.spec,
        samples_per_line=ensemble.samples_per_line,
    )


def propagate_ensemble(
    ensemble: ClassicalEnsemble, kappa: float, n_kicks: int
) -> ObservableSeries:
    """Energy history over n_kicks map iterations of the full ensemble."""
    if n_kicks < 0:
        raise ValueError("n_kicks must be non-negative")
    theta = ensemble.theta.copy()
    l_tilde = ensemble.l_tilde.copy()
    second_moment = np.empty(n_kicks + 1, dtype=np.float64)
    _kernels.weighted_sq_series(
        theta, l_tilde, ensemble.weights, float(kappa), int(n_kicks), second_moment
    )
    return ObservableSeries(
        kicks=np.arange(n_kicks + 1), energies=0.5 * second_moment
    )
