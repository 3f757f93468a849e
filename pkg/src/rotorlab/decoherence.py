"""Random-phase decoherence: noisy kicks, realization averages, purity.

Each kick period composes the coherent step with a momentum-diagonal
random-phase unitary, applied after the kick:

    c_m  <-  exp(i 2 pi r xi(m, kick)) c_m,

with xi fresh uniform[0, 1) per momentum index and kick, and r in [0, 1]
setting the dephasing strength.  Every realization stays a pure unit-norm
state; mixedness lives in the realization average.  Purity is tracked as
S = Tr rho^2 = (1/R^2) sum_{ij} |<psi_i|psi_j>|^2, computed from pairwise
overlaps without materializing rho.

Randomness is counter-based: the uniform block for kick N is drawn from a
Philox generator keyed by (seed, N), realization i consuming row i of the
block.  Results therefore depend only on (seed, shape), not on execution
order, and a single realization can replay its stream in isolation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .propagator import PropagatorPlan, _check_guard, floquet_step_batch
from .states import AngularState, ObservableSeries, SuperpositionSpec, prepare_superposition

NORM_TOL = 1e-10


@dataclass(frozen=True)
class DecoherenceConfig:
    """Noise strength, realization count, and entropy snapshot cadence.

    entropy_every = 0 disables entropy tracking; any positive cadence
    requires at least two realizations for the average to be meaningful.
    """

    r: float
    n_realizations: int = 100
    seed: int = 0
    entropy_every: int = 1

    def __post_init__(self) -> None:
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"r must lie in [0, 1], got {self.r}")
        if self.n_realizations < 1:
            raise ValueError("n_realizations must be positive")
        if self.entropy_every < 0:
            raise ValueError("entropy_every must be >= 0 (0 disables)")
        if self.entropy_every > 0 and self.n_realizations < 2:
            raise ValueError("entropy tracking needs n_realizations >= 2")
        if not 0 <= self.seed < 2**63:
            raise ValueError("seed must be a non-negative 63-bit integer")


@dataclass(frozen=True, eq=False)
class RealizationEnsemble:
    """Pure states of every noise realization at one kick index."""

    states: tuple[AngularState, ...]
    kick_index: int

    def __post_init__(self) -> None:
        if not self.states:
            raise ValueError("ensemble must hold at least one realization")
        d = self.states[0].d
        for state in self.states:
            if state.d != d:
                raise ValueError("all realizations must share one basis size")

    @property
    def n_realizations(self) -> int:
        return len(self.states)

    @property
    def d(self) -> int:
        return self.states[0].d

    def matrix(self) -> np.ndarray:
        """Realization amplitudes stacked as rows, shape (R, d)."""
        return np.stack([state.amplitudes for state in self.states])


@dataclass(frozen=True)
class PhaseStream:
    """Deterministic uniform stream of one realization within a seeded run."""

    seed: int
    realization: int = 0

    def uniforms(self, kick: int, d: int) -> np.ndarray:
        """Row `realization` of the (R, d) block keyed by (seed, kick)."""
        block = _uniform_block(self.seed, kick, (self.realization + 1, d))
        return block[-1]


def _uniform_block(seed: int, kick: int, shape: tuple[int, int]) -> np.ndarray:
    if kick < 0:
        raise ValueError("kick must be non-negative")
    gen = np.random.Generator(np.random.Philox(key=[seed, kick]))
    return gen.random(shape)


def random_phase_step(
    state: AngularState, r: float, stream: PhaseStream, kick: int
) -> AngularState:
    """Multiply each momentum amplitude by exp(i 2 pi r xi(m, kick))."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r must lie in [0, 1], got {r}")
    if r == 0.0:
        return state
    xi = stream.uniforms(kick, state.d)
    return AngularState(
        amplitudes=state.amplitudes * np.exp(2j * np.pi * r * xi), d=state.d
    )


def _evolve_matrix(
    spec: SuperpositionSpec,
    plan: PropagatorPlan,
    config: DecoherenceConfig,
    n_kicks: int,
    on_kick,
) -> None:
    """Drive (R, d) realization rows through n_kicks noisy periods."""
    init = prepare_superposition(spec, plan.d)
    psi = np.broadcast_to(init.amplitudes, (config.n_realizations, plan.d)).copy()
    on_kick(0, psi)
    for kick in range(1, n_kicks + 1):
        psi = floquet_step_batch(psi, plan)
        if config.r > 0.0:
            xi = _uniform_block(config.seed, kick, psi.shape)
            psi *= np.exp(2j * np.pi * config.r * xi)
        if plan.guard:
            _check_guard(psi)
        on_kick(kick, psi)


def evolve_realizations(
    spec: SuperpositionSpec,
    plan: PropagatorPlan,
    config: DecoherenceConfig,
    n_kicks: int,
) -> RealizationEnsemble:
    """Realization states after n_kicks noisy periods."""
    final: dict[int, np.ndarray] = {}

    def on_kick(kick: int, psi: np.ndarray) -> None:
        if kick == n_kicks:
            final["psi"] = psi.copy()

    _evolve_matrix(spec, plan, config, n_kicks, on_kick)
    states = tuple(
        AngularState(amplitudes=row, d=plan.d) for row in final["psi"]
    )
    return RealizationEnsemble(states=states, kick_index=n_kicks)


def propagate_with_decoherence(
    spec: SuperpositionSpec,
    plan: PropagatorPlan,
    config: DecoherenceConfig,
    n_kicks: int | None = None,
    record_snapshots_at: tuple[int, ...] = (),
) -> ObservableSeries:
    """Realization-averaged energy (and purity at the configured cadence).

    Snapshots, when requested, are realization-averaged momentum
    distributions, i.e. the diagonal of the averaged density matrix.
    """
    kicks_total = plan.params.kicks if n_kicks is None else int(n_kicks)
    if kicks_total < 0:
        raise ValueError("n_kicks must be non-negative")
    tau = plan.params.tau
    m_sq = (np.arange(plan.d) - plan.d // 2).astype(np.float64) ** 2
    energies = np.empty(kicks_total + 1)
    entropies = np.full(kicks_total + 1, np.nan)
    snapshots: dict[int, np.ndarray] = {}
    wanted = set(int(k) for k in record_snapshots_at)
    every = config.entropy_every

    def on_kick(kick: int, psi: np.ndarray) -> None:
        mean_dist = np.mean(np.abs(psi) ** 2, axis=0)
        energies[kick] = 0.5 * tau * tau * float(m_sq @ mean_dist)
        if every > 0 and (kick % every == 0 or kick == kicks_total):
            entropies[kick] = _linear_entropy_rows(psi)
        if kick in wanted:
            snapshots[kick] = mean_dist.copy()

    _evolve_matrix(spec, plan, config, kicks_total, on_kick)
    return ObservableSeries(
        kicks=np.arange(kicks_total + 1),
        energies=energies,
        entropies=entropies if every > 0 else None,
        snapshots=snapshots,
    )


def _linear_entropy_rows(psi: np.ndarray) -> float:
    gram = psi @ psi.conj().T
    r = psi.shape[0]
    return float(np.sum(np.abs(gram) ** 2)) / (r * r)


def linear_entropy(ensemble: RealizationEnsemble) -> float:
    """S = Tr rho^2 over the realization-averaged density matrix."""
    if ensemble.n_realizations < 2:
        raise ValueError("linear entropy needs at least two realizations")
    return _linear_entropy_rows(ensemble.matrix())


def density_matrix(ensemble: RealizationEnsemble) -> np.ndarray:
    """Explicit d x d realization-averaged rho; for small-basis checks."""
    psi = ensemble.matrix()
    return psi.T @ psi.conj() / psi.shape[0]
