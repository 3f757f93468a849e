"""Rotor states in the angular momentum basis and their observables.

Conventions shared by the whole package:

* A state over D momentum eigenstates |m> = exp(i m theta)/sqrt(2 pi) is a
  complex vector ``c`` with the fixed index mapping ``m = index - D/2``,
  so m runs over [-D/2, D/2).  D is always even.
* Energies are the dimensionless scaled form
  ``E = (tau^2 / 2) * sum_m m^2 |c_m|^2``.
* Two-component superpositions ``cos(alpha)|m> + sin(alpha) e^{i beta}|n>``
  are described by :class:`SuperpositionSpec`.  The parity kinds stand for
  the real basis functions sin(m theta)/sqrt(pi) and cos(m theta)/sqrt(pi),
  expanded over the +-m momentum pair before superposing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

NORM_TOL = 1e-10

BASIS_KINDS = ("momentum", "sine-parity", "cosine-parity")


@dataclass(frozen=True)
class SimulationParams:
    """Dimensionless rotor parameters plus truncation and run length.

    tau is the scaled kick period, k the scaled kick strength; the classical
    stochasticity parameter kappa = k * tau is derived, never set directly.
    """

    tau: float
    k: float
    n_basis: int = 512
    kicks: int = 60

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.k < 0:
            raise ValueError(f"k must be non-negative, got {self.k}")
        if self.n_basis < 2 or self.n_basis % 2:
            raise ValueError(f"n_basis must be even and >= 2, got {self.n_basis}")
        if self.kicks < 0:
            raise ValueError(f"kicks must be non-negative, got {self.kicks}")

    @property
    def kappa(self) -> float:
        return self.tau * self.k


@dataclass(frozen=True)
class SuperpositionSpec:
    """Initial state cos(alpha)|m> + sin(alpha) exp(i beta)|n>.

    For the parity kinds, |m> and |n> are replaced by the real angular
    functions of the given family with quantum numbers m, n >= 1.
    """

    m: int
    n: int
    alpha: float
    beta: float
    basis_kind: str = "momentum"

    def __post_init__(self) -> None:
        if self.basis_kind not in BASIS_KINDS:
            raise ValueError(f"basis_kind must be one of {BASIS_KINDS}, got {self.basis_kind!r}")
        if self.m == self.n:
            raise ValueError("m and n must differ")
        if self.basis_kind != "momentum" and (self.m < 1 or self.n < 1):
            raise ValueError("parity kinds need m, n >= 1")
        if not 0 <= self.alpha <= np.pi / 2:
            raise ValueError(f"alpha must lie in [0, pi/2], got {self.alpha}")
        # beta is stored reduced to [0, 2 pi)
        object.__setattr__(self, "beta", float(np.mod(self.beta, 2 * np.pi)))

    def with_beta(self, beta: float) -> "SuperpositionSpec":
        return SuperpositionSpec(self.m, self.n, self.alpha, beta, self.basis_kind)


@dataclass(frozen=True)
class AngularState:
    """Complex amplitudes over the momentum grid m = index - d/2."""

    amplitudes: np.ndarray
    d: int

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.shape[0] != self.d:
            raise ValueError(f"amplitudes must be a length-{self.d} vector")
        if self.d < 2 or self.d % 2:
            raise ValueError(f"d must be even and >= 2, got {self.d}")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def index_of(self, m: int) -> int:
        i = m + self.d // 2
        if not 0 <= i < self.d:
            raise IndexError(f"m={m} outside the truncated basis [-{self.d//2}, {self.d//2})")
        return i

    def m_of(self, index: int) -> int:
        if not 0 <= index < self.d:
            raise IndexError(f"index {index} out of range")
        return index - self.d // 2

    @property
    def m_values(self) -> np.ndarray:
        return np.arange(self.d) - self.d // 2


@dataclass(frozen=True)
class ObservableSeries:
    """Per-kick record of scaled energy, optional purity and P(m) snapshots."""

    kicks: np.ndarray
    energies: np.ndarray
    entropies: np.ndarray | None = None
    snapshots: Mapping[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        kicks = np.asarray(self.kicks, dtype=np.int64)
        energies = np.asarray(self.energies, dtype=np.float64)
        if kicks.shape != energies.shape or kicks.ndim != 1:
            raise ValueError("kicks and energies must be matching 1-d arrays")
        if kicks.size == 0 or kicks[0] != 0 or np.any(np.diff(kicks) <= 0):
            raise ValueError("kick indices must increase strictly from 0")
        for arr in (kicks, energies):
            arr.flags.writeable = False
        object.__setattr__(self, "kicks", kicks)
        object.__setattr__(self, "energies", energies)
        if self.entropies is not None:
            ent = np.asarray(self.entropies, dtype=np.float64)
            if ent.shape != kicks.shape:
                raise ValueError("entropies must match the kick axis")
            ok = np.isnan(ent) | ((ent > 0) & (ent <= 1 + NORM_TOL))
            if not ok.all():
                raise ValueError("entropies must lie in (0, 1]")
            ent.flags.writeable = False
            object.__setattr__(self, "entropies", ent)
        for kick, pdist in self.snapshots.items():
            if abs(pdist.sum() - 1.0) > NORM_TOL:
                raise ValueError(f"snapshot at kick {kick} is not normalized")

    def energy_at(self, kick: int) -> float:
        idx = np.searchsorted(self.kicks, kick)
        if idx >= self.kicks.size or self.kicks[idx] != kick:
            raise KeyError(f"kick {kick} not recorded")
        return float(self.energies[idx])


def prepare_superposition(spec: SuperpositionSpec, d: int) -> AngularState:
    """Build the normalized initial state of ``spec`` on a size-d grid.

    Momentum kind: c_m = cos(alpha), c_n = sin(alpha) e^{i beta}.
    Sine kind: sin(q theta)/sqrt(pi) = (|q> - |-q>) / (i sqrt(2)), so each
    branch contributes -i/sqrt(2) at +q and +i/sqrt(2) at -q.
    Cosine kind: (|q> + |-q>) / sqrt(2).
    """
    if max(abs(spec.m), abs(spec.n)) >= d // 2:
        raise ValueError(f"m={spec.m}, n={spec.n} do not fit in a size-{d} basis")
    amps = np.zeros(d, dtype=np.complex128)
    half = d // 2
    ca, sa = np.cos(spec.alpha), np.sin(spec.alpha) * np.exp(1j * spec.beta)
    if spec.basis_kind == "momentum":
        amps[spec.m + half] = ca
        amps[spec.n + half] = sa
    else:
        s = 1 / np.sqrt(2)
        if spec.basis_kind == "sine-parity":
            plus, minus = -1j * s, 1j * s
        else:
            plus = minus = s
        for q, coeff in ((spec.m, ca), (spec.n, sa)):
            amps[q + half] += coeff * plus
            amps[-q + half] += coeff * minus
    return AngularState(amps, d)


def scaled_energy(state: AngularState, tau: float) -> float:
    """Dimensionless energy (tau^2 / 2) sum_m m^2 |c_m|^2."""
    m = state.m_values
    return 0.5 * tau * tau * float(np.sum(m * m * np.abs(state.amplitudes) ** 2))


def momentum_distribution(state: AngularState) -> np.ndarray:
    """Probability P(m) = |c_m|^2 over the momentum grid."""
    return np.abs(state.amplitudes) ** 2


def tail_probability(pdist: np.ndarray, m_min: int) -> float:
    """Total probability carried by modes with |m| >= m_min."""
    d = pdist.shape[0]
    m = np.arange(d) - d // 2
    return float(pdist[np.abs(m) >= m_min].sum())


def overlap(a: AngularState, b: AngularState) -> complex:
    """Inner product <a|b> in the shared momentum basis."""
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: {a.d} vs {b.d}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
