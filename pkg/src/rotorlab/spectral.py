"""Floquet-matrix construction, diagonalization, and eigenvector statistics.

The one-kick operator F is represented densely in the momentum basis,
indices i, j mapping to physical momenta i - d/2, j - d/2.  Diagonalizing
with a unitary U (rows are eigenvectors) gives

    <i|F|j> = sum_k exp(-i phi_k) U*_{ki} U_{kj},   phi_k in [0, 2 pi),

so eigenvector k as a ket has components conj(U[k, :]).  Expanding an
initial two-component superposition cos(a)|m> + sin(a) e^{i b}|n> in this
basis splits the kicked energy into a beta-independent incoherent part and
an interference part

    E_int(N) = (tau^2 / 2) sin(2 a) Re[ e^{i b} yN^dag Q zN ],

with y, z the m and n columns of U, yN = exp(-i N phi) * y, and
Q = U diag(l_phys^2) U^dag the momentum-squared operator in the eigen
basis.  Averaging over N kills the off-diagonal terms of Q and leaves the
eigenvector correlation sums C_lmn = sum_k |U_{kl}|^2 U*_{km} U_{kn},
whose magnitude relative to the incoherent diagonal sum distinguishes the
kicked rotor from a banded random-matrix baseline.

Bandwidth is measured with the cyclic index distance min(|i-j|, d-|i-j|):
the FFT-built matrix wraps around the basis edge, so the far corners carry
the same Bessel-decay magnitudes as the near band.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import schur

from .propagator import floquet_step_batch, make_plan
from .states import SimulationParams, SuperpositionSpec

UNITARITY_TOL = 1e-8

RECONSTRUCTION_TOL = 1e-8

ORTHONORMALITY_TOL = 1e-10

MAX_DENSE_DIM = 512

CONTROL_THRESHOLD = 0.2


@dataclass(frozen=True, eq=False)
class FloquetMatrix:
    """Dense one-kick unitary; entries[i, j] = <i|F|j> in momentum indices.

    Edge columns of an FFT-built matrix are exempt from the propagation
    truncation guard: the matrix is an object of study at fixed d, not a
    converged physical state.
    """

    entries: np.ndarray
    params: SimulationParams
    origin: str = "kicked-rotor"

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.complex128)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("entries must be a square matrix")
        drift = np.abs(entries.conj().T @ entries - np.eye(entries.shape[0])).max()
        if drift > UNITARITY_TOL:
            raise ValueError(f"matrix is not unitary: max |F^dag F - 1| = {drift:.3e}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def d(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class FloquetSpectrum:
    """Eigenphases and eigenvector rows of a dense Floquet unitary.

    Eigenvalue convention: F has eigenvalue exp(-i phi_k) on the ket whose
    components are conj(vectors[k, :]); eigenphases are ascending in
    [0, 2 pi).
    """

    eigenphases: np.ndarray
    vectors: np.ndarray
    params: SimulationParams
    origin: str = "kicked-rotor"

    def __post_init__(self) -> None:
        phases = np.asarray(self.eigenphases, dtype=np.float64)
        vectors = np.asarray(self.vectors, dtype=np.complex128)
        d = phases.shape[0]
        if vectors.shape != (d, d):
            raise ValueError("vectors must be square with one row per eigenphase")
        if np.any(phases < 0.0) or np.any(phases >= 2.0 * np.pi):
            raise ValueError("eigenphases must lie in [0, 2 pi)")
        if np.any(np.diff(phases) < 0.0):
            raise ValueError("eigenphases must be sorted ascending")
        gram = np.abs(vectors @ vectors.conj().T - np.eye(d)).max()
        if gram > ORTHONORMALITY_TOL:
            raise ValueError(f"eigenvector rows not orthonormal: deviation {gram:.3e}")
        for arr in (phases, vectors):
            arr.setflags(write=False)
        object.__setattr__(self, "eigenphases", phases)
        object.__setattr__(self, "vectors", vectors)

    @property
    def d(self) -> int:
        return self.eigenphases.shape[0]

    def momentum_values(self) -> np.ndarray:
        return np.arange(self.d) - self.d // 2


def build_floquet_matrix(params: SimulationParams, d: int | None = None) -> FloquetMatrix:
    """Assemble <i|F|j> by propagating every basis vector one kick."""
    plan = make_plan(params, d=d, guard=False)
    basis = np.eye(plan.d, dtype=np.complex128)
    stepped = floquet_step_batch(basis, plan)
    return FloquetMatrix(entries=stepped.T.copy(), params=params, origin="kicked-rotor")


def diagonalize(matrix: FloquetMatrix) -> FloquetSpectrum:
    """Unitary Schur decomposition of F, phases sorted ascending."""
    d = matrix.d
    if d > MAX_DENSE_DIM:
        raise ValueError(f"dense diagonalization is capped at d={MAX_DENSE_DIM}, got {d}")
    t, z = schur(np.asarray(matrix.entries), output="complex")
    diag = np.diagonal(t)
    off = np.abs(t - np.diag(diag)).max()
    if off > 1e-10 * d:
        cond = np.linalg.cond(np.asarray(matrix.entries))
        raise RuntimeError(
            f"Schur form not diagonal: off-diagonal max {off:.3e}, matrix condition {cond:.3e}"
        )
    phases = np.mod(-np.angle(diag), 2.0 * np.pi)
    order = np.argsort(phases, kind="stable")
    vectors = z.conj().T[order]
    spectrum = FloquetSpectrum(
        eigenphases=phases[order],
        vectors=vectors,
        params=matrix.params,
        origin=matrix.origin,
    )
    recon = (vectors.conj().T * np.exp(-1j * spectrum.eigenphases)) @ vectors
    residual = np.abs(recon - matrix.entries).max()
    if residual > RECONSTRUCTION_TOL:
        raise RuntimeError(f"spectral reconstruction residual {residual:.3e} exceeds 1e-8")
    return spectrum


def _momentum_columns(spectrum: FloquetSpectrum, spec: SuperpositionSpec) -> tuple[np.ndarray, np.ndarray]:
    if spec.basis_kind != "momentum":
        raise ValueError("spectral energy decomposition requires a momentum superposition")
    half = spectrum.d // 2
    for value in (spec.m, spec.n):
        if not -half <= value < half:
            raise ValueError(f"momentum index {value} outside basis [-{half}, {half})")
    return spectrum.vectors[:, spec.m + half], spectrum.vectors[:, spec.n + half]


def _apply_q(spectrum: FloquetSpectrum, coeffs: np.ndarray) -> np.ndarray:
    """Apply Q = U diag(l^2) U^dag to an eigenbasis coefficient vector."""
    l_sq = spectrum.momentum_values().astype(np.float64) ** 2
    return spectrum.vectors @ (l_sq * (spectrum.vectors.conj().T @ coeffs))


def energy_via_spectrum(
    spectrum: FloquetSpectrum, init: SuperpositionSpec, n_kicks: int
) -> tuple[float, float, float]:
    """Scaled energy after n_kicks, split as (total, incoherent, interference)."""
    if n_kicks < 0:
        raise ValueError("n_kicks must be non-negative")
    y, z = _momentum_columns(spectrum, init)
    phase = np.exp(-1j * n_kicks * spectrum.eigenphases)
    y_n = phase * y
    z_n = phase * z
    q_y = _apply_q(spectrum, y_n)
    q_z = _apply_q(spectrum, z_n)
    tau = spectrum.params.tau
    pref = 0.5 * tau * tau
    ca, sa = np.cos(init.alpha), np.sin(init.alpha)
    incoherent = pref * (
        ca * ca * np.real(np.vdot(y_n, q_y)) + sa * sa * np.real(np.vdot(z_n, q_z))
    )
    interference = pref * 2.0 * sa * ca * np.real(
        np.exp(1j * init.beta) * np.vdot(y_n, q_z)
    )
    return incoherent + interference, incoherent, interference


def time_averaged_interference(spectrum: FloquetSpectrum, init: SuperpositionSpec) -> float:
    """Long-time mean of the interference energy: only diagonal terms survive."""
    y, z = _momentum_columns(spectrum, init)
    l_sq = spectrum.momentum_values().astype(np.float64) ** 2
    q_diag = np.abs(spectrum.vectors) ** 2 @ l_sq
    corr = np.sum(q_diag * np.conj(y) * z)
    tau = spectrum.params.tau
    ca, sa = np.cos(init.alpha), np.sin(init.alpha)
    return float(0.5 * tau * tau * 2.0 * sa * ca * np.real(np.exp(1j * init.beta) * corr))


def eigenvector_correlation(spectrum: FloquetSpectrum, l: int, m: int, n: int) -> complex:
    """C_lmn = sum_k |<l|u_k>|^2 <m|u_k> <u_k|n> over all eigenvectors."""
    half = spectrum.d // 2
    for value in (l, m, n):
        if not -half <= value < half:
            raise ValueError(f"momentum index {value} outside basis [-{half}, {half})")
    u = spectrum.vectors
    weight = np.abs(u[:, l + half]) ** 2
    return complex(np.sum(weight * np.conj(u[:, m + half]) * u[:, n + half]))


def interference_ratio(spectrum: FloquetSpectrum, m: int, n: int) -> float:
    """|sum_l l^2 C_lmn| over the matching incoherent sum with l^2 weights."""
    half = spectrum.d // 2
    for value in (m, n):
        if not -half <= value < half:
            raise ValueError(f"momentum index {value} outside basis [-{half}, {half})")
    l_sq = spectrum.momentum_values().astype(np.float64) ** 2
    q_diag = np.abs(spectrum.vectors) ** 2 @ l_sq
    y = spectrum.vectors[:, m + half]
    z = spectrum.vectors[:, n + half]
    numerator = abs(np.sum(q_diag * np.conj(y) * z))
    denominator = float(np.sum(q_diag * np.abs(y) ** 2))
    return float(numerator / denominator)


def bandwidth_estimate(matrix: FloquetMatrix, threshold: float = 1e-8) -> int:
    """Smallest cyclic band distance containing all entries above threshold.

    Distance is min(|i-j|, d-|i-j|): FFT-built matrices wrap around the
    basis edge, so literal |i-j| would report the corner wrap as band.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    mags = np.abs(matrix.entries)
    cut = threshold * mags.max()
    idx = np.arange(matrix.d)
    dist = np.abs(idx[:, None] - idx[None, :])
    dist = np.minimum(dist, matrix.d - dist)
    above = mags >= cut
    if not np.any(above):
        return 0
    return int(dist[above].max())


@dataclass(frozen=True)
class ControlCriterion:
    """Smallness check k*kappa/n_kappa < 0.2 for coherent control.

    The two printed inequality forms are equivalent restatements:
    k < 0.2 n_kappa / kappa and tau > kappa^2 / (0.2 n_kappa), both
    reducing to k * kappa < 0.2 n_kappa since kappa = k tau.
    """

    value: float
    passes: bool
    k: float
    tau: float
    kappa: float
    n_kappa: int
    k_max: float
    tau_min: float
    message: str


def control_criterion(params: SimulationParams, n_kappa: int = 256) -> ControlCriterion:
    """Evaluate the band-smallness condition for phase-coherent control."""
    if n_kappa <= 0:
        raise ValueError("n_kappa must be positive")
    kappa = params.kappa
    value = params.k * kappa / n_kappa
    passes = value < CONTROL_THRESHOLD
    k_max = CONTROL_THRESHOLD * n_kappa / kappa
    tau_min = kappa * kappa / (CONTROL_THRESHOLD * n_kappa)
    if passes:
        message = (
            f"control predicted: k*kappa/n_kappa = {value:.4g} < {CONTROL_THRESHOLD}"
        )
    else:
        message = (
            f"control loss predicted (classical limit): k*kappa/n_kappa = "
            f"{value:.4g} >= {CONTROL_THRESHOLD}; need k < {k_max:.4g} or tau > {tau_min:.4g}"
        )
    return ControlCriterion(
        value=float(value),
        passes=bool(passes),
        k=params.k,
        tau=params.tau,
        kappa=float(kappa),
        n_kappa=n_kappa,
        k_max=float(k_max),
        tau_min=float(tau_min),
        message=message,
    )


def banded_random_model(d: int, bandwidth: int, seed: int) -> FloquetMatrix:
    """Unitary exp(iH) for a banded random Hermitian H, norm scaled to pi.

    H has i.i.d. standard complex Gaussian entries inside |i-j| <= bandwidth
    (Hermitian-symmetrized, real diagonal), zero outside, then is scaled so
    its spectral radius is exactly pi.  The carrier params record the
    effective kick strength bandwidth/2 so downstream code can treat the
    model like a rotor matrix of matching band.
    """
    if d <= 0 or d % 2 != 0:
        raise ValueError("d must be a positive even integer")
    if not 0 <= bandwidth < d // 2:
        raise ValueError("bandwidth must satisfy 0 <= bandwidth < d/2")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = 0.5 * (a + a.conj().T)
    idx = np.arange(d)
    mask = np.abs(idx[:, None] - idx[None, :]) <= bandwidth
    h = np.where(mask, h, 0.0)
    lam, vec = np.linalg.eigh(h)
    scale = np.pi / np.abs(lam).max()
    entries = (vec * np.exp(1j * lam * scale)) @ vec.conj().T
    params = SimulationParams(tau=1.0, k=bandwidth / 2.0, n_basis=d, kicks=0)
    return FloquetMatrix(entries=entries, params=params, origin="banded-random")


def export_spectrum(spectrum: FloquetSpectrum, out_dir: str | Path) -> tuple[Path, Path]:
    """Write eigenphases to spectrum.csv and U to vectors.bin.

    Binary layout: row-major complex128 as interleaved little-endian
    IEEE-754 doubles (Re, Im), d*d pairs, preceded by nothing; the CSV
    carries d implicitly as its row count.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "spectrum.csv"
    lines = ["j,phi_j"]
    lines += [f"{j},{phi:.12g}" for j, phi in enumerate(spectrum.eigenphases)]
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    bin_path = out / "vectors.bin"
    bin_path.write_bytes(np.ascontiguousarray(spectrum.vectors).astype("<c16").tobytes())
    return csv_path, bin_path
