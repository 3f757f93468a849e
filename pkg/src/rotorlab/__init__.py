"""Numerical laboratory for phase-coherent control of kicked-rotor diffusion.

A periodically kicked quantum rotor is chaotic in the classical limit, yet
the diffusion of a two-component momentum superposition depends sharply on
the relative phase of the components.  This package propagates such states
with a split-operator Floquet map, compares them against signed classical
phase-space ensembles, explains the phase sensitivity through eigenvector
correlations of the Floquet operator versus a banded random-matrix
baseline, and measures how random-phase decoherence degrades the control.
"""

from .classical import (
    ClassicalEnsemble,
    ClassicalTrajectory,
    ensemble_energy,
    evolve_ensemble,
    propagate_ensemble,
    standard_map_step,
    wigner_ensemble,
)
from .decoherence import (
    DecoherenceConfig,
    PhaseStream,
    RealizationEnsemble,
    density_matrix,
    evolve_realizations,
    linear_entropy,
    propagate_with_decoherence,
    random_phase_step,
)
from .experiments import (
    PRESETS,
    ConvergenceReport,
    ExperimentPreset,
    RunResult,
    convergence_report,
    parse_config,
    run_preset,
)
from .propagator import (
    BasisTruncationError,
    PropagatorPlan,
    choose_basis_size,
    edge_band_population,
    floquet_step,
    floquet_step_inverse,
    make_plan,
    propagate,
)
from .spectral import (
    ControlCriterion,
    FloquetMatrix,
    FloquetSpectrum,
    banded_random_model,
    bandwidth_estimate,
    build_floquet_matrix,
    control_criterion,
    diagonalize,
    eigenvector_correlation,
    energy_via_spectrum,
    export_spectrum,
    interference_ratio,
    time_averaged_interference,
)
from .states import (
    AngularState,
    ObservableSeries,
    SimulationParams,
    SuperpositionSpec,
    momentum_distribution,
    overlap,
    prepare_superposition,
    scaled_energy,
    tail_probability,
)

__version__ = "0.1.0"

__all__ = [
    "AngularState",
    "BasisTruncationError",
    "ClassicalEnsemble",
    "ClassicalTrajectory",
    "ControlCriterion",
    "ConvergenceReport",
    "DecoherenceConfig",
    "ExperimentPreset",
    "FloquetMatrix",
    "FloquetSpectrum",
    "ObservableSeries",
    "PRESETS",
    "PhaseStream",
    "PropagatorPlan",
    "RealizationEnsemble",
    "RunResult",
    "SimulationParams",
    "SuperpositionSpec",
    "banded_random_model",
    "bandwidth_estimate",
    "build_floquet_matrix",
    "choose_basis_size",
    "control_criterion",
    "convergence_report",
    "density_matrix",
    "diagonalize",
    "edge_band_population",
    "eigenvector_correlation",
    "energy_via_spectrum",
    "ensemble_energy",
    "evolve_ensemble",
    "evolve_realizations",
    "export_spectrum",
    "floquet_step",
    "floquet_step_inverse",
    "interference_ratio",
    "linear_entropy",
    "make_plan",
    "momentum_distribution",
    "overlap",
    "parse_config",
    "prepare_superposition",
    "propagate",
    "propagate_ensemble",
    "propagate_with_decoherence",
    "random_phase_step",
    "run_preset",
    "scaled_energy",
    "standard_map_step",
    "tail_probability",
    "time_averaged_interference",
    "wigner_ensemble",
]
