"""Two-level non-Hermitian model of a Dirac point coupled to two sinks.

Complex spectra and exceptional points, sink-coupled density-matrix
dynamics with electron-transfer efficiencies, closed-form efficiency
oracle, random-telegraph-noise-averaged evolution, and batch sweeps.
"""

__version__ = "0.1.0"

from .params import (
    DensityMatrix,
    InitialState,
    ModelParams,
    coupling_from_wavevector,
    effective_hamiltonian,
    initial_density,
)
from .spectral import (
    BranchLabel,
    ComplexSpectrum,
    asymptotic_widths,
    biorthogonal_eigenvectors,
    ep_locus_test,
    label_branches,
    overlap_criterion_solve,
    spectrum,
    st_locate,
)
from .dynamics import IntegratorConfig, TrajectoryRecord, efficiency_curve, propagate
from .analytic import (
    EfficiencyCoefficients,
    coefficients,
    eta0_surface,
    eta1_asymptotic,
    eta1_closed,
    eta2_closed,
)
from .noise import NoiseParams, mc_oracle, propagate_noisy
from .sweep import FigureDataset, GridAxis, SweepGrid, figure_dataset, run_sweep

__all__ = [
    "BranchLabel",
    "ComplexSpectrum",
    "DensityMatrix",
    "EfficiencyCoefficients",
    "FigureDataset",
    "GridAxis",
    "InitialState",
    "IntegratorConfig",
    "ModelParams",
    "NoiseParams",
    "SweepGrid",
    "TrajectoryRecord",
    "asymptotic_widths",
    "biorthogonal_eigenvectors",
    "coefficients",
    "coupling_from_wavevector",
    "effective_hamiltonian",
    "ep_locus_test",
    "eta0_surface",
    "eta1_asymptotic",
    "eta1_closed",
    "eta2_closed",
    "efficiency_curve",
    "figure_dataset",
    "initial_density",
    "label_branches",
    "mc_oracle",
    "overlap_criterion_solve",
    "propagate",
    "propagate_noisy",
    "run_sweep",
    "spectrum",
    "st_locate",
]
