"""Symmetry-invariant dimensional perturbation theory for trapped fermions.

The package assembles harmonic-order energies of N spin-1/2 fermions in an
isotropic harmonic trap from a large-dimension expansion about the totally
symmetric configuration, with the Pauli principle imposed through the
normal-mode occupation rules.
"""

from .core import (
    EnergyResult,
    ScalingFrame,
    SystemSpec,
    build_scaling_frame,
    scale_energy,
    unscale_energy,
)
from .interaction import (
    HarmonicPair,
    NonInteracting,
    ScatteringResult,
    SquareWellContinued,
    compute_scattering_length,
    evaluate_pair_potential,
    pair_potential_derivatives,
    tune_unitarity,
    unitary_well,
)
from .geometry import (
    InternalCoordinates,
    SymmetricMinimum,
    effective_potential,
    find_symmetric_minimum,
    gramian_inverse_diagonal,
)
from .spectrum import (
    FGPatterns,
    NormalModeSpectrum,
    build_fg_patterns,
    compute_v0,
    full_eigensolve,
    johnson_eigenvalues,
    reduced_eigensolve,
)
from .pauli import (
    HOConfiguration,
    OccupancyState,
    SpectrumLevel,
    constraint_sums,
    enumerate_spectrum,
    fill_shells,
    ground_configurations,
    partition_function,
    select_ground_occupancy,
)
from .assembler import (
    BenchmarkRecord,
    BuildingBlockCache,
    assemble_energy,
    compare,
    extrapolate_zero_range,
    run_pipeline,
    sweep,
)

__all__ = [
    "BenchmarkRecord",
    "BuildingBlockCache",
    "EnergyResult",
    "FGPatterns",
    "HOConfiguration",
    "HarmonicPair",
    "InternalCoordinates",
    "NonInteracting",
    "NormalModeSpectrum",
    "OccupancyState",
    "ScalingFrame",
    "ScatteringResult",
    "SpectrumLevel",
    "SquareWellContinued",
    "SymmetricMinimum",
    "SystemSpec",
    "assemble_energy",
    "build_fg_patterns",
    "build_scaling_frame",
    "compare",
    "compute_scattering_length",
    "compute_v0",
    "constraint_sums",
    "effective_potential",
    "enumerate_spectrum",
    "evaluate_pair_potential",
    "extrapolate_zero_range",
    "fill_shells",
    "find_symmetric_minimum",
    "full_eigensolve",
    "gramian_inverse_diagonal",
    "ground_configurations",
    "johnson_eigenvalues",
    "pair_potential_derivatives",
    "partition_function",
    "reduced_eigensolve",
    "run_pipeline",
    "scale_energy",
    "select_ground_occupancy",
    "sweep",
    "tune_unitarity",
    "unitary_well",
    "unscale_energy",
]

__version__ = "0.1.0"
