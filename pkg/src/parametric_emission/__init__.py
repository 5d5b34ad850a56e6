"""Complex spectral analysis and photon emission of a driven parametric oscillator
coupled to a one-dimensional photonic band."""

__version__ = "0.1.0"

from .analytic import (
    ALL_SHEETS,
    FIRST_SHEET,
    SECOND_SHEET,
    ComplexPoint,
    Sheet,
    SheetSelector,
    effective_liouvillian,
    green,
    green_inverse,
    green_inverse_derivative,
    reachable_sheets,
    self_energy,
    self_energy_derivative,
)
from .dynamics import (
    BromwichConfig,
    CoefficientSet,
    coefficient_laplace,
    coefficient_set,
    commutator_check,
    invert_laplace,
    photon_number_density,
    photon_number_oscillator,
)
from .emission import (
    Spectrum,
    SpectrumKind,
    emission_spectrum_from_dynamics,
    emission_spectrum_stationary,
    emission_spectrum_unstable,
    photon_flux_stationary,
    stationary_photon_number,
)
from .errors import (
    AccuracyError,
    BranchPointError,
    ConfigurationError,
    ConvergenceError,
    HorizonError,
    ParameterError,
    PoleError,
    RegimeError,
    TrackBreakError,
)
from .model import ModelParams, coupling_g, dispersion_omega_k, rest_frame_energy
from .oracle import LatticeConfig, LatticeOracle, OracleState, build_generator, evolve, photon_numbers
from .spectral import (
    BranchTrack,
    EigenRecord,
    Rectangle,
    find_eigenfrequencies,
    instability_rate,
    sweep_branches,
    threshold_detuning,
)

__all__ = [
    "ALL_SHEETS",
    "AccuracyError",
    "BranchPointError",
    "BranchTrack",
    "BromwichConfig",
    "CoefficientSet",
    "ComplexPoint",
    "ConfigurationError",
    "ConvergenceError",
    "EigenRecord",
    "FIRST_SHEET",
    "HorizonError",
    "LatticeConfig",
    "LatticeOracle",
    "ModelParams",
    "OracleState",
    "ParameterError",
    "PoleError",
    "Rectangle",
    "RegimeError",
    "SECOND_SHEET",
    "Sheet",
    "SheetSelector",
    "Spectrum",
    "SpectrumKind",
    "TrackBreakError",
    "build_generator",
    "coefficient_laplace",
    "coefficient_set",
    "commutator_check",
    "coupling_g",
    "dispersion_omega_k",
    "effective_liouvillian",
    "emission_spectrum_from_dynamics",
    "emission_spectrum_stationary",
    "emission_spectrum_unstable",
    "evolve",
    "find_eigenfrequencies",
    "green",
    "green_inverse",
    "green_inverse_derivative",
    "instability_rate",
    "invert_laplace",
    "photon_flux_stationary",
    "photon_number_density",
    "photon_number_oscillator",
    "photon_numbers",
    "reachable_sheets",
    "rest_frame_energy",
    "self_energy",
    "self_energy_derivative",
    "stationary_photon_number",
    "sweep_branches",
    "threshold_detuning",
]
