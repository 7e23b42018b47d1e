"""Spatial entanglement of a thermal, non-interacting 1D Bose gas.

Decides whether two finite spatial regions of the gas are entangled,
quantifies the entanglement, and simulates extracting it to a pair of
localized probes.
"""

__version__ = "0.1.0"

from .analysis import (
    CriticalTemperatureCurve,
    SweepResult,
    SweepSpec,
    TcResult,
    WindowScanResult,
    critical_temperature,
    critical_temperature_curve,
    fit_power_law,
    momentum_window_scan,
    run_sweep,
)
from .errors import (
    ChemicalPotentialError,
    DegenerateModeError,
    DivergentSeriesError,
    MalformedCovarianceError,
    NonFiniteInputError,
    NumericalError,
    OrthogonalizationError,
    SpatialEntError,
    TruncationMismatchError,
    UnphysicalStateError,
    ValidationError,
)
from .extraction import (
    ProbeCoupling,
    ProbePairState,
    extraction_test,
    monte_carlo_fourth_moment,
    ppt_probe_oracle,
    probe_state,
    wick_fourth_moment,
)
from .field import (
    FieldMode,
    ThermalFieldConfig,
    mode_function,
    thermal_factor,
    thermal_factors,
)
from .modes import (
    CmAssemblyReport,
    DetectorProfile,
    ModeVector,
    ProfileKind,
    Region,
    TruncationSpec,
    assemble_cm,
    cross_commutator_residual,
    orthogonalize_pair,
    overlap_coefficients,
    prepare_mode_pair,
    symmetric_regions,
)
from .symplectic import (
    CovarianceMatrix4,
    SeparabilityVerdict,
    SymplecticInvariants,
    Verdict,
    eigen_oracle,
    invariants,
    is_physical,
    partial_transpose,
    purity,
    purity_threshold,
    random_physical_cm,
    separability_test,
    symplectic_eigenvalues,
    two_mode_squeezed,
)
