"""Desk-scale laboratory for the two-component boson dimer: exact
occupation-basis diagonalization side by side with the continuous-variable
closed forms, including the spectral collapse at the localization
transition."""

from .model import (
    EffectiveParams,
    ModelParams,
    Regime,
    classify_regime,
    critical_coupling,
    effective_params,
    is_symmetric_case,
)
from .fock import FockBasis, SymmetricMatrix, b_parity_transform, build_basis, build_hamiltonian
from .exact import (
    AmplitudeGrid,
    Spectrum,
    amplitude_grid,
    cluster_grid,
    degenerate_clusters,
    lowest_eigenpairs,
    relative_levels,
)
from .cv import (
    CVEigenstate,
    CVLevel,
    QuadraticForm,
    StationaryPoint,
    collapse_levels,
    cv_eigenstate,
    cv_levels,
    eigenfunction_density,
    hermite,
    potential,
    quadratic_form,
    stationary_points_general,
    stationary_points_symmetric,
)
from .semiclassical import PhasePoint, Trajectory, fixed_points, hamilton_rhs, hs_energy, integrate
from .harness import (
    ComparisonReport,
    RunConfig,
    SweepRecord,
    SweepSpec,
    compare_spectra,
    density_overlap,
    locate_collapse,
    run_point,
    sweep_coupling,
)

__version__ = "0.1.0"
