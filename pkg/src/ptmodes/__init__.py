"""Exact Gaussian dynamics of two coupled bosonic modes with balanced gain and
loss: propagators, reservoir noise budgets, nonclassicality and entanglement
witnesses, parameter sweeps, and independent numerical oracles."""

from ._version import __version__
from .core import (
    EP_TOL_DEFAULT,
    DerivedScales,
    DynamicalSystem,
    EPDegenerateError,
    ModelParams,
    Regime,
    build_system,
    derive_scales,
)
from .dynamics import (
    NoiseMoments,
    Propagator,
    ReservoirModel,
    ReservoirSpec,
    SinkDiagnostics,
    equal_time_commutators,
    ff_from_L0,
    full_propagator_matrix,
    noise_moments_full,
    propagator,
    reservoir_spec,
    sink_diagnostics,
    tailor_reservoir,
)
from .coeffs import (
    CoefficientConsistencyError,
    CoefficientModel,
    GaussianCoeffs,
    GaussianState,
    closed_form_coefficient_arrays,
    coeffs_closed_form,
    coeffs_general,
    evolve_state,
    mean_amplitudes,
)
from .witnesses import (
    ComplexSymplecticEigenvalueError,
    CovariancePT,
    NonHermitianInputError,
    WitnessFlag,
    WitnessQuantity,
    WitnessReport,
    max_over_period,
    negativity,
    nonclassicality_depth,
    period,
    witness_report,
)
from .oracle import (
    OracleConfig,
    VerificationReport,
    expm_oracle,
    moment_ode_oracle,
    run_verification,
    s_scan_depth_oracle,
)

__all__ = [
    "__version__",
    "EP_TOL_DEFAULT",
    "DerivedScales",
    "DynamicalSystem",
    "EPDegenerateError",
    "ModelParams",
    "Regime",
    "build_system",
    "derive_scales",
    "NoiseMoments",
    "Propagator",
    "ReservoirModel",
    "ReservoirSpec",
    "SinkDiagnostics",
    "equal_time_commutators",
    "ff_from_L0",
    "full_propagator_matrix",
    "noise_moments_full",
    "propagator",
    "reservoir_spec",
    "sink_diagnostics",
    "tailor_reservoir",
    "CoefficientConsistencyError",
    "CoefficientModel",
    "GaussianCoeffs",
    "GaussianState",
    "closed_form_coefficient_arrays",
    "coeffs_closed_form",
    "coeffs_general",
    "evolve_state",
    "mean_amplitudes",
    "ComplexSymplecticEigenvalueError",
    "CovariancePT",
    "NonHermitianInputError",
    "WitnessFlag",
    "WitnessQuantity",
    "WitnessReport",
    "max_over_period",
    "negativity",
    "nonclassicality_depth",
    "period",
    "witness_report",
    "OracleConfig",
    "VerificationReport",
    "expm_oracle",
    "moment_ode_oracle",
    "run_verification",
    "s_scan_depth_oracle",
]
