"""Quantum communication without a shared spatial origin.

A message state travels together with a reference token; the receiver measures
the token, corrects by the measured offset, and keeps a state decohered only
through a multiplicative kernel on momentum off-diagonals. The package builds
the states, the group average over offsets, the token measurement, the
recovery channel, and the closed-form fidelities, plus a CLI that emits the
figure and convergence artifacts.
"""

from .analytic import (
    MaxFidelityResult,
    beta,
    gaussian_fidelity,
    golden_section_max,
    maximize_fidelity,
    superposition_fidelity,
)
from .channel import (
    ChannelReport,
    DecoherenceKernel,
    apply_by_convolution,
    apply_kernel,
    apply_translate_mixture,
    asymptotic_kernel,
    fidelity,
    finite_tau_kernel,
    identity_kernel,
    kernel_fidelity,
    kernel_report,
    mc_protocol,
    numeric_fidelity,
)
from .errors import (
    BasisMismatch,
    InvalidParameter,
    InvalidState,
    OptimizationError,
    QuadratureGuard,
    RefTokenError,
    SupportEscape,
)
from .grid import (
    Basis,
    DensityMatrix,
    Grid,
    WaveFunction,
    in_basis,
    make_grid,
    purity,
    to_momentum_basis,
    to_position_basis,
)
from .group import (
    TwirlEnsemble,
    compact_twirl,
    default_node_count,
    encode,
    translate,
    twirl_factor,
    twirl_nodes,
)
from .povm import (
    MeasurementOutcome,
    OutcomeDistribution,
    Smearing,
    check_covariance,
    outcome_density,
    outcome_distribution,
    remainder_weight,
    sample_outcome,
    sample_outcomes,
)
from .states import (
    GaussianSpec,
    GaussianToken,
    SuperpositionToken,
    auto_grid,
    gaussian_wavefunction,
    superposition_norm,
    token_overlap,
    token_wavefunction,
)

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "BasisMismatch",
    "ChannelReport",
    "DecoherenceKernel",
    "DensityMatrix",
    "GaussianSpec",
    "GaussianToken",
    "Grid",
    "InvalidParameter",
    "InvalidState",
    "MaxFidelityResult",
    "MeasurementOutcome",
    "OptimizationError",
    "OutcomeDistribution",
    "QuadratureGuard",
    "RefTokenError",
    "Smearing",
    "SuperpositionToken",
    "SupportEscape",
    "TwirlEnsemble",
    "WaveFunction",
    "apply_by_convolution",
    "apply_kernel",
    "apply_translate_mixture",
    "asymptotic_kernel",
    "auto_grid",
    "beta",
    "check_covariance",
    "compact_twirl",
    "default_node_count",
    "encode",
    "fidelity",
    "finite_tau_kernel",
    "gaussian_fidelity",
    "gaussian_wavefunction",
    "golden_section_max",
    "identity_kernel",
    "in_basis",
    "kernel_fidelity",
    "kernel_report",
    "make_grid",
    "maximize_fidelity",
    "mc_protocol",
    "numeric_fidelity",
    "outcome_density",
    "outcome_distribution",
    "purity",
    "remainder_weight",
    "sample_outcome",
    "sample_outcomes",
    "superposition_fidelity",
    "superposition_norm",
    "to_momentum_basis",
    "to_position_basis",
    "token_overlap",
    "token_wavefunction",
    "translate",
    "twirl_factor",
    "twirl_nodes",
]
