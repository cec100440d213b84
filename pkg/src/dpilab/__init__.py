"""Divergence-power inequality lab.

Numerical checks for the information inequalities obeyed by sums of
independent stationary processes: alpha-weighted divergence-rate bounds in
discrete and band-limited continuous time, Toeplitz eigenvalue asymptotics,
the finite-dimensional entropy-power inequality and its divergence form, and
the white-Gaussian-channel estimation quantities behind them.  Everything is
organized around exact small-scale oracles; randomized sweeps live in
``suites`` and are fully deterministic for a fixed seed.
"""

from .cmmse import (
    CmmseTrajectory,
    channel_divergence_gaussian,
    cmmse_combination_check,
    divergence_combination_check,
    epi_from_cmmse_demo,
    gaussian_cmmse_trajectory,
    high_snr_limit_check,
    scalar_channel_divergence_limit,
    simulate_cmmse_paths,
)
from .dpi import (
    ContinuousProcessModel,
    DivergenceRate,
    ProcessModel,
    alpha_coefficients,
    divergence_rate,
    dpi_check_continuous,
    dpi_check_discrete,
    iid_sum_divergence_sequence,
    pairwise_proportional,
)
from .epi import (
    covariances_proportional,
    determinant_prefactor_routes,
    divergence_form_equivalence,
    epi_margin_gaussian,
    epi_margin_scalar,
)
from .errors import CapabilityError, ConfigError, DomainError, NumericalError
from .gaussian_info import entropy_from_divergence, gaussian_divergence, gaussian_entropy
from .reports import InequalityReport
from .scalar_models import (
    Gaussian,
    GaussianMixture,
    GridDensity,
    Laplace,
    ScalarDistribution,
    Uniform,
    convolve,
    differential_entropy,
    divergence_from_matched_gaussian,
    normalized_iid_sum,
    scale,
)
from .spectra import (
    ContinuousSpectralDensity,
    PiecewiseConstant,
    RationalArma,
    SpectralDensity,
    Tabulated,
    White,
    sample_bandlimited,
)
from .toeplitz import (
    covariance_matrix,
    log_det,
    matrix_log_det,
    szego_convergence_table,
    toeplitz_eigenvalues,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "CapabilityError",
    "ConfigError",
    "DomainError",
    "NumericalError",
    "SpectralDensity",
    "White",
    "RationalArma",
    "PiecewiseConstant",
    "Tabulated",
    "ContinuousSpectralDensity",
    "sample_bandlimited",
    "covariance_matrix",
    "toeplitz_eigenvalues",
    "matrix_log_det",
    "log_det",
    "szego_convergence_table",
    "gaussian_entropy",
    "gaussian_divergence",
    "entropy_from_divergence",
    "ScalarDistribution",
    "Gaussian",
    "Uniform",
    "Laplace",
    "GaussianMixture",
    "GridDensity",
    "differential_entropy",
    "divergence_from_matched_gaussian",
    "convolve",
    "normalized_iid_sum",
    "scale",
    "InequalityReport",
    "DivergenceRate",
    "ProcessModel",
    "ContinuousProcessModel",
    "alpha_coefficients",
    "pairwise_proportional",
    "divergence_rate",
    "dpi_check_discrete",
    "dpi_check_continuous",
    "iid_sum_divergence_sequence",
    "epi_margin_gaussian",
    "epi_margin_scalar",
    "divergence_form_equivalence",
    "determinant_prefactor_routes",
    "covariances_proportional",
    "CmmseTrajectory",
    "channel_divergence_gaussian",
    "gaussian_cmmse_trajectory",
    "cmmse_combination_check",
    "divergence_combination_check",
    "high_snr_limit_check",
    "scalar_channel_divergence_limit",
    "epi_from_cmmse_demo",
    "simulate_cmmse_paths",
]
