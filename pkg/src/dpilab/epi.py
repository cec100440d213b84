"""Finite-dimensional entropy-power inequality and its divergence form.

For independent N-dimensional vectors, exp{(2/N) h(X+Y)} is superadditive:
it dominates exp{(2/N) h(X)} + exp{(2/N) h(Y)}, with equality exactly for
Gaussian vectors with proportional covariances.  Substituting the entropy
bridge h(p) = h(g) - D(p||g), with g the matched Gaussian, turns the same
statement into one about determinant prefactors |Sigma|^{1/N} and divergence
exponentials; the two margins differ by the factor 2*pi*e and nothing else.
``divergence_form_equivalence`` verifies that correspondence numerically,
along with the identity |Sigma|^{1/N} = exp{(1/N) sum ln lambda_i}.

Gaussian margins are exact (Cholesky entropies).  Scalar margins go through
the density convolution pipeline and carry its tolerance budget, about 1e-4
absolute near zero.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, NumericalError
from .gaussian_info import LOG_2PIE, gaussian_entropy
from .scalar_models import ScalarDistribution, convolve, differential_entropy
from .toeplitz import matrix_log_det

__all__ = [
    "entropy_power_gaussian",
    "epi_margin_gaussian",
    "epi_margin_scalar",
    "divergence_form_equivalence",
    "determinant_prefactor_routes",
    "covariances_proportional",
    "random_covariance",
]

_TWO_PI_E = math.exp(LOG_2PIE)


def _paired(cov_x, cov_y) -> tuple[np.ndarray, np.ndarray]:
    cov_x = np.asarray(cov_x, dtype=float)
    cov_y = np.asarray(cov_y, dtype=float)
    if cov_x.shape != cov_y.shape or cov_x.ndim != 2:
        raise DomainError(f"covariance dimensions differ: {cov_x.shape} vs {cov_y.shape}")
    return cov_x, cov_y


def entropy_power_gaussian(cov) -> float:
    """exp{(2/N) h} for a Gaussian with the given covariance."""
    n = np.atleast_2d(np.asarray(cov, dtype=float)).shape[0]
    return math.exp(2.0 * gaussian_entropy(cov) / n)


def epi_margin_gaussian(cov_x, cov_y) -> float:
    """Superadditivity margin of the entropy exponentials for Gaussian vectors.

    Nonnegative up to roundoff; zero exactly when the covariances are
    proportional.
    """
    cov_x, cov_y = _paired(cov_x, cov_y)
    return entropy_power_gaussian(cov_x + cov_y) - entropy_power_gaussian(cov_x) - entropy_power_gaussian(cov_y)


def epi_margin_scalar(p_x: ScalarDistribution, p_y: ScalarDistribution) -> float:
    """Scalar superadditivity margin via density convolution.

    exp{2 h(X+Y)} - exp{2 h(X)} - exp{2 h(Y)} with the sum entropy computed
    on the convolved density.  Carries the convolution tolerance budget.
    """
    h_sum = differential_entropy(convolve(p_x, p_y))
    return (
        math.exp(2.0 * h_sum)
        - math.exp(2.0 * p_x.differential_entropy())
        - math.exp(2.0 * p_y.differential_entropy())
    )


def determinant_prefactor_routes(cov) -> tuple[float, float]:
    """|Sigma|^{1/N} via Cholesky log-determinant and via eigenvalue sums."""
    n = cov.shape[0]
    by_cholesky = math.exp(matrix_log_det(cov) / n)
    eigenvalues = np.linalg.eigvalsh(cov)
    if np.min(eigenvalues) <= 0.0:
        raise DomainError("covariance is not positive definite")
    by_eigen = math.exp(float(np.mean(np.log(eigenvalues))))
    return by_cholesky, by_eigen


def divergence_form_equivalence(cov_x, cov_y, d_x: float, d_y: float, d_sum: float) -> dict:
    """Evaluate the divergence form of the superadditivity inequality.

    Both sides use prefactors |Sigma|^{1/N}; each prefactor is computed twice
    (Cholesky log-determinant and eigenvalue sum) and the routes must agree
    to 1e-8 relative.  The margin must also match the entropy-exponential
    margin under h(p) = h(g) - D(p||g), which differs from it by exactly
    2*pi*e; disagreement beyond 1e-8 raises NumericalError.  The inequality
    itself is reported, not asserted: whether it must hold depends on the
    divergences describing real distributions with these covariances.
    """
    cov_x, cov_y = _paired(cov_x, cov_y)
    if min(d_x, d_y, d_sum) < 0.0:
        raise DomainError("divergences must be nonnegative")
    n = cov_x.shape[0]
    cov_sum = cov_x + cov_y
    prefactors = {}
    for name, cov in (("x", cov_x), ("y", cov_y), ("sum", cov_sum)):
        chol, eig = determinant_prefactor_routes(cov)
        if abs(chol - eig) > 1e-8 * max(1.0, abs(chol)):
            raise NumericalError(
                f"determinant prefactor routes disagree for {name}: {chol!r} vs {eig!r}",
                achieved_tol=abs(chol - eig),
            )
        prefactors[name] = chol
    lhs = prefactors["sum"] * math.exp(-2.0 * d_sum / n)
    rhs_terms = (
        prefactors["x"] * math.exp(-2.0 * d_x / n),
        prefactors["y"] * math.exp(-2.0 * d_y / n),
    )
    margin = lhs - sum(rhs_terms)

    h_x = gaussian_entropy(cov_x) - d_x
    h_y = gaussian_entropy(cov_y) - d_y
    h_sum = gaussian_entropy(cov_sum) - d_sum
    entropy_margin = (
        math.exp(2.0 * h_sum / n) - math.exp(2.0 * h_x / n) - math.exp(2.0 * h_y / n)
    )
    if abs(entropy_margin - _TWO_PI_E * margin) > 1e-8 * max(1.0, abs(entropy_margin)):
        raise NumericalError(
            "entropy and divergence margins disagree under the entropy bridge",
            achieved_tol=abs(entropy_margin - _TWO_PI_E * margin),
        )
    return {
        "lhs": lhs,
        "rhs_terms": list(rhs_terms),
        "margin": margin,
        "entropy_margin": entropy_margin,
        "prefactors": prefactors,
        "bridge_factor": _TWO_PI_E,
    }


def covariances_proportional(cov_x, cov_y, tol: float = 1e-9) -> bool:
    """True when cov_y = c * cov_x for a positive constant, within tol."""
    cov_x, cov_y = _paired(cov_x, cov_y)
    c = float(np.vdot(cov_x, cov_y) / np.vdot(cov_x, cov_x))
    if c <= 0.0:
        return False
    scale = max(1.0, float(np.max(np.abs(cov_y))))
    return bool(np.max(np.abs(cov_y - c * cov_x)) <= tol * scale)


def random_covariance(rng: np.random.Generator, n: int, jitter: float = 1e-6) -> np.ndarray:
    """Random positive-definite matrix T T' + jitter I, safely conditioned."""
    t = rng.standard_normal((n, n))
    return t @ t.T + jitter * np.eye(n)
