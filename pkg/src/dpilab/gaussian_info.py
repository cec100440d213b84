"""Entropy and divergence of centered multivariate Gaussians, in nats.

The divergence bridge h(p) = h(g) - D(p || g), with g the Gaussian matched to
the second-order statistics of p, is what connects entropy statements to
divergence statements throughout the package; the helpers here are the
Gaussian half of that bridge.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

from .errors import DomainError, NumericalError

__all__ = [
    "LOG_2PIE",
    "CONDITION_GUARD",
    "gaussian_entropy",
    "gaussian_divergence",
    "entropy_from_divergence",
]

LOG_2PIE = math.log(2.0 * math.pi * math.e)
CONDITION_GUARD = 1e12


def _as_covariance(cov) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(cov, dtype=float))
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DomainError("covariance must be a square matrix or a scalar variance")
    if not np.all(np.isfinite(arr)):
        raise DomainError("covariance has non-finite entries")
    scale = np.max(np.abs(arr)) or 1.0
    if np.max(np.abs(arr - arr.T)) > 1e-9 * scale:
        raise DomainError("covariance must be symmetric within 1e-9 relative")
    return 0.5 * (arr + arr.T)


def _cholesky(cov: np.ndarray) -> np.ndarray:
    try:
        return scipy.linalg.cholesky(cov, lower=True)
    except scipy.linalg.LinAlgError as exc:
        # scipy's message names the offending leading minor index
        raise DomainError(f"covariance is not positive definite: {exc}") from exc


def _check_condition(cov: np.ndarray) -> None:
    eigs = np.linalg.eigvalsh(cov)
    if eigs[0] <= 0 or eigs[-1] / eigs[0] > CONDITION_GUARD:
        raise NumericalError(f"covariance condition number exceeds the {CONDITION_GUARD:g} guard")


def gaussian_entropy(cov) -> float:
    """Differential entropy (N/2) ln(2 pi e) + (1/2) ln det(cov)."""
    cov = _as_covariance(cov)
    chol = _cholesky(cov)
    _check_condition(cov)
    n = cov.shape[0]
    return 0.5 * n * LOG_2PIE + float(np.sum(np.log(np.diag(chol))))


def gaussian_divergence(cov_p, cov_q) -> float:
    """KL divergence between centered Gaussians with the given covariances.

    Returns (1/2) [tr(cov_q^{-1} cov_p) - N - ln(det cov_p / det cov_q)],
    clamped at zero against roundoff for identical inputs.
    """
    cov_p = _as_covariance(cov_p)
    cov_q = _as_covariance(cov_q)
    if cov_p.shape != cov_q.shape:
        raise DomainError("covariances must share a dimension")
    chol_p = _cholesky(cov_p)
    chol_q = _cholesky(cov_q)
    _check_condition(cov_p)
    _check_condition(cov_q)
    n = cov_p.shape[0]
    trace = float(np.trace(scipy.linalg.cho_solve((chol_q, True), cov_p)))
    log_det_ratio = 2.0 * float(np.sum(np.log(np.diag(chol_p))) - np.sum(np.log(np.diag(chol_q))))
    return max(0.0, 0.5 * (trace - n - log_det_ratio))


def entropy_from_divergence(divergence: float, matched_cov) -> float:
    """Entropy of p recovered from D(p || g) and the matched Gaussian g."""
    if not np.isfinite(divergence):
        raise DomainError("divergence must be finite")
    return gaussian_entropy(matched_cov) - float(divergence)
