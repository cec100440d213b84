"""Toeplitz covariance matrices and their log-determinant asymptotics.

For a stationary density Phi the order-N covariance is the symmetric Toeplitz
matrix of autocovariances.  As N grows, the mean log eigenvalue converges to
the integral of ln Phi over the band, which makes that integral the
per-sample log-determinant rate.  Everything here is dense: order is capped
at 2048 and eigenvalues come from the symmetric eigensolver.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DomainError, NumericalError
from .spectra import SpectralDensity

__all__ = [
    "MAX_ORDER",
    "covariance_matrix",
    "toeplitz_eigenvalues",
    "matrix_log_det",
    "log_det",
    "szego_convergence_table",
]

MAX_ORDER = 2048


def _check_order(n: int) -> int:
    n = int(n)
    if n < 1:
        raise DomainError("matrix order must be >= 1")
    if n > MAX_ORDER:
        raise DomainError(f"matrix order capped at {MAX_ORDER} (dense solver only)")
    return n


def covariance_matrix(density: SpectralDensity, n: int) -> np.ndarray:
    """Order-n Toeplitz covariance built from the first n autocovariances."""
    n = _check_order(n)
    return scipy.linalg.toeplitz(density.autocovariance(n))


def toeplitz_eigenvalues(density: SpectralDensity, n: int) -> np.ndarray:
    """Eigenvalues of the order-n covariance, ascending."""
    return np.linalg.eigvalsh(covariance_matrix(density, n))


def matrix_log_det(mat: np.ndarray) -> float:
    """Log determinant of a positive-definite matrix via Cholesky."""
    try:
        chol = np.linalg.cholesky(np.asarray(mat, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"matrix is numerically singular or indefinite: {exc}") from exc
    return float(2.0 * np.sum(np.log(np.diag(chol))))


def log_det(density: SpectralDensity, n: int) -> float:
    """Log determinant of the order-n covariance via Cholesky."""
    return matrix_log_det(covariance_matrix(density, n))


def szego_convergence_table(density: SpectralDensity, sizes) -> list[dict]:
    """Mean log eigenvalue against its band-integral limit for each order.

    ``sizes`` must be strictly ascending.  Each row reports the order, the
    mean log eigenvalue, the limiting integral of ln(density), and the
    absolute gap between the two.
    """
    sizes = [int(s) for s in sizes]
    if sizes != sorted(set(sizes)):
        raise DomainError("orders must be strictly ascending")
    limit = density.log_spectral_integral()
    rows = []
    for n in sizes:
        eigs = toeplitz_eigenvalues(density, n)
        if eigs[0] <= 0:
            raise NumericalError(f"order-{n} covariance has a nonpositive numerical eigenvalue")
        mean_log = float(np.mean(np.log(eigs)))
        rows.append({"n": n, "mean_log_eigenvalue": mean_log, "limit": limit, "gap": abs(mean_log - limit)})
    return rows
