import math

import numpy as np
import pytest
import scipy.integrate

from dpilab.errors import DomainError, NumericalError
from dpilab.gaussian_info import (
    LOG_2PIE,
    entropy_from_divergence,
    gaussian_divergence,
    gaussian_entropy,
)


def test_scalar_entropy():
    s2 = 2.7
    assert abs(gaussian_entropy(s2) - 0.5 * math.log(2 * math.pi * math.e * s2)) < 1e-14


def test_entropy_of_diagonal():
    cov = np.diag([1.0, 4.0, 0.25])
    expected = 1.5 * LOG_2PIE + 0.5 * math.log(1.0 * 4.0 * 0.25)
    assert abs(gaussian_entropy(cov) - expected) < 1e-12


def test_divergence_zero_on_equal():
    cov = np.array([[2.0, 0.5], [0.5, 1.0]])
    assert gaussian_divergence(cov, cov) == 0.0


def test_scalar_divergence_closed_form():
    s, t = 3.0, 1.5
    expected = 0.5 * (s / t - 1.0 - math.log(s / t))
    assert abs(gaussian_divergence(s, t) - expected) < 1e-13


def test_scalar_divergence_against_quad():
    # independent route: integrate p ln(p/q) for two centered normals
    s, t = 0.8, 2.0

    def integrand(x):
        lp = -0.5 * x * x / s - 0.5 * math.log(2 * math.pi * s)
        lq = -0.5 * x * x / t - 0.5 * math.log(2 * math.pi * t)
        return math.exp(lp) * (lp - lq)

    ref, _ = scipy.integrate.quad(integrand, -12.0, 12.0)
    assert abs(gaussian_divergence(s, t) - ref) < 1e-10


def test_divergence_nonnegative_random():
    rng = np.random.default_rng(11)
    for _ in range(25):
        a = rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3))
        cov_p = a @ a.T + 0.1 * np.eye(3)
        cov_q = b @ b.T + 0.1 * np.eye(3)
        assert gaussian_divergence(cov_p, cov_q) >= 0.0


def test_entropy_bridge():
    # h(p) = h(matched gaussian) - D(p || matched gaussian)
    d_uniform = 0.5 * math.log(math.pi * math.e / 6.0)
    h = entropy_from_divergence(d_uniform, 1.0 / 3.0)
    assert abs(h - math.log(2.0)) < 1e-12  # uniform on [-1, 1]


def test_asymmetric_rejected():
    with pytest.raises(DomainError):
        gaussian_entropy(np.array([[1.0, 0.3], [0.0, 1.0]]))


def test_not_positive_definite_rejected():
    with pytest.raises(DomainError):
        gaussian_entropy(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_condition_guard():
    with pytest.raises(NumericalError):
        gaussian_entropy(np.diag([1.0, 1e15]))


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        gaussian_divergence(np.eye(2), np.eye(3))


def test_nonfinite_rejected():
    with pytest.raises(DomainError):
        gaussian_entropy(np.array([[np.inf]]))
