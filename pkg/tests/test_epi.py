import math

import numpy as np
import pytest

from dpilab.epi import (
    covariances_proportional,
    determinant_prefactor_routes,
    divergence_form_equivalence,
    entropy_power_gaussian,
    epi_margin_gaussian,
    epi_margin_scalar,
    random_covariance,
)
from dpilab.errors import DomainError
from dpilab.scalar_models import (
    Gaussian,
    GaussianMixture,
    Laplace,
    Uniform,
    divergence_from_matched_gaussian,
    normalized_iid_sum,
)

TWO_PI_E = 2.0 * math.pi * math.e


def test_entropy_power_scalar():
    # exp(2h) convention: the gaussian value is 2 pi e times the variance
    assert abs(entropy_power_gaussian(3.0) - TWO_PI_E * 3.0) < 1e-10


def test_entropy_power_matrix():
    cov = np.diag([1.0, 4.0])
    assert abs(entropy_power_gaussian(cov) - TWO_PI_E * 2.0) < 1e-10  # det^(1/N)


def test_gaussian_margin_zero_iff_proportional():
    cov = np.array([[2.0, 0.3], [0.3, 1.0]])
    assert abs(epi_margin_gaussian(cov, 3.0 * cov)) < 1e-12
    other = np.array([[1.0, 0.0], [0.0, 4.0]])
    assert epi_margin_gaussian(cov, other) > 1e-4


def test_gaussian_margin_diagonal_example():
    # N(diag(1,4)) + N(diag(4,1)): entropy powers 2, 2; sum has det 25
    a, b = np.diag([1.0, 4.0]), np.diag([4.0, 1.0])
    assert abs(epi_margin_gaussian(a, b) - TWO_PI_E * (5.0 - 4.0)) < 1e-9


def test_gaussian_margin_never_negative_random():
    rng = np.random.default_rng(13)
    for _ in range(50):
        n = int(rng.integers(2, 6))
        a = random_covariance(rng, n)
        b = random_covariance(rng, n)
        assert epi_margin_gaussian(a, b) >= -1e-9


def test_gaussian_margin_dimension_mismatch():
    with pytest.raises(DomainError):
        epi_margin_gaussian(np.eye(2), np.eye(3))


def test_scalar_uniform_pair_margin():
    # exp(2h) margin for two unit uniforms: 12e - 24 plus convolution error
    margin = epi_margin_scalar(Uniform(math.sqrt(3.0)), Uniform(math.sqrt(3.0)))
    assert abs(margin - (12.0 * math.e - 24.0)) < 2e-3
    assert abs(margin - 8.61) < 0.01


def test_scalar_gaussian_pair_equality():
    margin = epi_margin_scalar(Gaussian(1.0), Gaussian(2.0))
    assert abs(margin) < 1e-4


def test_scalar_mixed_pairs_nonnegative():
    mix = GaussianMixture(weights=(0.5, 0.5), means=(-1.0, 1.0), variances=(0.5, 0.5))
    for a, b in [
        (Uniform(1.0), Gaussian(1.0)),
        (Laplace(0.7), Uniform(2.0)),
        (mix, Laplace(1.0)),
    ]:
        assert epi_margin_scalar(a, b) >= -1e-4


def test_prefactor_routes_agree():
    rng = np.random.default_rng(29)
    for n in (2, 8, 16):
        cov = random_covariance(rng, n)
        chol, eig = determinant_prefactor_routes(cov)
        assert abs(chol - eig) <= 1e-10 * abs(chol)


def test_divergence_form_bridge():
    # scalar uniforms through the divergence route: margins map by 2 pi e
    u = Uniform(1.0)
    d1 = divergence_from_matched_gaussian(u)
    d2 = divergence_from_matched_gaussian(normalized_iid_sum(u, 2))
    v = u.variance()
    out = divergence_form_equivalence(
        np.array([[v]]), np.array([[v]]), d_x=d1, d_y=d1, d_sum=d2
    )
    assert abs(out["entropy_margin"] - TWO_PI_E * out["margin"]) < 1e-10
    # lhs 2 exp(-2 D_2) >= 2 exp(-2 D_1): strict for the uniform
    assert out["lhs"] > sum(out["rhs_terms"])
    assert abs(out["lhs"] - 2.0 * v * math.exp(-2.0 * d2)) < 1e-12


def test_divergence_form_gaussian_equality():
    cov = np.array([[1.5, 0.2], [0.2, 0.8]])
    out = divergence_form_equivalence(cov, 2.0 * cov, d_x=0.0, d_y=0.0, d_sum=0.0)
    assert abs(out["margin"]) < 1e-12
    assert abs(out["entropy_margin"]) < 1e-10


def test_covariances_proportional():
    cov = np.array([[2.0, -0.4], [-0.4, 1.2]])
    assert covariances_proportional(cov, 0.7 * cov)
    assert not covariances_proportional(cov, cov + np.diag([0.0, 0.5]))


def test_equality_only_on_proportional_random():
    rng = np.random.default_rng(31)
    for _ in range(20):
        a = random_covariance(rng, 3)
        if bool(rng.integers(2)):
            b = float(rng.uniform(0.5, 2.0)) * a
            assert abs(epi_margin_gaussian(a, b)) < 1e-9
        else:
            b = random_covariance(rng, 3)
            if not covariances_proportional(a, b):
                assert epi_margin_gaussian(a, b) > 0.0
