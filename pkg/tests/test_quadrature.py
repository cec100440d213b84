import math

import numpy as np
import pytest
import scipy.integrate

from dpilab.errors import NumericalError
from dpilab.quadrature import integrate


def test_polynomial_exact():
    # order-12 Gauss-Legendre integrates degree-23 polynomials exactly
    val = integrate(lambda x: x**8, 0.0, 2.0)
    assert abs(val - 2.0**9 / 9.0) < 1e-13


def test_sine_closed_form():
    val = integrate(np.sin, 0.0, math.pi)
    assert abs(val - 2.0) < 1e-12


def test_against_scipy_smooth():
    fn = lambda x: np.exp(-(x**2)) * np.cos(3.0 * x)
    ours = integrate(fn, -3.0, 3.0, tol=1e-12)
    ref, _ = scipy.integrate.quad(lambda x: math.exp(-x * x) * math.cos(3.0 * x), -3.0, 3.0)
    assert abs(ours - ref) < 1e-10


def test_jump_with_breakpoint():
    fn = lambda x: np.where(x < 0.0, 1.0, 2.0)
    val = integrate(fn, -1.0, 1.0, breakpoints=(0.0,))
    assert abs(val - 3.0) < 1e-12


def test_kink_with_breakpoint_matches_scipy():
    fn = lambda x: np.abs(x - 0.3)
    ours = integrate(fn, -1.0, 1.0, breakpoints=(0.3,))
    ref, _ = scipy.integrate.quad(lambda x: abs(x - 0.3), -1.0, 1.0, points=[0.3])
    assert abs(ours - ref) < 1e-12


def test_log_integrand_near_small_values():
    # the kind of integrand the alpha coefficients produce
    fn = lambda x: np.log(0.25 + np.cos(2.0 * np.pi * x) ** 2)
    ours = integrate(fn, -0.5, 0.5, tol=1e-12)
    ref, _ = scipy.integrate.quad(
        lambda x: math.log(0.25 + math.cos(2.0 * math.pi * x) ** 2), -0.5, 0.5, limit=200
    )
    assert abs(ours - ref) < 1e-9


def test_budget_exhaustion_raises():
    rough = lambda x: np.sin(1.0 / (np.abs(x) + 1e-12))
    with pytest.raises(NumericalError) as info:
        integrate(rough, 0.0, 1.0, max_panels=8)
    assert info.value.achieved_tol is not None


def test_bad_interval_rejected():
    with pytest.raises(ValueError):
        integrate(np.cos, 1.0, 1.0)


def test_breakpoints_outside_interval_ignored():
    val = integrate(np.cos, 0.0, 1.0, breakpoints=(-5.0, 7.0))
    assert abs(val - math.sin(1.0)) < 1e-12


def test_integrand_receives_arrays():
    seen = []

    def fn(x):
        seen.append(np.asarray(x).ndim)
        return np.ones_like(x)

    integrate(fn, 0.0, 1.0)
    assert all(d == 1 for d in seen)
