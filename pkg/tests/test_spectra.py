import math

import numpy as np
import pytest
import scipy.integrate

from dpilab.errors import DomainError
from dpilab.spectra import (
    ContinuousSpectralDensity,
    PiecewiseConstant,
    RationalArma,
    Tabulated,
    White,
    add,
    sample_bandlimited,
)


def quad_autocov(density, k):
    """Independent route: r_k = int_{-1/2}^{1/2} Phi(f) cos(2 pi k f) df."""
    cuts = list(density.breakpoints())
    val, _ = scipy.integrate.quad(
        lambda f: density.evaluate(f) * math.cos(2.0 * math.pi * k * f),
        -0.5,
        0.5,
        points=cuts if 0 < len(cuts) <= 40 else None,
        limit=300,
    )
    return val


def test_white_basics():
    w = White(2.5)
    assert w.evaluate(0.3) == 2.5
    assert abs(w.power() - 2.5) < 1e-15
    assert abs(w.log_spectral_integral() - math.log(2.5)) < 1e-15
    np.testing.assert_allclose(w.autocovariance(4), [2.5, 0.0, 0.0, 0.0], atol=1e-15)


def test_white_rejects_bad_level():
    with pytest.raises(DomainError):
        White(0.0)
    with pytest.raises(DomainError):
        White(-1.0)


def test_ar1_closed_forms():
    a, s2 = 0.6, 1.3
    sp = RationalArma(ar=(a,), sigma2=s2)
    # peak value at f=0 is sigma2/(1-a)^2
    assert abs(sp.evaluate(0.0) - s2 / (1.0 - a) ** 2) < 1e-12
    # autocovariance a^k sigma2/(1-a^2)
    r = sp.autocovariance(6)
    expected = s2 / (1.0 - a * a) * a ** np.arange(6)
    np.testing.assert_allclose(r, expected, rtol=1e-12)
    # Szego/Kolmogorov: exp of the log-spectral integral is sigma2
    assert abs(sp.log_spectral_integral() - math.log(s2)) < 1e-12


def test_ma1_closed_forms():
    b, s2 = 0.5, 2.0
    sp = RationalArma(ma=(b,), sigma2=s2)
    r = sp.autocovariance(4)
    np.testing.assert_allclose(r, [s2 * (1 + b * b), s2 * b, 0.0, 0.0], atol=1e-12)
    f = 0.17
    direct = s2 * abs(1.0 + b * np.exp(-2j * math.pi * f)) ** 2
    assert abs(sp.evaluate(f) - direct) < 1e-12


def test_arma_autocov_matches_quad():
    sp = RationalArma(ar=(0.4, -0.2), ma=(0.3,), sigma2=0.9)
    for k in (0, 1, 3):
        assert abs(sp.autocovariance(k + 1)[k] - quad_autocov(sp, k)) < 1e-9


def test_spectrum_is_even():
    sp = RationalArma(ar=(0.7,), ma=(0.2,), sigma2=1.0)
    f = np.linspace(0.01, 0.49, 11)
    np.testing.assert_allclose(sp.evaluate(f), sp.evaluate(-f), rtol=1e-13)


def test_unstable_ar_rejected():
    with pytest.raises(DomainError):
        RationalArma(ar=(1.0,), sigma2=1.0)
    with pytest.raises(DomainError):
        RationalArma(ar=(-1.05,), sigma2=1.0)


def test_frequency_domain_enforced():
    sp = White(1.0)
    with pytest.raises(DomainError):
        sp.evaluate(0.51)


def test_piecewise_from_half_band():
    pc = PiecewiseConstant.from_half_band([0.25], [1.0, 3.0])
    assert pc.evaluate(0.1) == 1.0
    assert pc.evaluate(0.3) == 3.0
    assert pc.evaluate(-0.3) == 3.0
    assert abs(pc.power() - (0.5 * 1.0 + 0.5 * 3.0)) < 1e-14
    assert abs(pc.log_spectral_integral() - 0.5 * math.log(3.0)) < 1e-14


def test_piecewise_autocov_matches_quad():
    pc = PiecewiseConstant.from_half_band([0.1, 0.35], [2.0, 0.5, 1.5])
    r = pc.autocovariance(5)
    for k in range(5):
        assert abs(r[k] - quad_autocov(pc, k)) < 1e-9


def test_piecewise_uneven_mirror_rejected():
    with pytest.raises(DomainError):
        PiecewiseConstant((-0.5, 0.0, 0.5), (1.0, 2.0))


def test_piecewise_edges_must_span_band():
    with pytest.raises(DomainError):
        PiecewiseConstant((-0.4, 0.0, 0.4), (1.0, 1.0))


def test_tabulated_from_function():
    fn = lambda f: 1.0 + np.cos(2.0 * np.pi * f) ** 2
    tab = Tabulated.from_function(fn, n=2048)
    f = np.linspace(-0.5, 0.5, 101)
    np.testing.assert_allclose(tab.evaluate(f), fn(f), atol=1e-4)
    for k in (0, 2):
        assert abs(tab.autocovariance(k + 1)[k] - quad_autocov(tab, k)) < 1e-5


def test_tabulated_length_validated():
    with pytest.raises(DomainError):
        Tabulated.from_function(lambda f: np.ones_like(f), n=512)


def test_add_combines_levels():
    s = add(White(1.0), PiecewiseConstant.from_half_band([0.25], [1.0, 3.0]))
    assert abs(s.evaluate(0.1) - 2.0) < 1e-12
    assert abs(s.evaluate(0.4) - 4.0) < 1e-12


def test_add_arma_goes_tabulated():
    a = RationalArma(ar=(0.5,), sigma2=1.0)
    b = White(2.0)
    s = add(a, b)
    f = np.linspace(-0.45, 0.45, 7)
    np.testing.assert_allclose(s.evaluate(f), a.evaluate(f) + b.evaluate(f), rtol=1e-4)


def test_scaled_preserves_type():
    assert isinstance(White(1.0).scaled(2.0), White)
    assert isinstance(RationalArma(ar=(0.3,), sigma2=1.0).scaled(2.0), RationalArma)
    sp = RationalArma(ar=(0.3,), sigma2=1.0)
    assert abs(sp.scaled(3.0).evaluate(0.2) - 3.0 * sp.evaluate(0.2)) < 1e-12


def test_continuous_sampling_bridge():
    # Phi(f) = 2B * F(2B f): power is preserved, log integral picks up ln(2B)
    shape = PiecewiseConstant.from_half_band([0.25], [1.0, 3.0])
    cont = ContinuousSpectralDensity(bandwidth=2.0, shape=shape)
    disc = sample_bandlimited(cont)
    assert abs(cont.power() - disc.power()) < 1e-12
    nu = 1.2
    assert abs(cont.evaluate_hz(nu) - disc.evaluate(nu / 4.0) / 4.0) < 1e-12
    with pytest.raises(DomainError):
        cont.evaluate_hz(2.5)
    with pytest.raises(DomainError):
        ContinuousSpectralDensity(bandwidth=0.0, shape=shape)


def test_continuous_log_integral():
    shape = White(1.5)
    cont = ContinuousSpectralDensity(bandwidth=0.5, shape=shape)
    # with 2B = 1 sampling is the identity on the band
    assert abs(cont.log_integral_hz() - math.log(1.5)) < 1e-14
    assert abs(cont.sampled().evaluate(0.2) - 1.5) < 1e-14
