"""Special-function layer: values, validation boxes, and the series route."""

import mpmath as mp
import numpy as np
import pytest
from numpy.testing import assert_allclose

from dtmm import specfun
from dtmm.errors import DomainError, NearIntegerOrderError, RangeError


def test_airy_values_against_mpmath():
    mp.mp.dps = 30
    for z in (-8.5, -2.0, -0.3, 0.0, 0.7, 3.1, 9.4):
        ai, aip, bi, bip = specfun.airy_arrays(z)
        assert_allclose(float(ai), float(mp.airyai(z)), rtol=1e-12, atol=1e-300)
        assert_allclose(float(aip), float(mp.airyai(z, 1)), rtol=1e-12, atol=1e-300)
        assert_allclose(float(bi), float(mp.airybi(z)), rtol=1e-12, atol=1e-300)
        assert_allclose(float(bip), float(mp.airybi(z, 1)), rtol=1e-12, atol=1e-300)


def test_airy_maclaurin_cross_check():
    # Ai(z) = Ai(0) f(z) + Ai'(0) g(z) with the two hypergeometric sums;
    # an independent small-z route that shares nothing with the backend.
    one_third = 1.0 / 3.0
    ai0 = 3.0 ** (-2.0 / 3.0) / mp.gamma(mp.mpf(2) / 3)
    aip0 = -(3.0 ** (-one_third)) / mp.gamma(mp.mpf(1) / 3)

    def f_sum(z):
        total, term = mp.mpf(1), mp.mpf(1)
        for m in range(1, 40):
            term *= z**3 / ((3 * m) * (3 * m - 1))
            total += term
        return total

    def g_sum(z):
        total, term = mp.mpf(z), mp.mpf(z)
        for m in range(1, 40):
            term *= z**3 / ((3 * m) * (3 * m + 1))
            total += term
        return total

    mp.mp.dps = 30
    for z in (-1.4, -0.5, 0.0, 0.8, 1.5):
        expected = float(ai0 * f_sum(mp.mpf(z)) + aip0 * g_sum(mp.mpf(z)))
        ai, _, _, _ = specfun.airy_arrays(z)
        assert_allclose(float(ai), expected, rtol=1e-12)


def test_airy_range_box():
    with pytest.raises(RangeError):
        specfun.airy_arrays(51.0)
    with pytest.raises(RangeError):
        specfun.airy_arrays(np.array([0.0, -50.5]))
    with pytest.raises(RangeError):
        specfun.airy_arrays(np.nan)


def test_airy_special_value_pair():
    val = specfun.airy(0.5)
    ai, aip, bi, bip = specfun.airy_arrays(0.5)
    assert val[0].value == complex(ai)
    assert val[0].derivative == complex(aip)
    assert val[1].value == complex(bi)
    assert val[1].derivative == complex(bip)


def test_bessel_values_against_mpmath():
    mp.mp.dps = 30
    for nu, x in ((0.3, 0.7), (1.7, 4.2), (0.0, 1.0), (5.0, 12.0), (-0.4, 2.5)):
        j, jp, n, np_ = specfun.bessel_arrays(nu, x)
        assert_allclose(float(j), float(mp.besselj(nu, x)), rtol=1e-12)
        assert_allclose(float(n), float(mp.bessely(nu, x)), rtol=1e-12)
        assert_allclose(float(jp), float(mp.besselj(nu, x, 1)), rtol=1e-11)
        assert_allclose(float(np_), float(mp.bessely(nu, x, 1)), rtol=1e-11)


def test_bessel_domain_and_range_boxes():
    with pytest.raises(DomainError):
        specfun.bessel_arrays(0.3, 0.0)
    with pytest.raises(DomainError):
        specfun.bessel_arrays(0.3, -1.0)
    with pytest.raises(RangeError):
        specfun.bessel_arrays(0.3, 50.5)
    with pytest.raises(RangeError):
        specfun.bessel_arrays(20.5, 1.0)


def test_bessel_series_matches_backend():
    rng = np.random.default_rng(31115)
    for _ in range(60):
        alpha = rng.uniform(-5.0, 5.0)
        if abs(alpha - round(alpha)) < 0.05 and alpha < 0:
            alpha += 0.5
        x = rng.uniform(0.05, 10.0)
        mine = specfun.bessel_j_series(alpha, x, 60)
        ref = complex(specfun.bessel_arrays(alpha, x)[0])
        assert abs(mine - ref) <= 1e-9 * max(1.0, abs(ref))


def test_bessel_series_small_argument_limits():
    assert specfun.bessel_j_series(0.0, 0.0, 10) == 1.0
    assert specfun.bessel_j_series(1.3, 0.0, 10) == 0.0


def test_bessel_series_pole_and_validation():
    with pytest.raises(OverflowError):
        specfun.bessel_j_series(-2.0, 1.0, 30)
    with pytest.raises(DomainError):
        specfun.bessel_j_series(0.3, -1.0, 30)
    with pytest.raises(DomainError):
        specfun.bessel_j_series(0.3, 1.0, 0)


def test_order_derivative_against_mpmath():
    mp.mp.dps = 40

    def dj(nu, x):
        return float(mp.diff(lambda v: mp.besselj(v, x), nu))

    def dn(nu, x):
        return float(mp.diff(lambda v: mp.bessely(v, x), nu))

    for nu, x in ((0.7, 2.3), (0.3, 1.1), (1.6, 4.0), (2.4, 0.9)):
        got_j, got_jx, got_n, got_nx = specfun.bessel_dorder_arrays(nu, x)
        assert_allclose(float(got_j), dj(nu, x), rtol=0, atol=1e-7)
        assert_allclose(float(got_n), dn(nu, x), rtol=0, atol=1e-7 * max(1, abs(dn(nu, x))))
        # mixed partial: differentiate the x-derivative in the order
        mixed_j = float(mp.diff(lambda v: mp.besselj(v, x, 1), nu))
        assert_allclose(float(got_jx), mixed_j, rtol=0, atol=1e-6)


def test_order_derivative_near_integer_guard():
    with pytest.raises(NearIntegerOrderError):
        specfun.bessel_dorder_arrays(1.0000001, 2.0)
    with pytest.raises(NearIntegerOrderError):
        specfun.bessel_dorder_arrays(0.0, 2.0)
    # comfortably away from integers is fine
    specfun.bessel_dorder_arrays(0.5, 2.0)


def test_bessel_dorder_special_values():
    dj, dn = specfun.bessel_dorder(0.7, 2.3)
    arr = specfun.bessel_dorder_arrays(0.7, 2.3)
    assert dj.value == complex(arr[0])
    assert dj.derivative == complex(arr[1])
    assert dn.value == complex(arr[2])
    assert dn.derivative == complex(arr[3])
