import mpmath
import numpy as np
import pytest

from xbouss.core import ModelParams
from xbouss.corrector import jet_v1, zeta1_jet
from xbouss.errors import ParameterError
from xbouss.jets import Jet, sech2_jet, sech2_polynomial


def identity_jet(x, order=4):
    x = np.asarray(x, dtype=float)
    return Jet.from_derivatives([x, np.ones_like(x)] + [np.zeros_like(x)] * (order - 1))


def test_product_and_quotient():
    x = identity_jet(np.array([0.5, 2.0]))
    sq = x * x
    np.testing.assert_allclose(sq.derivatives()[:3], [[0.25, 4.0], [1.0, 4.0], [2.0, 2.0]])
    inv = 1.0 / x
    np.testing.assert_allclose(inv.derivative(1), [-4.0, -0.25])
    np.testing.assert_allclose(inv.derivative(2), [16.0, 0.25])
    np.testing.assert_allclose(inv.derivative(3), [-6 / 0.5 ** 4, -6 / 16.0])


def test_scalar_arithmetic_broadcasts():
    x = identity_jet(np.linspace(0.0, 1.0, 6))
    y = 2.0 - x * 3.0 + 1.0
    np.testing.assert_allclose(y.value, 3.0 - 3.0 * np.linspace(0.0, 1.0, 6))
    np.testing.assert_allclose(y.derivative(1), -3.0)
    np.testing.assert_allclose(y.derivative(2), 0.0)


def test_differentiate_shifts_orders():
    x = identity_jet(np.array([1.5]), order=5)
    cube = x * x * x
    d = cube.differentiate()
    assert d.order == 4
    np.testing.assert_allclose(d.derivatives()[:3, 0], [3 * 1.5 ** 2, 6 * 1.5, 6.0])


def test_derivative_outside_order():
    with pytest.raises(ParameterError):
        identity_jet(np.array([1.0]), order=2).derivative(3)


def test_sech2_polynomials():
    T = np.linspace(-1.0, 1.0, 7)
    np.testing.assert_allclose(sech2_polynomial(1)(T), -2.0 * T, atol=1e-15)
    np.testing.assert_allclose(sech2_polynomial(2)(T), 6.0 * T ** 2 - 2.0, atol=1e-14)


def _mp_derivatives(f, points, order):
    with mpmath.workdps(40):
        return np.array([[float(mpmath.diff(f, mpmath.mpf(float(p)), n)) for p in points] for n in range(order + 1)])


def test_sech2_jet_against_arbitrary_precision(rng):
    scale = 0.7
    x = rng.uniform(-8.0, 8.0, 20)
    jet = sech2_jet(scale * x, scale, 5)
    ref = _mp_derivatives(lambda s: mpmath.sech(scale * s) ** 2, x, 5)
    np.testing.assert_allclose(jet.derivatives(), ref, rtol=1e-8, atol=1e-8)


def test_background_jets_against_arbitrary_precision(rng):
    params = ModelParams.from_alpha(1.0, 0.1)
    c, k, eps = params.c, params.k, params.epsilon
    t = 0.4
    x = rng.uniform(-10.0, 10.0, 20)

    def zeta(s):
        return mpmath.sech(k * (s - c * t)) ** 2

    def v(s):
        z = zeta(s)
        return c * z / (1 + eps * z)

    z_jet = zeta1_jet(params, t, x)
    v_jet, vt_jet = jet_v1(params, t, x)
    np.testing.assert_allclose(z_jet.derivatives(), _mp_derivatives(zeta, x, 5), rtol=1e-8, atol=1e-8)
    v_ref = _mp_derivatives(v, x, 5)
    np.testing.assert_allclose(v_jet.derivatives(), v_ref, rtol=1e-8, atol=1e-8)
    # traveling wave: d_t = -c d_x
    np.testing.assert_allclose(vt_jet.derivatives(), -c * v_ref[1:], rtol=1e-8, atol=1e-8)
    assert vt_jet.order == 4
