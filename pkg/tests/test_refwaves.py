import numpy as np
import pytest

from xbouss.core import Grid1D, ModelParams
from xbouss.errors import ParameterError
from xbouss.refwaves import (
    ReferenceKind,
    boussinesq_solitary,
    crest_scale,
    gn_profile,
    kdv_profile,
    reference_profile,
    rescale_profile,
    sech2,
)

from .conftest import REFERENCE_SPEEDS


def test_sech2_clamps_large_arguments():
    with np.errstate(all="raise"):
        values = sech2(np.array([0.0, 1e3, -1e6]))
    np.testing.assert_array_equal(values, [1.0, 0.0, 0.0])


@pytest.mark.parametrize("c", REFERENCE_SPEEDS)
def test_gn_peak_is_gn_amplitude(c):
    p = ModelParams(epsilon=1.0, celerity=c)
    assert gn_profile(p, 0.0) == pytest.approx(c ** 2 - 1.0, rel=1e-14)


def test_gn_profile_half_width():
    p = ModelParams(epsilon=0.5, celerity=1.1)
    x = np.arcsinh(1.0) / p.gn_wavenumber  # sech^2 = 1/2
    assert gn_profile(p, x) == pytest.approx(0.5 * p.gn_amplitude, rel=1e-13)


def test_kdv_and_boussinesq_share_a_profile():
    p = ModelParams(epsilon=1.0, celerity=1.01)
    x = np.linspace(-30, 30, 61)
    np.testing.assert_allclose(kdv_profile(p, x), gn_profile(p, x) / 1.01 ** 2, rtol=1e-15)
    np.testing.assert_array_equal(reference_profile("StandardBoussinesq", p, x), reference_profile(ReferenceKind.KDV, p, x))


def test_no_profile_without_wave_speed():
    with pytest.raises(ParameterError):
        gn_profile(ModelParams(epsilon=1.0, celerity=1.0), 0.0)


def test_boussinesq_solitary_translates():
    p = ModelParams.from_alpha(1.0, 0.1)
    x = np.linspace(-20, 20, 81)
    z0, v0 = boussinesq_solitary(p, 0.0, x - 1.5 * p.c)
    z1, v1 = boussinesq_solitary(p, 1.5, x)
    np.testing.assert_allclose(z1, z0, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(v1, p.c * z1 / (1.0 + 0.1 * z1), rtol=1e-14)


def test_boussinesq_solitary_needs_alpha():
    with pytest.raises(ParameterError):
        boussinesq_solitary(ModelParams(epsilon=0.1, celerity=1.1), 0.0, 0.0)


class TestRescale:
    grid = Grid1D.centered(200.0, 801)

    @pytest.mark.parametrize("c", REFERENCE_SPEEDS)
    def test_gn_collapses_to_sech2(self, c):
        p = ModelParams(epsilon=1.0, celerity=c)
        X, Z = rescale_profile(gn_profile(p, self.grid.points()), p, self.grid)
        np.testing.assert_allclose(Z, sech2(X), rtol=1e-13, atol=1e-16)

    def test_kdv_curve_is_speed_independent(self):
        X = np.linspace(-5, 5, 41)
        curves = []
        for c in REFERENCE_SPEEDS:
            p = ModelParams(epsilon=1.0, celerity=c)
            x = X / p.gn_wavenumber
            curves.append(kdv_profile(p, x) / crest_scale(p, ReferenceKind.KDV))
        np.testing.assert_allclose(curves[0], curves[1], atol=1e-12)
        np.testing.assert_allclose(curves[0], curves[2], atol=1e-12)

    def test_shape_mismatch(self):
        p = ModelParams(epsilon=1.0, celerity=1.01)
        with pytest.raises(ParameterError):
            rescale_profile(np.zeros(10), p, self.grid)
