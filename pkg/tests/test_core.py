import math

import numpy as np
import pytest

from xbouss.core import (
    Grid1D,
    ModelParams,
    WaveField,
    check_finite,
    depth,
    discrete_norm,
    fd_weights,
    spatial_derivative,
    stencil_width,
)
from xbouss.errors import DecayError, DepthError, NonFiniteError, ParameterError


class TestModelParams:
    def test_from_alpha_derives_speed_and_wavenumber(self):
        p = ModelParams.from_alpha(1.0, 0.1)
        assert p.c == pytest.approx(math.sqrt(1.0 / 0.9), rel=1e-15)
        assert p.k == pytest.approx(math.sqrt(0.75), rel=1e-15)

    def test_gn_quantities(self):
        p = ModelParams(epsilon=1.0, celerity=1.01)
        assert p.gn_amplitude == pytest.approx(0.0201, rel=1e-12)
        assert p.gn_wavenumber == pytest.approx(math.sqrt(3 * 0.0201 / (4 * 1.0201)), rel=1e-12)

    @pytest.mark.parametrize("eps", [0.0, -0.1, 1.5, float("nan")])
    def test_epsilon_range(self, eps):
        with pytest.raises(ParameterError):
            ModelParams(epsilon=eps, celerity=1.1)

    def test_alpha_eps_product_below_one(self):
        with pytest.raises(ParameterError):
            ModelParams.from_alpha(10.0, 0.1)

    def test_speed_required_for_solitary_waves(self):
        with pytest.raises(ParameterError):
            ModelParams(epsilon=1.0, celerity=1.0).require_wave_speed()

    def test_k_needs_alpha(self):
        with pytest.raises(ParameterError):
            _ = ModelParams(epsilon=1.0, celerity=1.1).k


class TestGrid:
    def test_default_periodic_spacing(self):
        g = Grid1D.default(periodic=True)
        assert g.dx == pytest.approx(100.0 / 4096)
        assert g.points()[0] == -50.0
        assert g.points()[-1] < 50.0

    def test_centered_includes_both_ends(self):
        g = Grid1D.centered(10.0, 2001)
        x = g.points()
        assert x[0] == -10.0
        assert x[-1] == pytest.approx(10.0, abs=1e-12)
        assert x[1000] == pytest.approx(0.0, abs=1e-12)

    def test_too_few_points(self):
        with pytest.raises(ParameterError):
            Grid1D(0.0, 1.0, 4)

    def test_wavenumbers_only_on_periodic_grids(self):
        with pytest.raises(ParameterError):
            Grid1D(0.0, 1.0, 16).wavenumbers()


def test_depth_reports_first_violation():
    with pytest.raises(DepthError) as info:
        depth(np.array([0.0, -2.0, -3.0]), 0.5)
    assert info.value.details["index"] == 2
    assert info.value.h_min == pytest.approx(-0.5)


def test_wavefield_derives_depth():
    g = Grid1D(0.0, 1.0, 8, periodic=True)
    f = WaveField(g, np.full(8, 0.5), np.zeros(8), time=0.0, epsilon=0.2)
    np.testing.assert_allclose(f.h, 1.1)


def test_check_finite_names_index():
    with pytest.raises(NonFiniteError) as info:
        check_finite(np.array([1.0, 2.0, np.inf, np.nan]))
    assert info.value.index == 2


class TestDiscreteNorm:
    def test_l2_of_constant(self):
        g = Grid1D.default(periodic=True)
        assert discrete_norm(np.ones(g.n), g.dx, 2) == pytest.approx(10.0, rel=1e-14)

    def test_max_norm(self):
        assert discrete_norm(np.array([1.0, -3.0, 2.0]), 0.1, "inf") == 3.0
        assert discrete_norm(np.array([1.0, -3.0, 2.0]), 0.1, math.inf) == 3.0

    def test_unknown_norm(self):
        with pytest.raises(ParameterError):
            discrete_norm(np.ones(3), 0.1, 1)


class TestFdWeights:
    def test_second_derivative_three_points(self):
        np.testing.assert_allclose(fd_weights((-1, 0, 1), 2), [1.0, -2.0, 1.0])

    def test_first_derivative_three_points(self):
        np.testing.assert_allclose(fd_weights((-1, 0, 1), 1), [-0.5, 0.0, 0.5])

    def test_one_sided_first_derivative(self):
        np.testing.assert_allclose(fd_weights((0, 1, 2), 1), [-1.5, 2.0, -0.5])

    @pytest.mark.parametrize("order", [1, 2, 3, 4])
    def test_weights_annihilate_constants(self, order):
        w = fd_weights(tuple(range(-4, 5)), order)
        assert abs(w.sum()) < 1e-12


class TestSpatialDerivative:
    def test_spectral_exact_on_grid_modes(self, periodic_grid):
        x = periodic_grid.points()
        k = 2 * np.pi * 3 / periodic_grid.length
        f = np.sin(k * x)
        np.testing.assert_allclose(spatial_derivative(f, periodic_grid, 1), k * np.cos(k * x), atol=1e-12)
        np.testing.assert_allclose(spatial_derivative(f, periodic_grid, 3), -k ** 3 * np.cos(k * x), atol=1e-12)
        np.testing.assert_allclose(spatial_derivative(f, periodic_grid, 4), k ** 4 * f, atol=1e-12)

    @pytest.mark.parametrize(
        "order, exact, atol",
        [
            (1, lambda x: -2 * x * np.exp(-x ** 2), 1e-8),
            (2, lambda x: (4 * x ** 2 - 2) * np.exp(-x ** 2), 1e-8),
            (3, lambda x: (-8 * x ** 3 + 12 * x) * np.exp(-x ** 2), 1e-6),
            (4, lambda x: (16 * x ** 4 - 48 * x ** 2 + 12) * np.exp(-x ** 2), 1e-6),
        ],
    )
    def test_finite_differences_on_gaussian(self, order, exact, atol):
        g = Grid1D.centered(10.0, 1001)
        x = g.points()
        np.testing.assert_allclose(spatial_derivative(np.exp(-x ** 2), g, order), exact(x), atol=atol)

    def test_non_decaying_field_rejected(self):
        g = Grid1D.centered(10.0, 201)
        with pytest.raises(DecayError):
            spatial_derivative(np.ones(g.n), g, 1)

    def test_order_range(self, periodic_grid):
        with pytest.raises(ParameterError):
            spatial_derivative(np.zeros(periodic_grid.n), periodic_grid, 6)

    def test_shape_mismatch(self, periodic_grid):
        with pytest.raises(ParameterError):
            spatial_derivative(np.zeros(10), periodic_grid, 1)

    @pytest.mark.parametrize("order, width", [(1, 9), (2, 9), (3, 11), (4, 11), (5, 13)])
    def test_small_non_periodic_grid_rejected(self, order, width):
        assert stencil_width(order) == width
        small = Grid1D(-1.0, 1.0, width - 1)
        with pytest.raises(ParameterError, match=f"{width}-point stencil"):
            spatial_derivative(np.zeros(small.n), small, order)
        fits = Grid1D(-1.0, 1.0, width)
        assert not spatial_derivative(np.zeros(fits.n), fits, order).any()

    def test_small_periodic_grid_is_spectral(self):
        g = Grid1D(0.0, 2 * np.pi, 8, periodic=True)
        x = g.points()
        np.testing.assert_allclose(spatial_derivative(np.sin(x), g, 5), np.cos(x), atol=1e-12)
