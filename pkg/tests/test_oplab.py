import numpy as np
import pytest

from xbouss.core import Grid1D, discrete_norm
from xbouss.errors import DepthError, ParameterError
from xbouss.oplab import (
    OperatorContext,
    assemble_fd,
    bound_probe,
    constant_symbol,
    min_eigenvalue,
    random_smooth_field,
    round_trip_error,
    sobolev_norm,
    symmetry_defect,
)


def bump(grid, amplitude=0.5):
    return amplitude * np.exp(-(grid.points() / 5.0) ** 2)


@pytest.mark.parametrize("representation", ["fd", "spectral"])
def test_round_trip_and_symmetry(periodic_grid, rng, representation):
    ctx = OperatorContext(periodic_grid, bump(periodic_grid), 0.1, representation)
    for _ in range(5):
        w = random_smooth_field(periodic_grid, rng)
        assert round_trip_error(ctx, w) <= 1e-10
        u = random_smooth_field(periodic_grid, rng)
        assert symmetry_defect(ctx, u, w) <= 1e-11


@pytest.mark.slow
@pytest.mark.parametrize("representation", ["fd", "spectral"])
@pytest.mark.parametrize("epsilon", [1e-1, 1e-2, 1e-3])
def test_round_trip_and_symmetry_over_many_fields(periodic_grid, rng, representation, epsilon):
    ctx = OperatorContext(periodic_grid, bump(periodic_grid), epsilon, representation)
    worst_trip = worst_symmetry = 0.0
    for _ in range(100):
        w = random_smooth_field(periodic_grid, rng)
        u = random_smooth_field(periodic_grid, rng)
        worst_trip = max(worst_trip, round_trip_error(ctx, w))
        worst_symmetry = max(worst_symmetry, symmetry_defect(ctx, u, w))
    assert worst_trip <= 1e-10
    assert worst_symmetry <= 1e-11


def test_fd_matrix_is_symmetric(periodic_grid):
    h = 1.0 + 0.1 * bump(periodic_grid)
    m = assemble_fd(periodic_grid, h, 0.1)
    assert abs(m - m.T).max() <= 1e-12 * abs(m).max()


def test_flat_bottom_acts_by_its_symbol(periodic_grid):
    ctx = OperatorContext(periodic_grid, np.zeros(periodic_grid.n), 0.1, "spectral")
    k = 2 * np.pi * 5 / periodic_grid.length
    w = np.cos(k * periodic_grid.points())
    np.testing.assert_allclose(ctx.apply(w), constant_symbol(k, 0.1) * w, atol=1e-13)


def test_min_eigenvalue_of_flat_operator(periodic_grid):
    assert min_eigenvalue(periodic_grid, 0.1) == pytest.approx(1.0, rel=1e-12)


def test_sobolev_zero_is_l2(periodic_grid, rng):
    f = random_smooth_field(periodic_grid, rng)
    assert sobolev_norm(f, periodic_grid, 0.0) == pytest.approx(discrete_norm(f, periodic_grid.dx, 2), rel=1e-13)
    assert sobolev_norm(f, periodic_grid, 1.0) > sobolev_norm(f, periodic_grid, 0.0)


def test_zero_right_hand_side(periodic_grid):
    ctx = OperatorContext(periodic_grid, bump(periodic_grid), 0.1)
    assert not ctx.solve(np.zeros(periodic_grid.n)).any()


class TestContextErrors:
    def test_periodic_only(self):
        with pytest.raises(ParameterError):
            OperatorContext(Grid1D(-10.0, 10.0, 64), np.zeros(64), 0.1)

    def test_unknown_representation(self, periodic_grid):
        with pytest.raises(ParameterError):
            OperatorContext(periodic_grid, np.zeros(periodic_grid.n), 0.1, "chebyshev")

    def test_depth_condition(self, periodic_grid):
        with pytest.raises(DepthError):
            OperatorContext(periodic_grid, np.full(periodic_grid.n, -20.0), 0.1)

    def test_shape(self, periodic_grid):
        ctx = OperatorContext(periodic_grid, np.zeros(periodic_grid.n), 0.1)
        with pytest.raises(ParameterError):
            ctx.apply(np.zeros(3))


def test_bound_probe_rows_stay_bounded():
    grid = Grid1D(-50.0, 50.0, 128, periodic=True)
    eps_list = [0.1, 0.01, 1e-3, 1e-4]
    rows = bound_probe(eps_list, 1.0, grid, zeta_shape=bump(grid), samples=3)
    assert [r["epsilon"] for r in rows] == eps_list
    for row in rows:
        assert 0.0 < row["w"] < 10.0
        assert row["sqrt_eps_dw"] < 10.0
        assert row["eps_d2w"] < 10.0
        assert row["h_min"] == pytest.approx(1.0, abs=1e-12)
