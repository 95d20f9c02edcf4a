import numpy as np
import pytest
from scipy.integrate import simpson

from xbouss.core import ModelParams
from xbouss.corrector import (
    Closure,
    CorrectedSolution,
    InitialData,
    background_defect,
    closure_forcing,
    compensated_forcing,
    corrected_eval,
    forcing_f,
    gaussian_bump,
    transport_pair,
    transport_stack,
)
from xbouss.errors import ParameterError
from xbouss.refwaves import boussinesq_solitary

PARAMS = ModelParams.from_alpha(1.0, 0.1)


def zero_forcing(s, y):
    return 0.0 * y


def test_gaussian_bump():
    assert gaussian_bump(0.0) == 1.0
    assert gaussian_bump(10.0 / 3.0) == pytest.approx(np.exp(-np.pi ** 2))


def test_initial_time_returns_initial_data():
    x = np.linspace(-5, 5, 11)
    zeta2, v2 = transport_pair(PARAMS, 0.0, x)
    np.testing.assert_array_equal(zeta2, gaussian_bump(x))
    np.testing.assert_array_equal(v2, gaussian_bump(x))


def test_free_transport_is_dalembert():
    data = InitialData(zeta0=lambda x: np.exp(-x ** 2), v0=lambda x: x * np.exp(-x ** 2))
    x = np.linspace(-6, 6, 25)
    t = 1.3
    zeta2, v2 = transport_pair(PARAMS, t, x, data, forcing=zero_forcing)
    zl, zr = np.exp(-(x - t) ** 2), np.exp(-(x + t) ** 2)
    vl, vr = (x - t) * zl, (x + t) * zr
    np.testing.assert_allclose(zeta2, 0.5 * (zl + zr) + 0.5 * (vl - vr), atol=1e-15)
    np.testing.assert_allclose(v2, 0.5 * (zl - zr) + 0.5 * (vl + vr), atol=1e-15)


def test_negative_time_rejected():
    with pytest.raises(ParameterError):
        transport_pair(PARAMS, -0.1, 0.0)


def test_scalar_evaluation():
    z, v = transport_pair(PARAMS, 0.5, 1.0)
    assert isinstance(z, float) and isinstance(v, float)
    zs, vs = transport_pair(PARAMS, 0.5, np.array([1.0]))
    assert z == pytest.approx(zs[0], abs=1e-12)


def test_transport_residuals_at_random_points(rng):
    """d_t zeta2 + d_x v2 = 0 and d_t v2 + d_x zeta2 = f at 50 random (t, x)."""
    h = 1e-2
    offsets = np.array([-2, -1, 0, 1, 2]) * h
    weights = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * h)
    F = closure_forcing(PARAMS, Closure.LITERAL)
    worst = 0.0
    for t, x in zip(rng.uniform(0.1, 3.0, 50), rng.uniform(-15.0, 15.0, 50)):
        zx, vx = transport_stack([t], x + offsets, forcing=F)
        zt, vt = transport_stack(t + offsets, [x], forcing=F)
        r1 = weights @ zt[:, 0] + weights @ vx[0]
        r2 = weights @ vt[:, 0] + weights @ zx[0] - forcing_f(PARAMS, t, x)
        worst = max(worst, abs(r1), abs(r2))
    assert worst <= 1e-6


def test_quadrature_against_composite_simpson():
    t = 2.0
    x = np.array([-3.0, 0.0, 1.5, 4.0])
    zeta2, v2 = transport_pair(PARAMS, t, x, closure=Closure.LITERAL)
    i_plus = zeta2 + v2 - 2.0 * gaussian_bump(x - t)
    s = np.linspace(0.0, t, 100001)
    for xi, value in zip(x, i_plus):
        ref = simpson(forcing_f(PARAMS, s, xi - t + s), x=s)
        assert value == pytest.approx(ref, abs=1e-9)


class TestForcings:
    def test_defect_is_second_order(self):
        x = np.linspace(-20, 20, 401)
        scaled = []
        for eps in (1e-3, 1e-4):
            p = ModelParams.from_alpha(1.0, eps)
            scaled.append(np.max(np.abs(background_defect(p, 0.3, x))) / eps ** 2)
        assert scaled[0] > 0.0
        assert scaled[1] == pytest.approx(scaled[0], rel=1e-2)

    def test_compensated_forcing_removes_the_defect(self):
        x = np.linspace(-10, 10, 41)
        t = 0.7
        diff = forcing_f(PARAMS, t, x) - compensated_forcing(PARAMS, t, x)
        np.testing.assert_allclose(diff, background_defect(PARAMS, t, x) / PARAMS.epsilon ** 2, rtol=1e-10, atol=1e-14)

    @pytest.mark.parametrize("forcing", [forcing_f, compensated_forcing])
    def test_forcing_is_odd_about_the_crest(self, forcing):
        t = 0.9
        s = np.linspace(0.0, 12.0, 97)
        crest = PARAMS.c * t
        ahead, behind = forcing(PARAMS, t, crest + s), forcing(PARAMS, t, crest - s)
        assert np.max(np.abs(ahead)) > 1e-3
        np.testing.assert_allclose(ahead, -behind, rtol=0, atol=1e-13)
        assert forcing(PARAMS, t, crest) == pytest.approx(0.0, abs=1e-14)

    def test_literal_forcing_is_scalar_for_scalar_input(self):
        assert isinstance(forcing_f(PARAMS, 0.2, 0.5), float)

    def test_forcing_needs_alpha(self):
        with pytest.raises(ParameterError):
            closure_forcing(ModelParams(epsilon=0.1, celerity=1.1))


class TestCorrectedSolution:
    def test_horizon(self):
        sol = CorrectedSolution(ModelParams.from_alpha(1.0, 0.01))
        assert sol.t_max == pytest.approx(10.0)
        with pytest.raises(ParameterError):
            sol.components(10.5, 0.0)

    def test_initial_state(self):
        sol = CorrectedSolution(PARAMS)
        x = np.linspace(-10, 10, 21)
        zeta, v = corrected_eval(sol, 0.0, x)
        z1, v1 = boussinesq_solitary(PARAMS, 0.0, x)
        np.testing.assert_allclose(zeta, z1 + PARAMS.epsilon ** 2 * gaussian_bump(x), rtol=1e-15)
        np.testing.assert_allclose(v, v1 + PARAMS.epsilon ** 2 * gaussian_bump(x), rtol=1e-15)

    def test_eval_reuses_components(self):
        sol = CorrectedSolution(PARAMS)
        x = np.linspace(-10, 10, 21)
        parts = sol.components(1.2, x)
        zeta, v = corrected_eval(sol, 1.2, x, parts)
        np.testing.assert_array_equal(zeta, parts["zeta1"] + PARAMS.epsilon ** 2 * parts["zeta2"])
        np.testing.assert_array_equal(v, parts["v1"] + PARAMS.epsilon ** 2 * parts["v2"])
        fresh = corrected_eval(sol, 1.2, x)
        np.testing.assert_allclose(fresh[0], zeta, rtol=1e-13)

    def test_closure_only_changes_v_forcing(self):
        x = np.linspace(-10, 10, 21)
        lit = CorrectedSolution(PARAMS, closure="literal").components(1.0, x)
        comp = CorrectedSolution(PARAMS, closure=Closure.COMPENSATED).components(1.0, x)
        np.testing.assert_array_equal(lit["zeta1"], comp["zeta1"])
        assert not np.allclose(lit["v2"], comp["v2"])

    def test_invalid_horizon(self):
        with pytest.raises(ParameterError):
            CorrectedSolution(PARAMS, horizon=0.0)
