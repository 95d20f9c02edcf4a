"""Explicit corrected family (zeta_1 + eps^2 zeta_2, v_1 + eps^2 v_2).

The background (zeta_1, v_1) is the standard Boussinesq solitary wave. The
corrector (zeta_2, v_2) solves the forced transport system

    d_t zeta_2 + d_x v_2 = 0,    d_t v_2 + d_x zeta_2 = F,

in closed d'Alembert form; both characteristic integrals of F are evaluated by
adaptive Gauss-Kronrod quadrature (`scipy.integrate.quad_vec`).

Two closures select F:
- `literal`: F = f(zeta_1, v_1) of the corrector construction.
- `compensated`: F = f - S/eps^2, with S the O(eps^2) defect the background
  leaves in the second standard Boussinesq equation. It removes that defect
  from R2 and keeps every transport identity.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad_vec

from .core import ModelParams
from .errors import ParameterError, QuadratureError
from .jets import Jet, sech2_jet
from .refwaves import boussinesq_solitary

logger = logging.getLogger("xbouss.corrector")

DEFAULT_QUAD_TOL = 1e-10
JET_ORDER = 5

Forcing = Callable[[float, np.ndarray], np.ndarray]


class Closure(str, enum.Enum):
    LITERAL = "literal"
    COMPENSATED = "compensated"


def gaussian_bump(x):
    """exp(-(3 pi x / 10)^2), the default initial corrector."""
    return np.exp(-(0.3 * np.pi * np.asarray(x, dtype=float)) ** 2)


@dataclass(frozen=True)
class InitialData:
    zeta0: Callable = gaussian_bump
    v0: Callable = gaussian_bump


def _require_alpha(params: ModelParams) -> None:
    if params.alpha is None:
        raise ParameterError("the corrected family needs alpha (use ModelParams.from_alpha)")


def zeta1_jet(params: ModelParams, t: float, x, order: int = JET_ORDER) -> Jet:
    _require_alpha(params)
    k = params.k
    theta = np.asarray(x, dtype=float) - params.c * t
    return sech2_jet(k * theta, k, order) * params.alpha


def jet_v1(params: ModelParams, t: float, x) -> Tuple[Jet, Jet]:
    """Jets of v_1 (orders 0..5) and of d_t v_1 (orders 0..4).

    v_1 = c zeta_1/(1 + eps zeta_1) and, as a function of x - ct,
    d_t v_1 = -c d_x v_1.
    """
    z = zeta1_jet(params, t, x)
    c = params.c
    v = (z * c) / (1.0 + z * params.epsilon)
    return v, v.differentiate() * (-c)


def _forcing_from_jets(z: Jet, v: Jet, vt: Jet) -> np.ndarray:
    zeta, z1 = z.derivative(0), z.derivative(1)
    vt1, vt2, vt4 = vt.derivative(1), vt.derivative(2), vt.derivative(4)
    v0, v1, v2, v3 = (v.derivative(j) for j in range(4))
    return (
        z1 * vt1
        + (2.0 / 3.0) * zeta * vt2
        + vt4 / 45.0
        + (v0 * v3 - v1 * v2) / 3.0
    )


def _defect_bracket(params: ModelParams, z: Jet, v: Jet) -> np.ndarray:
    # S/eps, arranged so no O(1) cancellation is divided by eps
    eps, alpha, c = params.epsilon, params.alpha, params.c
    zeta, z1 = z.derivative(0), z.derivative(1)
    h = 1.0 + eps * zeta
    g = 2.0 * zeta - alpha + eps * zeta ** 2 - alpha * eps * zeta * (2.0 + eps * zeta)
    return z1 * g / ((1.0 - alpha * eps) * h ** 2) + (c / 3.0) * v.derivative(3) + v.derivative(0) * v.derivative(1)


def forcing_f(params: ModelParams, t: float, x):
    """f(zeta_1, v_1) = zeta_1x dxdt v_1 + 2/3 zeta_1 dx^2 dt v_1 + 1/45 dx^4 dt v_1 + 1/3 dx(v_1 v_1xx - v_1x^2)."""
    z = zeta1_jet(params, t, x)
    v, vt = jet_v1(params, t, x)
    out = _forcing_from_jets(z, v, vt)
    return float(out) if np.ndim(x) == 0 else out


def background_defect(params: ModelParams, t: float, x):
    """Residual of (zeta_1, v_1) in the second standard Boussinesq equation.

    S = -c v_1' + (eps c/3) v_1''' + zeta_1' + eps v_1 v_1' (primes in x), which is O(eps^2).
    """
    z = zeta1_jet(params, t, x, order=3)
    v = (z * params.c) / (1.0 + z * params.epsilon)
    out = params.epsilon * _defect_bracket(params, z, v)
    return float(out) if np.ndim(x) == 0 else out


def compensated_forcing(params: ModelParams, t: float, x):
    z = zeta1_jet(params, t, x)
    v, vt = jet_v1(params, t, x)
    out = _forcing_from_jets(z, v, vt) - _defect_bracket(params, z, v) / params.epsilon
    return float(out) if np.ndim(x) == 0 else out


def closure_forcing(params: ModelParams, closure: Union[Closure, str] = Closure.LITERAL) -> Forcing:
    _require_alpha(params)
    closure = Closure(closure)
    if closure is Closure.LITERAL:
        return lambda s, y: forcing_f(params, s, y)
    return lambda s, y: compensated_forcing(params, s, y)


def transport_stack(
    times: Sequence[float],
    x,
    initial_data: Optional[InitialData] = None,
    forcing: Optional[Forcing] = None,
    quadrature_tol: float = DEFAULT_QUAD_TOL,
) -> Tuple[np.ndarray, np.ndarray]:
    """d'Alembert corrector at several times, shape (len(times), len(x)).

    `forcing=None` is free transport (both characteristic integrals vanish).

    With s = t*sigma every characteristic integral runs over sigma in [0, 1],
    so all times and both families go through one `quad_vec` call and share
    its interval subdivision.
    """
    data = initial_data or InitialData()
    x = np.atleast_1d(np.asarray(x, dtype=float))
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(times < 0.0) or not np.all(np.isfinite(times)):
        raise ParameterError(f"transport times must be finite and >= 0, got {times!r}")
    if not quadrature_tol > 0.0:
        raise ParameterError(f"quadrature tolerance must be positive, got {quadrature_tol!r}")

    tt = times[:, None]
    plus0 = data.zeta0(x - tt) + data.v0(x - tt)
    minus0 = data.zeta0(x + tt) - data.v0(x + tt)
    i_plus = np.zeros_like(plus0)
    i_minus = np.zeros_like(minus0)

    active = times > 0.0
    if forcing is not None and np.any(active):
        ta = times[active][:, None]
        m = ta.size * x.size

        def integrand(sigma: float) -> np.ndarray:
            s = ta * sigma
            along_plus = forcing(s, x - ta + s)
            along_minus = forcing(s, x + ta - s)
            return np.concatenate([(ta * along_plus).ravel(), (ta * along_minus).ravel()])

        res, err, info = quad_vec(
            integrand, 0.0, 1.0, epsabs=quadrature_tol, epsrel=quadrature_tol, norm="max", full_output=True
        )
        logger.debug("quad_vec: %d evaluations, %d intervals, error %.3e", info.neval, len(info.intervals), err)
        if not info.success or not math.isfinite(err):
            raise QuadratureError(f"characteristic integrals did not converge ({info.message})", err, quadrature_tol)
        i_plus[active] = res[:m].reshape(ta.size, x.size)
        i_minus[active] = res[m:].reshape(ta.size, x.size)

    zeta2 = 0.5 * (plus0 + minus0 + i_plus - i_minus)
    v2 = 0.5 * (plus0 - minus0 + i_plus + i_minus)
    return zeta2, v2


def transport_pair(
    params: ModelParams,
    t: float,
    x,
    initial_data: Optional[InitialData] = None,
    quadrature_tol: float = DEFAULT_QUAD_TOL,
    forcing: Optional[Forcing] = None,
    closure: Union[Closure, str] = Closure.LITERAL,
):
    """(zeta_2, v_2)(t, x) from the d'Alembert formulas.

    `forcing` overrides the closure (pass `lambda s, y: 0.0 * y` for the free
    transport identities). At t = 0 the initial data are returned exactly.
    """
    if t < 0.0:
        raise ParameterError(f"transport needs t >= 0, got {t!r}")
    data = initial_data or InitialData()
    if t == 0.0:
        xs = np.asarray(x, dtype=float)
        zeta2, v2 = np.asarray(data.zeta0(xs), dtype=float), np.asarray(data.v0(xs), dtype=float)
        return (float(zeta2), float(v2)) if np.ndim(x) == 0 else (zeta2, v2)
    F = forcing if forcing is not None else closure_forcing(params, closure)
    zeta2, v2 = transport_stack([t], x, data, F, quadrature_tol)
    if np.ndim(x) == 0:
        return float(zeta2[0, 0]), float(v2[0, 0])
    return zeta2[0], v2[0]


@dataclass(frozen=True)
class CorrectedSolution:
    """zeta = zeta_1 + eps^2 zeta_2, v = v_1 + eps^2 v_2, valid for t in [0, horizon/sqrt(eps)]."""

    params: ModelParams
    initial_data: InitialData = field(default_factory=InitialData)
    quadrature_tol: float = DEFAULT_QUAD_TOL
    closure: Closure = Closure.LITERAL
    horizon: float = 1.0

    def __post_init__(self) -> None:
        _require_alpha(self.params)
        object.__setattr__(self, "closure", Closure(self.closure))
        if not self.horizon > 0.0:
            raise ParameterError(f"horizon must be positive, got {self.horizon!r}")

    @property
    def t_max(self) -> float:
        return self.horizon / math.sqrt(self.params.epsilon)

    @property
    def forcing(self) -> Forcing:
        return closure_forcing(self.params, self.closure)

    def check_time(self, t: float) -> None:
        if not 0.0 <= t <= self.t_max:
            raise ParameterError(f"t = {t!r} outside [0, {self.t_max:.6g}]")

    def components(self, t: float, x) -> dict:
        """zeta_1, v_1, zeta_2, v_2 at (t, x)."""
        self.check_time(t)
        zeta1, v1 = boussinesq_solitary(self.params, t, x)
        zeta2, v2 = transport_pair(
            self.params, t, x, self.initial_data, self.quadrature_tol, closure=self.closure
        )
        return {"zeta1": zeta1, "v1": v1, "zeta2": zeta2, "v2": v2}


def corrected_eval(sol: CorrectedSolution, t: float, x, parts: Optional[dict] = None):
    """zeta and v at (t, x); `parts` reuses components already computed at the same (t, x)."""
    if parts is None:
        parts = sol.components(t, x)
    eps2 = sol.params.epsilon ** 2
    return parts["zeta1"] + eps2 * parts["zeta2"], parts["v1"] + eps2 * parts["v2"]
