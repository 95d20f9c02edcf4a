"""Solitary waves of the extended Boussinesq traveling-wave ODE.

The zeta'''-resolved equation

    zeta^2/2 (1 - c^2/(1 + eps zeta)) = (eps c^2/6)(eps zeta - 1) zeta'^2
                                        - (eps^2 c^2/45) zeta''' zeta' + (eps^2 c^2/90) zeta''^2

is integrated as a first-order system in (zeta, zeta', zeta'') with
`scipy.integrate.solve_ivp`. It is singular at the crest (zeta' = 0), so the
profile starts from a Taylor expansion at a small offset.

The crest amplitude comes from shots of the differentiated, fourth-order form,
which is regular at the crest. Near zeta = 0 its solutions mix the decaying and
growing tail modes with a non-decaying ripple of frequency omega; a detuned
amplitude leaves a ripple proportional to the detuning, so the solitary wave is
the shot whose ripple vanishes (`scipy.optimize.minimize_scalar`). In GN mode
there is no ripple, and shots are classified instead (`low`: zeta' turns back
before zeta reaches zero, `high`: zeta crosses zero) and bisected.

GN mode replaces the equation by its Green-Naghdi counterpart
(eps c^2/6) zeta'^2 = (zeta^2/2)(c^2 - 1 - eps zeta), whose solitary wave is the
closed-form sech^2 profile.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from .core import Grid1D, ModelParams, spatial_derivative
from .errors import DecayError, DepthError, NoCrestError, ParameterError, ShootingError, SingularityError

logger = logging.getLogger("xbouss.solitary")

SINGULARITY_THRESHOLD = 1e-13
DEFAULT_TOL = 1e-10
DEFAULT_POINTS = 4097
TAIL_SWITCH = 1e-3
TAIL_FLOOR = 1e-13
MIN_HALF_WIDTH = 50.0
BISECTION_RTOL = 1e-15
MAX_BISECTIONS = 80
# Shots of the ripple search stop once zeta falls to this fraction of the crest
RIPPLE_LEVEL = 1e-5
RIPPLE_XTOL = 1e-12
MAX_RIPPLE_SHOTS = 200
# Relative offsets from the GN amplitude probed before the search
SCAN_OFFSETS = (1e-6, 1e-5, 2e-5, 5e-5, 1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 0.1, 0.25, 0.5, 1.0)

LOW = "low"
HIGH = "high"


class Mode(str, enum.Enum):
    XB = "xb"
    GN = "gn"


@dataclass(frozen=True)
class OdeState:
    zeta: float
    dzeta: float
    d2zeta: float


def _mode(gn_mode: Union[bool, Mode, str]) -> Mode:
    if isinstance(gn_mode, bool):
        return Mode.GN if gn_mode else Mode.XB
    return Mode(gn_mode)


def _xb_jerk(z: float, dz: float, d2z: float, eps: float, c2: float, threshold: float) -> float:
    h = 1.0 + eps * z
    if h <= 0.0:
        raise DepthError(h)
    if abs(dz) < threshold:
        raise SingularityError(dz, threshold)
    rhs = (eps * c2 / 6.0) * (eps * z - 1.0) * dz * dz + (eps * eps * c2 / 90.0) * d2z * d2z - 0.5 * z * z * (1.0 - c2 / h)
    return rhs * 45.0 / (eps * eps * c2 * dz)


def xb_third_derivative(state: OdeState, params: ModelParams, threshold: float = SINGULARITY_THRESHOLD) -> float:
    return _xb_jerk(state.zeta, state.dzeta, state.d2zeta, params.epsilon, params.c ** 2, threshold)


def gn_third_derivative(state: OdeState, params: ModelParams) -> float:
    eps, c2 = params.epsilon, params.c ** 2
    return 3.0 / (eps * c2) * state.dzeta * (c2 - 1.0 - 3.0 * eps * state.zeta)


def xb_fourth_derivative(zeta: float, dzeta: float, d2zeta: float, params: ModelParams) -> float:
    """zeta'''' from the x-derivative of the traveling ODE divided by zeta'.

    Unlike the zeta'''-resolved form it has no singularity where zeta' = 0.
    """
    eps, c2 = params.epsilon, params.c ** 2
    h = 1.0 + eps * zeta
    if h <= 0.0:
        raise DepthError(h)
    force = zeta - c2 * zeta * (2.0 + eps * zeta) / (2.0 * h * h)
    bracket = (eps * c2 / 6.0) * (eps * dzeta * dzeta + 2.0 * (eps * zeta - 1.0) * d2zeta)
    return 45.0 / (eps * eps * c2) * (bracket - force)


def traveling_residual(zeta, dzeta, d2zeta, d3zeta, params: ModelParams, gn_mode: Union[bool, Mode] = False):
    """Pointwise residual (left minus right side) of the traveling ODE."""
    eps, c2 = params.epsilon, params.c ** 2
    z, dz = np.asarray(zeta, dtype=float), np.asarray(dzeta, dtype=float)
    if _mode(gn_mode) is Mode.GN:
        return (eps * c2 / 6.0) * dz ** 2 - 0.5 * z ** 2 * (c2 - 1.0 - eps * z)
    d2z, d3z = np.asarray(d2zeta, dtype=float), np.asarray(d3zeta, dtype=float)
    lhs = 0.5 * z ** 2 * (1.0 - c2 / (1.0 + eps * z))
    rhs = (eps * c2 / 6.0) * (eps * z - 1.0) * dz ** 2 - (eps ** 2 * c2 / 45.0) * d3z * dz + (eps ** 2 * c2 / 90.0) * d2z ** 2
    return lhs - rhs


def crest_curvature(amplitude: float, params: ModelParams) -> float:
    """zeta''(0) from the traveling ODE at the crest, where zeta' = 0.

    zeta''(0)^2 = (90/(eps^2 c^2)) (a^2/2)(1 - c^2/(1 + eps a)), negative root.
    A crest needs a >= (c^2 - 1)/eps; the curvature vanishes at equality.
    """
    a, eps, c2 = amplitude, params.epsilon, params.c ** 2
    if not a > 0.0:
        raise ParameterError(f"crest amplitude must be positive, got {a!r}")
    h = 1.0 + eps * a
    if h <= 0.0:
        raise DepthError(h)
    scale = 90.0 / (eps * eps * c2) * 0.5 * a * a
    radicand = scale * (1.0 - c2 / h)
    if radicand < 0.0:
        # a = (c^2-1)/eps only reaches zero up to rounding
        if radicand < -8.0 * np.finfo(float).eps * scale:
            raise NoCrestError(a, radicand)
        radicand = 0.0
    return -math.sqrt(radicand)


def gn_crest_curvature(amplitude: float, params: ModelParams) -> float:
    a, eps, c2 = amplitude, params.epsilon, params.c ** 2
    curvature = 3.0 / (eps * c2) * (a * (c2 - 1.0) - 1.5 * eps * a * a)
    if not curvature < 0.0:
        raise NoCrestError(a, curvature)
    return curvature


def crest_fourth_derivative(amplitude: float, d2: float, params: ModelParams, gn_mode: Union[bool, Mode] = False) -> float:
    """zeta''''(0) from the fourth-order form of the ODE (or its GN analogue) at the crest."""
    a, eps, c2 = amplitude, params.epsilon, params.c ** 2
    if _mode(gn_mode) is Mode.GN:
        return 3.0 / (eps * c2) * d2 * (c2 - 1.0 - 3.0 * eps * a)
    return xb_fourth_derivative(a, 0.0, d2, params)


def crest_series(amplitude: float, d2: float, d4: float, xi) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Even 4th-order Taylor expansion about the crest: (zeta, zeta', zeta'')."""
    xi = np.asarray(xi, dtype=float)
    zeta = amplitude + 0.5 * d2 * xi ** 2 + d4 / 24.0 * xi ** 4
    dzeta = d2 * xi + d4 / 6.0 * xi ** 3
    d2zeta = d2 + 0.5 * d4 * xi ** 2
    return zeta, dzeta, d2zeta


def decay_rate(params: ModelParams, gn_mode: Union[bool, Mode] = False) -> float:
    """Spatial decay rate kappa of the linearized tail.

    Extended Boussinesq: positive root kappa^2 of
    (eps^2 c^2/90) kappa^4 + (eps c^2/6) kappa^2 + (1 - c^2)/2 = 0. GN: 2K.
    """
    params.require_wave_speed()
    if _mode(gn_mode) is Mode.GN:
        return 2.0 * params.gn_wavenumber
    eps, c2 = params.epsilon, params.c ** 2
    A = eps * eps * c2 / 90.0
    B = eps * c2 / 6.0
    C = 0.5 * (1.0 - c2)
    q = -2.0 * C / (B + math.sqrt(B * B - 4.0 * A * C))
    return math.sqrt(q)


def ripple_frequency(params: ModelParams) -> float:
    """Frequency omega of the oscillatory tail modes: omega^2 = 15/eps + kappa^2."""
    return math.sqrt(15.0 / params.epsilon + decay_rate(params) ** 2)


def tail_modes(state: np.ndarray, kappa: float, omega: float) -> Tuple[float, float]:
    """Growing-mode part and ripple amplitude of (zeta, zeta', zeta'', zeta''') in the linear tail.

    There zeta = D e^{-kappa xi} + G e^{kappa xi} + P with P'' = -omega^2 P.
    """
    z, dz, d2z, d3z = (float(v) for v in state[:4])
    k2, w2 = kappa * kappa, omega * omega
    growing = 0.5 * ((w2 * z + d2z) + (w2 * dz + d3z) / kappa) / (k2 + w2)
    p = (k2 * z - d2z) / (k2 + w2)
    dp = (k2 * dz - d3z) / (k2 + w2)
    return growing, math.hypot(p, dp / omega)


def auto_half_width(params: ModelParams, kappa: float) -> float:
    """Smallest multiple of 10 (>= 50) where a GN-sized tail falls below TAIL_FLOOR."""
    reach = math.log(4.0 * params.gn_amplitude / TAIL_FLOOR) / kappa
    return 10.0 * math.ceil(max(MIN_HALF_WIDTH, reach) / 10.0)


@dataclass
class ShotSettings:
    params: ModelParams
    mode: Mode
    tol: float
    half_width: float
    kappa: float
    offset: float
    method: str = "RK45"
    threshold: float = SINGULARITY_THRESHOLD

    @property
    def omega(self) -> float:
        return ripple_frequency(self.params)

    def rhs(self) -> Callable:
        eps, c2, threshold = self.params.epsilon, self.params.c ** 2, self.threshold
        if self.mode is Mode.GN:
            coef = 3.0 / (eps * c2)

            def gn(xi, y):
                return (y[1], y[2], coef * y[1] * (c2 - 1.0 - 3.0 * eps * y[0]))

            return gn

        def xb(xi, y):
            return (y[1], y[2], _xb_jerk(y[0], y[1], y[2], eps, c2, threshold))

        return xb

    def rhs4(self) -> Callable:
        params = self.params

        def xb4(xi, y):
            return (y[1], y[2], y[3], xb_fourth_derivative(y[0], y[1], y[2], params))

        return xb4

    def atol(self, amplitude: float, order: int = 3) -> np.ndarray:
        K = self.params.gn_wavenumber
        return amplitude * K ** np.arange(order) * self.tol * 1e-4

    def crest(self, amplitude: float) -> Tuple[float, float]:
        if self.mode is Mode.GN:
            d2 = gn_crest_curvature(amplitude, self.params)
        else:
            d2 = crest_curvature(amplitude, self.params)
        return d2, crest_fourth_derivative(amplitude, d2, self.params, self.mode)


def _event(func: Callable, terminal: bool = True, direction: float = 0.0) -> Callable:
    func.terminal = terminal
    func.direction = direction
    return func


def _guard_events(amplitude: float, kappa: float) -> List[Callable]:
    def crosses_zero(xi, y):
        return y[0]

    def turns_back(xi, y):
        # only armed on the lower half of the wave
        return y[1] + 0.5 * kappa * y[0] if y[0] < 0.5 * amplitude else -amplitude

    return [_event(crosses_zero, direction=-1.0), _event(turns_back, direction=1.0)]


def classify_shot(amplitude: float, settings: ShotSettings) -> str:
    """`low` or `high` outcome of one shot from the crest."""
    try:
        d2, d4 = settings.crest(amplitude)
    except NoCrestError:
        return LOW
    y0 = np.array(crest_series(amplitude, d2, d4, settings.offset), dtype=float)
    try:
        sol = solve_ivp(
            settings.rhs(),
            (settings.offset, settings.half_width),
            y0,
            method=settings.method,
            rtol=settings.tol,
            atol=settings.atol(amplitude),
            events=_guard_events(amplitude, settings.kappa),
        )
    except SingularityError:
        return LOW
    except DepthError:
        # only reachable far below zero
        return HIGH
    if sol.t_events[0].size:
        return HIGH
    if sol.t_events[1].size:
        return LOW
    z, dz = sol.y[0, -1], sol.y[1, -1]
    return LOW if settings.kappa * z + dz > 0.0 else HIGH


def ripple_amplitude(amplitude: float, settings: ShotSettings) -> float:
    """Tail ripple left by a fourth-order shot from the crest (inf if there is no crest).

    The shot runs from xi = 0 until zeta falls to RIPPLE_LEVEL * amplitude, or
    until the growing mode takes over, and the ripple is read off there.
    """
    params, kappa, omega = settings.params, settings.kappa, settings.omega
    try:
        d2 = crest_curvature(amplitude, params)
    except NoCrestError:
        return math.inf
    a = amplitude

    def reaches_level(xi, y):
        return y[0] - RIPPLE_LEVEL * a

    def grows(xi, y):
        return tail_modes(y, kappa, omega)[0] - 0.5 * y[0] if y[0] < 0.5 * a else -a

    def falls(xi, y):
        return tail_modes(y, kappa, omega)[0] + 0.5 * y[0] if y[0] < 0.5 * a else a

    try:
        sol = solve_ivp(
            settings.rhs4(),
            (0.0, settings.half_width),
            np.array([a, 0.0, d2, 0.0]),
            method=settings.method,
            rtol=settings.tol,
            atol=settings.atol(a, order=4),
            events=[_event(reaches_level, direction=-1.0), _event(grows, direction=1.0), _event(falls, direction=-1.0)],
        )
    except DepthError:
        return math.inf
    return tail_modes(sol.y[:, -1], kappa, omega)[1]


def _search_ripple(settings: ShotSettings) -> Tuple[float, int]:
    a_gn = settings.params.gn_amplitude
    multipliers = [1.0 + r for r in SCAN_OFFSETS]
    ripples = [ripple_amplitude(a_gn * m, settings) for m in multipliers]
    logger.debug("scan ripples: %s", list(zip(multipliers, ripples)))
    best = int(np.argmin(ripples))
    if best in (0, len(multipliers) - 1) or not math.isfinite(ripples[best]):
        raise ShootingError(
            "the ripple minimum is not inside the amplitude scan",
            {"multipliers": multipliers, "ripples": ripples, "c": settings.params.c, "epsilon": settings.params.epsilon},
        )
    res = minimize_scalar(
        lambda m: ripple_amplitude(a_gn * m, settings),
        bracket=tuple(multipliers[best - 1:best + 2]),
        method="brent",
        tol=RIPPLE_XTOL,
        options={"maxiter": MAX_RIPPLE_SHOTS},
    )
    shots = len(multipliers) + int(res.nfev)
    if not res.success:
        raise ShootingError("ripple search did not converge", {"message": str(res.message), "shots": shots})
    logger.debug("ripple search finished after %d shots: multiplier %.17g, ripple %.3e", shots, res.x, res.fun)
    return a_gn * float(res.x), shots


def _bisect_amplitude(settings: ShotSettings) -> Tuple[float, int]:
    a_gn = settings.params.gn_amplitude
    multipliers = sorted({1.0 - r for r in SCAN_OFFSETS if r < 1.0} | {1.0 + r for r in SCAN_OFFSETS} | {0.5, 2.0})
    amplitudes = [a_gn * m for m in multipliers]
    outcomes = [classify_shot(a, settings) for a in amplitudes]
    shots = len(amplitudes)
    logger.debug("scan outcomes: %s", list(zip(multipliers, outcomes)))

    bracket = None
    for i in range(len(amplitudes) - 2, -1, -1):
        if outcomes[i] != outcomes[i + 1]:
            bracket = (i, i + 1)
            break
    if bracket is None:
        raise ShootingError(
            "no outcome change in the amplitude scan",
            {"amplitudes": amplitudes, "outcomes": outcomes, "c": settings.params.c, "epsilon": settings.params.epsilon},
        )

    lo, hi = amplitudes[bracket[0]], amplitudes[bracket[1]]
    lo_outcome = outcomes[bracket[0]]
    for _ in range(MAX_BISECTIONS):
        if hi - lo <= BISECTION_RTOL * hi:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        outcome = classify_shot(mid, settings)
        shots += 1
        if outcome == lo_outcome:
            lo = mid
        else:
            hi = mid
    logger.debug("bisection finished after %d shots: [%.17g, %.17g]", shots, lo, hi)
    return 0.5 * (lo + hi), shots


def shoot_amplitude(settings: ShotSettings) -> Tuple[float, int]:
    """Crest amplitude and the number of shots spent.

    Extended Boussinesq: the amplitude whose shot leaves no tail ripple. GN mode:
    bisection between the highest adjacent low/high pair of the scan.
    """
    if settings.mode is Mode.GN:
        return _bisect_amplitude(settings)
    return _search_ripple(settings)


@dataclass(frozen=True)
class SolitaryProfile:
    grid: Grid1D
    zeta: np.ndarray
    dzeta: np.ndarray
    d2zeta: np.ndarray
    v: np.ndarray
    params: ModelParams
    amplitude: float
    solver_tol: float
    mode: Mode = Mode.XB
    method: str = "RK45"
    kappa: float = 0.0
    offset: float = 0.0
    tail_start: float = 0.0
    shots: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def xi(self) -> np.ndarray:
        return self.grid.points()

    def integrated_mask(self, margin: int = 0) -> np.ndarray:
        """Nodes with offset <= |xi| <= tail_start - margin*dx (the integrated range)."""
        r = np.abs(self.xi)
        return (r >= self.offset) & (r <= self.tail_start - margin * self.grid.dx)


def solve_profile(
    params: ModelParams,
    half_width: Optional[float] = None,
    tol: float = DEFAULT_TOL,
    gn_mode: Union[bool, Mode, str] = False,
    n: int = DEFAULT_POINTS,
    method: str = "RK45",
    tail_switch: float = TAIL_SWITCH,
) -> SolitaryProfile:
    """Symmetric solitary wave on [-half_width, half_width] with n samples."""
    params.require_wave_speed()
    if not 1e-12 <= tol <= 1e-6:
        raise ParameterError(f"tol must lie in [1e-12, 1e-6], got {tol!r}")
    if not 0.0 < tail_switch < 0.5:
        raise ParameterError(f"tail_switch must lie in (0, 0.5), got {tail_switch!r}")
    mode = _mode(gn_mode)
    kappa = decay_rate(params, mode)
    width = auto_half_width(params, kappa) if half_width is None else float(half_width)
    grid = Grid1D.centered(width, n)
    settings = ShotSettings(
        params=params,
        mode=mode,
        tol=tol,
        half_width=width,
        kappa=kappa,
        offset=1e-3 / params.gn_wavenumber,
        method=method,
    )
    logger.info("Solving %s solitary wave c=%.6g eps=%.3g (half_width=%g, tol=%.1e, %s)",
                mode.value, params.c, params.epsilon, width, tol, method)

    amplitude, shots = shoot_amplitude(settings)
    d2, d4 = settings.crest(amplitude)
    y0 = np.array(crest_series(amplitude, d2, d4, settings.offset), dtype=float)

    def reaches_tail(xi, y):
        return y[0] - tail_switch * amplitude

    events = [_event(reaches_tail, direction=-1.0)] + _guard_events(amplitude, kappa)
    try:
        sol = solve_ivp(settings.rhs(), (settings.offset, width), y0, method=method, rtol=tol,
                        atol=settings.atol(amplitude), events=events, dense_output=True)
    except SingularityError as exc:
        raise ShootingError("converged amplitude hit the crest singularity", {"amplitude": amplitude}) from exc
    if not sol.t_events[0].size:
        raise ShootingError(
            "converged amplitude does not reach the tail level",
            {"amplitude": amplitude, "tail_switch": tail_switch, "status": sol.status, "message": sol.message},
        )
    tail_start = float(sol.t_events[0][0])
    zeta_cut = float(sol.y_events[0][0][0])

    xi = grid.points()
    r = np.abs(xi)
    zeta = np.empty(n)
    dz = np.empty(n)
    d2z = np.empty(n)
    near = r < settings.offset
    far = r > tail_start
    mid = ~near & ~far
    zeta[near], dz[near], d2z[near] = crest_series(amplitude, d2, d4, r[near])
    if np.any(mid):
        zeta[mid], dz[mid], d2z[mid] = sol.sol(r[mid])
    tail = zeta_cut * np.exp(-kappa * (r[far] - tail_start))
    zeta[far], dz[far], d2z[far] = tail, -kappa * tail, kappa * kappa * tail
    dzeta = np.sign(xi) * dz

    edge = max(abs(zeta[0]), abs(zeta[-1]))
    if edge > 1e-12:
        raise DecayError(float(edge), 1e-12)
    c, eps = params.c, params.epsilon
    profile = SolitaryProfile(
        grid=grid,
        zeta=zeta,
        dzeta=dzeta,
        d2zeta=d2z,
        v=c * zeta / (1.0 + eps * zeta),
        params=params,
        amplitude=amplitude,
        solver_tol=tol,
        mode=mode,
        method=method,
        kappa=kappa,
        offset=settings.offset,
        tail_start=tail_start,
        shots=shots,
        meta={"gn_amplitude": params.gn_amplitude, "tail_switch": tail_switch},
    )
    logger.info("Amplitude %.15g after %d shots (GN amplitude %.15g)", amplitude, shots, params.gn_amplitude)
    return profile


def tail_amplitude(
    params: ModelParams,
    tol: float = DEFAULT_TOL,
    gn_mode: Union[bool, Mode, str] = False,
    method: str = "RK45",
) -> float:
    """Crest amplitude reached by integrating from the linearized tail towards the crest.

    Starts on the decaying mode zeta = theta, zeta' = -kappa theta, zeta'' = kappa^2 theta
    and integrates with decreasing xi until zeta' is close to zero; the crest
    is extrapolated from the local parabola.
    """
    params.require_wave_speed()
    mode = _mode(gn_mode)
    kappa = decay_rate(params, mode)
    a_gn = params.gn_amplitude
    theta = 1e-6 * a_gn
    eta = 1e-4 * kappa * a_gn
    settings = ShotSettings(params, mode, tol, 0.0, kappa, 0.0, method)
    span = 2.0 * math.log(4.0 * a_gn / theta) / kappa

    def near_crest(xi, y):
        return y[1] + eta

    y0 = np.array([theta, -kappa * theta, kappa * kappa * theta])
    try:
        sol = solve_ivp(settings.rhs(), (0.0, -span), y0, method=method, rtol=tol,
                        atol=settings.atol(a_gn), events=[_event(near_crest, direction=1.0)])
    except SingularityError as exc:
        raise ShootingError("tail path reached the crest singularity", {"theta": theta, "eta": eta}) from exc
    if not sol.t_events[0].size:
        raise ShootingError("tail path never approached a crest", {"theta": theta, "eta": eta, "span": span})
    z, dz, d2z = sol.y_events[0][0]
    return float(z - dz * dz / (2.0 * d2z))


def ode_residual(profile: SolitaryProfile) -> np.ndarray:
    """Pointwise residual of the traveling ODE with zeta''' from finite differences of zeta''."""
    d3 = spatial_derivative(profile.d2zeta, profile.grid, 1)
    return traveling_residual(profile.zeta, profile.dzeta, profile.d2zeta, d3, profile.params, profile.mode)
