"""Model operators, residues R1/R2 of the corrected family and the epsilon sweep.

    R1 = d_t zeta + d_x(h v)
    R2 = (1 + eps T[zeta] + eps^2 TT) d_t v + d_x zeta + eps v d_x v + eps^2 Q v

with T[zeta]w = -(1/(3h)) d_x((1 + 3 eps zeta) d_x w), TT w = -(1/45) d_x^4 w and
Q v = -(1/3) d_x(v v_xx - v_x^2).
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import settings
from .core import Grid1D, ModelParams, depth, discrete_norm, spatial_derivative
from .corrector import DEFAULT_QUAD_TOL, Closure, CorrectedSolution, transport_stack, zeta1_jet
from .errors import ParameterError
from .jets import Jet

logger = logging.getLogger("xbouss.residuals")

# Reference residues at t = 1, alpha = 1 with Gaussian correctors
REFERENCE_RESIDUES = {
    1e-1: {"r1_l2": 2.70e-02, "r2_l2": 3.80e-03, "r1_inf": 4.30e-03, "r2_inf": 4.81e-04},
    1e-2: {"r1_l2": 2.58e-05, "r2_l2": 2.96e-06, "r1_inf": 4.17e-06, "r2_inf": 4.10e-07},
    1e-3: {"r1_l2": 2.57e-08, "r2_l2": 2.89e-09, "r1_inf": 4.16e-09, "r2_inf": 4.12e-10},
    1e-4: {"r1_l2": 2.57e-11, "r2_l2": 2.88e-12, "r1_inf": 4.16e-12, "r2_inf": 4.13e-13},
    1e-5: {"r1_l2": 2.58e-14, "r2_l2": 2.90e-15, "r1_inf": 4.33e-15, "r2_inf": 5.22e-16},
}

NORM_KEYS = ("r1_l2", "r2_l2", "r1_inf", "r2_inf")


def op_T(zeta: np.ndarray, w: np.ndarray, grid: Grid1D, epsilon: float) -> np.ndarray:
    h = depth(zeta, epsilon)
    flux = (1.0 + 3.0 * epsilon * np.asarray(zeta, dtype=float)) * spatial_derivative(w, grid, 1)
    return -spatial_derivative(flux, grid, 1) / (3.0 * h)


def op_frakT(w: np.ndarray, grid: Grid1D) -> np.ndarray:
    return -spatial_derivative(w, grid, 4) / 45.0


def op_Q(v: np.ndarray, grid: Grid1D) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    vx = spatial_derivative(v, grid, 1)
    vxx = spatial_derivative(v, grid, 2)
    return -spatial_derivative(v * vxx - vx ** 2, grid, 1) / 3.0


def residual_fields(
    zeta: np.ndarray,
    v: np.ndarray,
    zeta_t: np.ndarray,
    v_t: np.ndarray,
    grid: Grid1D,
    epsilon: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """R1, R2 samples for given fields and time derivatives."""
    eps = epsilon
    h = depth(zeta, eps)
    r1 = zeta_t + spatial_derivative(h * v, grid, 1)
    r2 = (
        v_t
        + eps * op_T(zeta, v_t, grid, eps)
        + eps ** 2 * op_frakT(v_t, grid)
        + spatial_derivative(zeta, grid, 1)
        + eps * v * spatial_derivative(v, grid, 1)
        + eps ** 2 * op_Q(v, grid)
    )
    return r1, r2


def background_momentum(z1: Jet, v1: Jet, c: float, epsilon: float) -> np.ndarray:
    """R2 of the bare background (zeta_1, v_1), pointwise from its jets.

    Every derivative is exact, so the O(1) terms cancel without the grid
    noise of spectral differentiation.
    """
    eps = epsilon
    zeta, zx = z1.derivative(0), z1.derivative(1)
    v0, v1x, v2x, v3x = (v1.derivative(j) for j in range(4))
    w = v1.differentiate() * (-c)
    flux_x = (1.0 + 3.0 * eps * zeta) * w.derivative(2) + 3.0 * eps * zx * w.derivative(1)
    return (
        w.value
        - eps * flux_x / (3.0 * (1.0 + eps * zeta))
        - eps ** 2 * w.derivative(4) / 45.0
        + zx
        + eps * v0 * v1x
        - eps ** 2 * (v0 * v3x - v1x * v2x) / 3.0
    )


class _SplitResidual:
    """R1/R2 of (zeta_1 + eps^2 zeta_2, v_1 + eps^2 v_2) with the background handled exactly.

    R1 of the background vanishes identically (h_1 v_1 = c zeta_1), R2 of the
    background comes from `background_momentum`; only terms carrying the
    corrector go through `spatial_derivative`.
    """

    def __init__(self, z1: Jet, v1: Jet, zeta2, v2, grid: Grid1D, c: float, epsilon: float):
        eps = epsilon
        self.grid, self.eps = grid, eps
        zeta1, v1_0 = z1.value, v1.value
        self.zeta = zeta1 + eps ** 2 * zeta2
        h1 = 1.0 + eps * zeta1
        h = depth(self.zeta, eps)
        self.flux_x = spatial_derivative(
            v2 + eps * (zeta1 * v2 + zeta2 * v1_0) + eps ** 3 * zeta2 * v2, grid, 1
        )

        w = v1.differentiate() * (-c)
        wx = w.derivative(1)
        g = (1.0 + 3.0 * eps * zeta1) * w.derivative(2) + 3.0 * eps * z1.derivative(1) * wx
        t_shift = eps ** 3 * zeta2 * g / (3.0 * h * h1) - eps ** 3 * spatial_derivative(zeta2 * wx, grid, 1) / h

        d1, d2, d3 = (spatial_derivative(v2, grid, k) for k in (1, 2, 3))
        u1, u2, u3 = v1.derivative(1), v1.derivative(2), v1.derivative(3)
        q_shift = -(
            v1_0 * d3 + v2 * u3 + eps ** 2 * v2 * d3 - u1 * d2 - d1 * u2 - eps ** 2 * d1 * d2
        ) / 3.0

        self.static = (
            background_momentum(z1, v1, c, eps)
            + eps * t_shift
            + eps ** 2 * spatial_derivative(zeta2, grid, 1)
            + eps ** 3 * (v1_0 * d1 + v2 * u1)
            + eps ** 5 * v2 * d1
            + eps ** 4 * q_shift
        )

    def __call__(self, zeta2_t, v2_t) -> Tuple[np.ndarray, np.ndarray]:
        eps, grid = self.eps, self.grid
        r1 = eps ** 2 * (zeta2_t + self.flux_x)
        r2 = self.static + eps ** 2 * (
            v2_t + eps * op_T(self.zeta, v2_t, grid, eps) + eps ** 2 * op_frakT(v2_t, grid)
        )
        return r1, r2


@dataclass
class ResidualPair:
    r1: np.ndarray
    r2: np.ndarray
    time_fd_warning: bool = False
    richardson_ratio: float = 0.0

    def __iter__(self) -> Iterator[np.ndarray]:
        yield self.r1
        yield self.r2


def residual_pair(
    sol: CorrectedSolution,
    t: float,
    grid: Grid1D,
    dt: float = 1e-3,
    richardson_threshold: float = 0.1,
) -> ResidualPair:
    """Residues of the corrected family on `grid` at time t.

    The background enters through its jets only (d_t = -c d_x, exact x-derivatives);
    the corrector uses the 4th-order five-point difference with step dt, checked
    against the 2nd-order difference on the same +-2dt points.
    """
    if not dt > 0.0:
        raise ParameterError(f"dt must be positive, got {dt!r}")
    if t - 2.0 * dt < 0.0:
        raise ParameterError(f"the time stencil needs t >= 2*dt, got t={t!r}, dt={dt!r}")
    sol.check_time(t)
    params = sol.params
    eps, c = params.epsilon, params.c
    x = grid.points()

    z1 = zeta1_jet(params, t, x)
    v1 = (z1 * c) / (1.0 + z1 * eps)
    times = [t - 2 * dt, t - dt, t, t + dt, t + 2 * dt]
    zeta2, v2 = transport_stack(times, x, sol.initial_data, sol.forcing, sol.quadrature_tol)

    def d4(f: np.ndarray) -> np.ndarray:
        return (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * dt)

    def d2(f: np.ndarray) -> np.ndarray:
        return (f[4] - f[0]) / (4.0 * dt)

    split = _SplitResidual(z1, v1, zeta2[2], v2[2], grid, c, eps)
    r1, r2 = split(d4(zeta2), d4(v2))
    r1_lo, r2_lo = split(d2(zeta2), d2(v2))

    ratios = []
    for hi, lo in ((r1, r1_lo), (r2, r2_lo)):
        scale = np.linalg.norm(hi)
        ratios.append(np.linalg.norm(hi - lo) / scale if scale > 0.0 else 0.0)
    ratio = float(max(ratios))
    warn = ratio > richardson_threshold
    if warn:
        logger.warning(
            "eps=%.3g t=%.3g: time differences disagree by %.1f%% of the residual; dt=%.1e dominates",
            eps, t, 100 * ratio, dt,
        )
    return ResidualPair(r1, r2, warn, ratio)


@dataclass
class ResidualConfig:
    t: float = 1.0
    alpha: float = 1.0
    grid: Grid1D = field(default_factory=lambda: Grid1D.default(periodic=True))
    dt: float = 1e-3
    quadrature_tol: float = DEFAULT_QUAD_TOL
    closure: Closure = Closure.COMPENSATED
    fit_window: Tuple[float, float] = (1e-4, 1e-1)
    richardson_threshold: float = 0.1
    horizon: float = 1.0


@dataclass
class ResidualReport:
    epsilon: float
    r1_l2: float
    r2_l2: float
    r1_inf: float
    r2_inf: float
    t_eval: float
    grid: Dict = field(default_factory=dict)
    dt: float = 1e-3
    closure: str = Closure.COMPENSATED.value
    time_fd_warning: bool = False
    richardson_ratio: float = 0.0

    def norms(self) -> Dict[str, float]:
        return {key: getattr(self, key) for key in NORM_KEYS}

    def to_row(self) -> Dict:
        row = asdict(self)
        grid = row.pop("grid")
        row.update({f"grid_{k}": v for k, v in grid.items()})
        return row


@dataclass
class SweepResult:
    reports: List[ResidualReport]
    slopes: Dict[str, Optional[float]]
    fit_window: Tuple[float, float]
    fit_points: int

    @property
    def epsilons(self) -> List[float]:
        return [r.epsilon for r in self.reports]

    def slopes_defined(self) -> bool:
        return all(s is not None for s in self.slopes.values())


def evaluate_epsilon(epsilon: float, config: Optional[ResidualConfig] = None) -> ResidualReport:
    cfg = config or ResidualConfig()
    params = ModelParams.from_alpha(cfg.alpha, epsilon)
    sol = CorrectedSolution(params, quadrature_tol=cfg.quadrature_tol, closure=cfg.closure, horizon=cfg.horizon)
    logger.debug("residuals: eps=%.1e t=%.3g n=%d closure=%s", epsilon, cfg.t, cfg.grid.n, cfg.closure)
    pair = residual_pair(sol, cfg.t, cfg.grid, cfg.dt, cfg.richardson_threshold)
    dx = cfg.grid.dx
    return ResidualReport(
        epsilon=epsilon,
        r1_l2=discrete_norm(pair.r1, dx, 2),
        r2_l2=discrete_norm(pair.r2, dx, 2),
        r1_inf=discrete_norm(pair.r1, dx, "inf"),
        r2_inf=discrete_norm(pair.r2, dx, "inf"),
        t_eval=cfg.t,
        grid=cfg.grid.meta(),
        dt=cfg.dt,
        closure=Closure(cfg.closure).value,
        time_fd_warning=pair.time_fd_warning,
        richardson_ratio=pair.richardson_ratio,
    )


def fit_slopes(
    reports: Sequence[ResidualReport], window: Tuple[float, float] = (1e-4, 1e-1)
) -> Tuple[Dict[str, Optional[float]], int]:
    """Least-squares slope of log ||R|| against log eps inside `window`.

    A slope needs at least three points; otherwise it is None.
    """
    lo, hi = window
    inside = [r for r in reports if lo * (1 - 1e-9) <= r.epsilon <= hi * (1 + 1e-9)]
    slopes: Dict[str, Optional[float]] = {}
    for key in NORM_KEYS:
        pts = [(r.epsilon, getattr(r, key)) for r in inside if getattr(r, key) > 0.0]
        if len(pts) < 3:
            slopes[key] = None
            continue
        log_eps = np.log([p[0] for p in pts])
        log_r = np.log([p[1] for p in pts])
        slopes[key] = float(np.polyfit(log_eps, log_r, 1)[0])
    return slopes, len(inside)


def validate_eps_list(eps_list: Sequence[float]) -> List[float]:
    eps = [float(e) for e in eps_list]
    if not eps:
        raise ParameterError("epsilon list is empty")
    for e in eps:
        if not math.isfinite(e) or not 0.0 < e <= 1.0:
            raise ParameterError(f"epsilon values must lie in (0, 1], got {e!r}")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ParameterError(f"epsilon list must be strictly decreasing, got {eps}")
    return eps


def sweep(eps_list: Sequence[float], config: Optional[ResidualConfig] = None) -> SweepResult:
    """One ResidualReport per epsilon plus fitted log-log slopes.

    Entries run on XBOUSS_WORKERS threads; reports come back in input order.
    """
    eps = validate_eps_list(eps_list)
    cfg = config or ResidualConfig()
    workers = min(settings.worker_count(), len(eps))
    logger.info("Residual sweep over %d epsilons (%d workers, closure=%s)", len(eps), workers, Closure(cfg.closure).value)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda e: evaluate_epsilon(e, cfg), eps))
    else:
        reports = [evaluate_epsilon(e, cfg) for e in eps]
    slopes, count = fit_slopes(reports, cfg.fit_window)
    if any(s is None for s in slopes.values()):
        logger.info("Slope fit needs >= 3 epsilons inside %s; slopes reported as absent", cfg.fit_window)
    return SweepResult(reports, slopes, tuple(cfg.fit_window), count)


def with_closure(config: ResidualConfig, closure: Closure) -> ResidualConfig:
    return replace(config, closure=Closure(closure))
