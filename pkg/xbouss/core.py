"""Parameters, grids, sampled fields, norms and spatial derivatives.

Everything here is a pure function of its inputs; the dataclasses are frozen
so they can be shared freely between the sweep worker threads.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np

from .errors import DecayError, DepthError, NonFiniteError, ParameterError

logger = logging.getLogger("xbouss.core")

DECAY_LIMIT = 1e-12
# Centered stencils reach this accuracy order in the interior
FD_ACCURACY = 8


@dataclass(frozen=True)
class ModelParams:
    """Nonlinearity epsilon plus either an explicit celerity or an amplitude alpha.

    Traveling-wave code sets `celerity`; the corrector family sets `alpha` and
    derives c = sqrt(1/(1 - alpha*eps)) and k = sqrt(3*alpha/4).
    """

    epsilon: float
    celerity: Optional[float] = None
    alpha: Optional[float] = None

    def __post_init__(self) -> None:
        eps = self.epsilon
        if not math.isfinite(eps) or not 0.0 < eps <= 1.0:
            raise ParameterError(f"epsilon must lie in (0, 1], got {eps!r}")
        if self.celerity is not None and (not math.isfinite(self.celerity) or self.celerity <= 0.0):
            raise ParameterError(f"celerity must be positive and finite, got {self.celerity!r}")
        if self.alpha is not None:
            if not math.isfinite(self.alpha) or self.alpha < 0.0:
                raise ParameterError(f"alpha must be non-negative and finite, got {self.alpha!r}")
            if self.alpha * eps >= 1.0:
                raise ParameterError(f"alpha*epsilon must be < 1, got {self.alpha * eps!r}")

    @classmethod
    def from_alpha(cls, alpha: float, epsilon: float) -> "ModelParams":
        return cls(epsilon=epsilon, alpha=alpha)

    @property
    def c(self) -> float:
        if self.celerity is not None:
            return self.celerity
        if self.alpha is None:
            raise ParameterError("ModelParams needs a celerity or an alpha")
        return math.sqrt(1.0 / (1.0 - self.alpha * self.epsilon))

    @property
    def k(self) -> float:
        if self.alpha is None:
            raise ParameterError("wavenumber k needs alpha")
        return math.sqrt(3.0 * self.alpha / 4.0)

    @property
    def gn_amplitude(self) -> float:
        """Crest height (c^2 - 1)/eps of the Green-Naghdi solitary wave."""
        return (self.c ** 2 - 1.0) / self.epsilon

    @property
    def gn_wavenumber(self) -> float:
        c2 = self.c ** 2
        return math.sqrt(3.0 * (c2 - 1.0) / (4.0 * c2 * self.epsilon))

    def require_wave_speed(self) -> None:
        """Solitary waves of elevation only exist for c > 1."""
        if not self.c > 1.0:
            raise ParameterError(f"no solitary wave for c = {self.c!r}; need c > 1")


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid; periodic grids leave out x_max. Non-periodic differentiation needs n >= 13 for order 5."""

    x_min: float
    x_max: float
    n: int
    periodic: bool = False

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 8:
            raise ParameterError(f"grid needs n >= 8 points, got {self.n!r}")
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)) or not self.x_max > self.x_min:
            raise ParameterError(f"grid extent must satisfy x_min < x_max, got [{self.x_min}, {self.x_max}]")

    @classmethod
    def default(cls, periodic: bool = False) -> "Grid1D":
        return cls(-50.0, 50.0, 4096, periodic)

    @classmethod
    def centered(cls, half_width: float, n: int, periodic: bool = False) -> "Grid1D":
        return cls(-float(half_width), float(half_width), int(n), periodic)

    @property
    def dx(self) -> float:
        intervals = self.n if self.periodic else self.n - 1
        return (self.x_max - self.x_min) / intervals

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    def points(self) -> np.ndarray:
        return self.x_min + np.arange(self.n) * self.dx

    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers matching `numpy.fft.rfft` ordering."""
        if not self.periodic:
            raise ParameterError("wavenumbers are only defined on periodic grids")
        return 2.0 * np.pi * np.fft.rfftfreq(self.n, d=self.dx)

    def shifted(self, offset: float) -> "Grid1D":
        return Grid1D(self.x_min + offset, self.x_max + offset, self.n, self.periodic)

    def meta(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "n": self.n, "periodic": self.periodic}


@dataclass(frozen=True)
class WaveField:
    """(zeta, v) sampled on a grid at time `time`; depth h = 1 + eps*zeta is derived."""

    grid: Grid1D
    zeta: np.ndarray
    v: np.ndarray
    time: float
    epsilon: float
    h: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        zeta = np.asarray(self.zeta, dtype=float)
        v = np.asarray(self.v, dtype=float)
        for name, arr in (("zeta", zeta), ("v", v)):
            if arr.shape != (self.grid.n,):
                raise ParameterError(f"{name} has shape {arr.shape}, expected ({self.grid.n},)")
            check_finite(arr, name)
        h = depth(zeta, self.epsilon)
        object.__setattr__(self, "zeta", zeta)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "h", h)


def check_finite(f: np.ndarray, what: str = "samples") -> None:
    bad = np.flatnonzero(~np.isfinite(f))
    if bad.size:
        raise NonFiniteError(f"non-finite {what}", int(bad[0]))


def depth(zeta: np.ndarray, epsilon: float) -> np.ndarray:
    """h = 1 + eps*zeta, raising DepthError where h <= 0."""
    h = 1.0 + epsilon * np.asarray(zeta, dtype=float)
    if h.size and not np.all(h > 0.0):
        idx = int(np.argmin(h))
        raise DepthError(float(h[idx]), idx)
    return h


def discrete_norm(f: np.ndarray, dx: float, p: Union[int, float, str] = 2) -> float:
    """Discrete L2 (sqrt(dx * sum f^2)) or max norm of a sample vector."""
    f = np.asarray(f, dtype=float)
    if not dx > 0.0:
        raise ParameterError(f"dx must be positive, got {dx!r}")
    check_finite(f)
    if p == 2:
        return float(math.sqrt(dx) * np.linalg.norm(f))
    if p in ("inf", math.inf):
        return float(np.max(np.abs(f))) if f.size else 0.0
    raise ParameterError(f"unsupported norm p={p!r}; use 2 or 'inf'")


@lru_cache(maxsize=None)
def fd_weights(offsets: Tuple[int, ...], order: int) -> np.ndarray:
    """Finite-difference weights at 0 for the given integer node offsets (Fornberg's recursion).

    Computed in exact rationals, so the weights are correctly rounded.
    """
    m = order
    n = len(offsets)
    c = [[Fraction(0)] * (m + 1) for _ in range(n)]
    c[0][0] = Fraction(1)
    c1 = Fraction(1)
    c4 = Fraction(offsets[0])
    for i in range(1, n):
        mn = min(i, m)
        c2 = Fraction(1)
        c5 = c4
        c4 = Fraction(offsets[i])
        for j in range(i):
            c3 = Fraction(offsets[i] - offsets[j])
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2
            for k in range(mn, 0, -1):
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3
            c[j][0] = c4 * c[j][0] / c3
        c1 = c2
    return np.array([float(c[j][m]) for j in range(n)])


def stencil_width(order: int) -> int:
    return 2 * ((order + 1) // 2) - 1 + FD_ACCURACY


def _fd_derivative(f: np.ndarray, dx: float, order: int) -> np.ndarray:
    n = f.size
    width = stencil_width(order)
    if n < width:
        raise ParameterError(f"grid with {n} points is too small for a {width}-point stencil")
    half = width // 2
    out = np.empty_like(f)
    # np.correlate(f, w, 'valid')[i] = sum_j f[i + j] * w[j]
    centered = fd_weights(tuple(range(-half, half + 1)), order)
    out[half:n - half] = np.correlate(f, centered, mode="valid")
    for i in range(half):
        left = fd_weights(tuple(range(-i, width - i)), order)
        out[i] = left @ f[:width]
        right = fd_weights(tuple(range(i - width + 1, i + 1)), order)
        out[n - 1 - i] = right @ f[n - width:]
    return out / dx ** order


def _spectral_derivative(f: np.ndarray, grid: Grid1D, order: int) -> np.ndarray:
    k = grid.wavenumbers()
    symbol = (1j * k) ** order
    if order % 2 == 1 and grid.n % 2 == 0:
        # Nyquist mode has no odd derivative on a real grid
        symbol[-1] = 0.0
    return np.fft.irfft(symbol * np.fft.rfft(f), n=grid.n)


def spatial_derivative(f: np.ndarray, grid: Grid1D, order: int = 1) -> np.ndarray:
    """order-th x-derivative of samples on `grid` (order 1..5).

    Periodic grids use FFT differentiation. Non-periodic grids use 8th-order
    centered differences with shifted one-sided stencils near the ends, and the
    field must have decayed to DECAY_LIMIT at both boundaries. The stencils span
    9 to 13 points, so a non-periodic grid must have at least stencil_width(order)
    points even though Grid1D itself accepts n >= 8.
    """
    if order not in (1, 2, 3, 4, 5):
        raise ParameterError(f"derivative order must be in 1..5, got {order!r}")
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.n,):
        raise ParameterError(f"samples have shape {f.shape}, expected ({grid.n},)")
    check_finite(f)
    if grid.periodic:
        return _spectral_derivative(f, grid, order)
    width = stencil_width(order)
    if grid.n < width:
        raise ParameterError(f"grid with {grid.n} points is too small for a {width}-point stencil")
    edge = max(abs(f[0]), abs(f[-1]))
    if edge > DECAY_LIMIT:
        raise DecayError(float(edge), DECAY_LIMIT)
    return _fd_derivative(f, grid.dx, order)
