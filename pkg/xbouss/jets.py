"""Taylor-mode (jet) arithmetic over numpy arrays.

A `Jet` holds the truncated Taylor coefficients c_k = f^(k)(x)/k! of a
function at a batch of points, so products and quotients propagate exact
derivatives without symbolic expansion or finite differences.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable

import numpy as np
from numpy.polynomial import Polynomial

from .errors import ParameterError

class Jet:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim == 0:
            raise ParameterError("a jet needs at least the value coefficient")
        self.coeffs = coeffs

    @classmethod
    def from_derivatives(cls, derivatives: Iterable) -> "Jet":
        rows = [np.asarray(d, dtype=float) / math.factorial(k) for k, d in enumerate(derivatives)]
        return cls(np.stack(np.broadcast_arrays(*rows)))

    @classmethod
    def constant(cls, value, order: int) -> "Jet":
        value = np.asarray(value, dtype=float)
        coeffs = np.zeros((order + 1,) + value.shape)
        coeffs[0] = value
        return cls(coeffs)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def value(self) -> np.ndarray:
        return self.coeffs[0]

    def derivative(self, k: int) -> np.ndarray:
        if not 0 <= k <= self.order:
            raise ParameterError(f"derivative {k} outside jet order {self.order}")
        return self.coeffs[k] * math.factorial(k)

    def derivatives(self) -> np.ndarray:
        scale = np.array([math.factorial(k) for k in range(self.order + 1)], dtype=float)
        return self.coeffs * scale.reshape((-1,) + (1,) * (self.coeffs.ndim - 1))

    def differentiate(self) -> "Jet":
        """Jet of f' (one order lower)."""
        if self.order == 0:
            raise ParameterError("cannot differentiate an order-0 jet")
        k = np.arange(1, self.order + 1, dtype=float).reshape((-1,) + (1,) * (self.coeffs.ndim - 1))
        return Jet(self.coeffs[1:] * k)

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        value = np.broadcast_to(np.asarray(other, dtype=float), self.value.shape)
        return Jet.constant(value, self.order)

    @staticmethod
    def _aligned(a: "Jet", b: "Jet"):
        n = min(a.order, b.order) + 1
        return a.coeffs[:n], b.coeffs[:n]

    def __neg__(self) -> "Jet":
        return Jet(-self.coeffs)

    def __add__(self, other) -> "Jet":
        a, b = self._aligned(self, self._coerce(other))
        return Jet(a + b)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        a, b = self._aligned(self, self._coerce(other))
        return Jet(a - b)

    def __rsub__(self, other) -> "Jet":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet(self.coeffs * np.asarray(other, dtype=float))
        a, b = self._aligned(self, other)
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        # Cauchy product
        for k in range(out.shape[0]):
            for j in range(k + 1):
                out[k] += a[j] * b[k - j]
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet(self.coeffs / np.asarray(other, dtype=float))
        a, b = self._aligned(self, other)
        q = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for k in range(q.shape[0]):
            q[k] = (a[k] - sum(q[j] * b[k - j] for j in range(k))) / b[0]
        return Jet(q)

    def __rtruediv__(self, other) -> "Jet":
        return self._coerce(other) / self

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, shape={self.coeffs.shape[1:]})"


@lru_cache(maxsize=None)
def sech2_polynomial(n: int) -> Polynomial:
    """P_n with d^n/du^n sech^2(u) = sech^2(u) * P_n(tanh u).

    P_0 = 1 and P_{n+1} = -2 T P_n + (1 - T^2) P_n', from (sech^2)' = -2 sech^2 tanh
    and tanh' = sech^2.
    """
    if n < 0:
        raise ParameterError("polynomial index must be non-negative")
    if n == 0:
        return Polynomial([1.0])
    prev = sech2_polynomial(n - 1)
    T = Polynomial([0.0, 1.0])
    return -2.0 * T * prev + (1.0 - T ** 2) * prev.deriv()


def sech2_jet(u, scale: float, order: int, clamp: float = 350.0) -> Jet:
    """Jet in x of sech^2(scale * x) at points where scale * x = u."""
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) <= clamp
    S = np.where(inside, 1.0 / np.cosh(np.where(inside, u, 0.0)) ** 2, 0.0)
    T = np.tanh(u)
    rows = [S * sech2_polynomial(n)(T) * scale ** n for n in range(order + 1)]
    return Jet.from_derivatives(rows)
