"""Exception hierarchy shared by the library, the CLI and the service.

Every error carries an `exit_code` so the CLI can map failures without a lookup
table: 2 for violated preconditions, 3 for numerical failures.
"""

from __future__ import annotations

from typing import Any, Dict, Optional


class LabError(Exception):
    """Base class for all laboratory failures."""

    exit_code = 3

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.details: Dict[str, Any] = details

    def to_dict(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "message": str(self), **self.details}


class ParameterError(LabError, ValueError):
    """A parameter or input violates an operation's precondition."""

    exit_code = 2


class NonFiniteError(LabError):
    def __init__(self, message: str, index: int):
        super().__init__(f"{message} (index {index})", index=index)
        self.index = index


class DecayError(LabError):
    """Field does not decay at the ends of a non-periodic grid."""

    def __init__(self, boundary_magnitude: float, limit: float):
        super().__init__(
            f"field does not decay at the grid boundary: |f| = {boundary_magnitude:.3e} > {limit:.1e}",
            boundary_magnitude=boundary_magnitude,
            limit=limit,
        )
        self.boundary_magnitude = boundary_magnitude


class DepthError(LabError):
    """Non-vanishing depth condition h = 1 + eps*zeta > 0 violated."""

    def __init__(self, h_min: float, index: Optional[int] = None):
        where = "" if index is None else f" at index {index}"
        super().__init__(f"depth condition violated{where}: min h = {h_min:.6e}", h_min=h_min, index=index)
        self.h_min = h_min


class SingularityError(LabError):
    """zeta' too close to zero for the zeta'''-resolved traveling ODE."""

    def __init__(self, dzeta: float, threshold: float):
        super().__init__(
            f"|zeta'| = {abs(dzeta):.3e} below singularity threshold {threshold:.1e}",
            dzeta=dzeta,
            threshold=threshold,
        )


class NoCrestError(LabError):
    """Crest curvature radicand is negative: no elevation crest at this amplitude."""

    def __init__(self, amplitude: float, radicand: float):
        super().__init__(
            f"no crest at amplitude {amplitude:.12g} (radicand {radicand:.3e})",
            amplitude=amplitude,
            radicand=radicand,
        )


class ShootingError(LabError):
    """Amplitude bracket exhausted without an outcome change."""

    def __init__(self, message: str, bracket: Dict[str, Any]):
        super().__init__(message, bracket=bracket)
        self.bracket = bracket


class QuadratureError(LabError):
    def __init__(self, message: str, achieved: float, requested: float):
        super().__init__(
            f"{message}: achieved error {achieved:.3e}, requested {requested:.1e}",
            achieved=achieved,
            requested=requested,
        )
        self.achieved = achieved


class SolverBreakdownError(LabError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message}: relative residual {residual:.3e}", residual=residual)
        self.residual = residual
