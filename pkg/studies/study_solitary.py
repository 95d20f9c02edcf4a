"""Numerical solitary wave of the extended Boussinesq ODE (or its GN variant)."""

import numpy as np
import pandas as pd

from xbouss.core import ModelParams, discrete_norm
from xbouss.output import StudyResult
from xbouss.refwaves import gn_profile
from xbouss.solitary import ode_residual, solve_profile, tail_amplitude

from .study import StudyRun, study

# Points next to the tail switch excluded from the residual check (FD stencil reach)
RESIDUAL_MARGIN = 8

CONFIG_TEMPLATE = """\
c: 1.025
epsilon: 1.0
tol: 1.0e-10
half_width: null    # null picks the width from the decay rate
n: 4097
gn_mode: false
method: RK45        # RK45 or DOP853
cross_check: false  # re-solve with DOP853 at tol/100 and from the tail side
"""


def profile_summary(profile) -> dict:
    residual = ode_residual(profile)[profile.integrated_mask(RESIDUAL_MARGIN)]
    params = profile.params
    summary = {
        "c": params.c,
        "epsilon": params.epsilon,
        "mode": profile.mode.value,
        "amplitude": profile.amplitude,
        "gn_amplitude": params.gn_amplitude,
        "relative_shift": profile.amplitude / params.gn_amplitude - 1.0,
        "decay_rate": profile.kappa,
        "crest_offset": profile.offset,
        "tail_start": profile.tail_start,
        "half_width": profile.grid.x_max,
        "shots": profile.shots,
        "max_ode_residual": float(np.max(np.abs(residual))) if residual.size else 0.0,
        "symmetry_defect": float(np.max(np.abs(profile.zeta - profile.zeta[::-1]))),
    }
    if profile.mode.value == "gn":
        summary["max_gn_error"] = discrete_norm(profile.zeta - gn_profile(params, profile.xi), profile.grid.dx, "inf")
    return summary


@study(name="solitary", label="Solitary wave", config_template=CONFIG_TEMPLATE)
def solitary_study(run: StudyRun) -> StudyResult:
    params = ModelParams(epsilon=float(run["epsilon"]), celerity=float(run["c"]))
    half_width = run["half_width"]
    kwargs = dict(
        half_width=None if half_width is None else float(half_width),
        gn_mode=bool(run["gn_mode"]),
        n=int(run["n"]),
    )
    tol = float(run["tol"])
    profile = solve_profile(params, tol=tol, method=str(run["method"]), **kwargs)
    summary = profile_summary(profile)
    run.logger.info("c=%g: amplitude %.12g (GN %.12g)", params.c, profile.amplitude, params.gn_amplitude)

    if run["cross_check"]:
        run.checkpoint()
        fine_tol = max(tol / 100.0, 1e-12)
        second = solve_profile(params, tol=fine_tol, method="DOP853", **kwargs)
        run.checkpoint()
        from_tail = tail_amplitude(params, tol=fine_tol, gn_mode=kwargs["gn_mode"], method="DOP853")
        summary["cross_check"] = {
            "tol": fine_tol,
            "dop853_amplitude": second.amplitude,
            "tail_side_amplitude": from_tail,
            "amplitude_difference": abs(second.amplitude - profile.amplitude),
            "tail_side_difference": abs(from_tail - profile.amplitude),
            "profile_difference": float(np.max(np.abs(second.zeta - profile.zeta))),
        }

    table = pd.DataFrame({"xi": profile.xi, "zeta": profile.zeta, "v": profile.v})
    return StudyResult("solitary", run.config, {"profile": table}, summary)
