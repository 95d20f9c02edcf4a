"""Rescaled solitary waves of the extended Boussinesq, GN and KdV/Boussinesq models."""

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline

from xbouss.core import ModelParams
from xbouss.output import StudyResult
from xbouss.refwaves import ReferenceKind, crest_scale, reference_profile, sech2
from xbouss.solitary import solve_profile

from .study import StudyRun, study

CONFIG_TEMPLATE = """\
c: [1.025, 1.01, 1.002]
epsilon: 1.0
tol: 1.0e-10
n: 4097
x_span: 6.0      # rescaled abscissa X runs over [-x_span, x_span]
points: 601
"""

MODELS = (
    ("xB", None),
    ("GN", ReferenceKind.GREEN_NAGHDI),
    ("KdV", ReferenceKind.KDV),
)


def _c_list(raw) -> list:
    values = raw if isinstance(raw, (list, tuple)) else [raw]
    return [float(c) for c in values]


@study(name="compare", label="Solitary wave comparison", config_template=CONFIG_TEMPLATE)
def compare_study(run: StudyRun) -> StudyResult:
    eps = float(run["epsilon"])
    X = np.linspace(-float(run["x_span"]), float(run["x_span"]), int(run["points"]))
    target = sech2(X)
    frames = []
    summary = {"per_c": []}
    for c in _c_list(run["c"]):
        run.checkpoint()
        params = ModelParams(epsilon=eps, celerity=c)
        params.require_wave_speed()
        K = params.gn_wavenumber
        profile = solve_profile(params, tol=float(run["tol"]), n=int(run["n"]))
        numeric = CubicSpline(profile.xi, profile.zeta)
        for model, kind in MODELS:
            if kind is None:
                Z = numeric(X / K) / crest_scale(params, ReferenceKind.GREEN_NAGHDI)
            else:
                Z = reference_profile(kind, params, X / K) / crest_scale(params, kind)
            frames.append(pd.DataFrame({"model": model, "c": c, "X": X, "Z": Z}))
        Z_xb = profile.zeta / crest_scale(params)
        summary["per_c"].append({
            "c": c,
            "amplitude": profile.amplitude,
            "Z0": float(Z_xb[profile.grid.n // 2]),
            "max_distance_to_sech2": float(np.max(np.abs(frames[-3]["Z"].to_numpy() - target))),
        })
        run.logger.info("c=%g: Z(0) = %.6f", c, summary["per_c"][-1]["Z0"])
    return StudyResult("compare", run.config, {"curves": pd.concat(frames, ignore_index=True)}, summary)
