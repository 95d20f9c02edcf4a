import pandas as pd

from xbouss.core import Grid1D, ModelParams
from xbouss.corrector import Closure, CorrectedSolution, corrected_eval
from xbouss.output import StudyResult

from .study import StudyRun, study

CONFIG_TEMPLATE = """\
alpha: 1.0
epsilon: 0.1
t: 1.0
grid_n: 4096
grid_half_width: 50.0
tol: 1.0e-10       # quadrature tolerance
closure: literal   # literal or compensated
horizon: 1.0       # t must lie in [0, horizon/sqrt(epsilon)]
"""


@study(name="corrector", label="Corrected family snapshot", config_template=CONFIG_TEMPLATE)
def corrector_study(run: StudyRun) -> StudyResult:
    params = ModelParams.from_alpha(float(run["alpha"]), float(run["epsilon"]))
    sol = CorrectedSolution(
        params,
        quadrature_tol=float(run["tol"]),
        closure=Closure(run["closure"]),
        horizon=float(run["horizon"]),
    )
    t = float(run["t"])
    grid = Grid1D.centered(float(run["grid_half_width"]), int(run["grid_n"]), periodic=True)
    x = grid.points()
    parts = sol.components(t, x)
    zeta, v = corrected_eval(sol, t, x, parts)
    table = pd.DataFrame({
        "x": x,
        "zeta": zeta,
        "v": v,
        **parts,
    })
    summary = {
        "c": params.c,
        "k": params.k,
        "t": t,
        "t_max": sol.t_max,
        "closure": sol.closure.value,
        "max_abs_zeta2": float(table["zeta2"].abs().max()),
        "max_abs_v2": float(table["v2"].abs().max()),
    }
    run.logger.info("t=%g (t_max %.4g): max|zeta2| = %.4e", t, sol.t_max, summary["max_abs_zeta2"])
    return StudyResult("corrector", run.config, {"fields": table}, summary)
