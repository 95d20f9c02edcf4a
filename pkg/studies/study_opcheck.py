"""Round trip, symmetry and weighted-norm bounds of the fourth-order operator I."""

import math

import numpy as np
import pandas as pd

from xbouss.core import Grid1D
from xbouss.oplab import (
    REPRESENTATIONS,
    OperatorContext,
    bound_probe,
    min_eigenvalue,
    random_smooth_field,
    round_trip_error,
    symmetry_defect,
)
from xbouss.output import StudyResult
from xbouss.refwaves import sech2

from .study import StudyRun, study

CONFIG_TEMPLATE = """\
eps_list: [0.1, 0.01, 0.001]
s: 1.0
grid_n: 256
grid_half_width: 50.0
zeta_amplitude: 1.0    # elevation zeta = amplitude * sech^2(sqrt(3/4) x)
samples: 100           # random fields per epsilon for round trip and symmetry
bound_samples: 8
seed: 0
tol: 1.0e-12
eigen_max_n: 1024      # dense eigenvalue check only up to this size
"""


@study(name="opcheck", label="Operator probes", config_template=CONFIG_TEMPLATE)
def opcheck_study(run: StudyRun) -> StudyResult:
    eps_list = run["eps_list"]
    eps_list = [float(e) for e in (eps_list if isinstance(eps_list, (list, tuple)) else [eps_list])]
    grid = Grid1D.centered(float(run["grid_half_width"]), int(run["grid_n"]), periodic=True)
    zeta = float(run["zeta_amplitude"]) * sech2(math.sqrt(0.75) * grid.points())
    tol = float(run["tol"])
    samples = int(run["samples"])

    rows = []
    for eps in eps_list:
        for representation in REPRESENTATIONS:
            run.checkpoint()
            ctx = OperatorContext(grid, zeta, eps, representation)
            rng = np.random.default_rng(int(run["seed"]))
            trip = sym = 0.0
            for _ in range(samples):
                w = random_smooth_field(grid, rng)
                u = random_smooth_field(grid, rng)
                trip = max(trip, round_trip_error(ctx, w, tol))
                sym = max(sym, symmetry_defect(ctx, u, w))
            row = {
                "epsilon": eps,
                "representation": representation,
                "h_min": ctx.h_min,
                "max_round_trip": trip,
                "max_symmetry_defect": sym,
                "min_eigenvalue": np.nan,
            }
            if representation == "fd" and grid.n <= int(run["eigen_max_n"]):
                row["min_eigenvalue"] = min_eigenvalue(grid, eps, zeta)
            rows.append(row)
            run.logger.info("eps=%g %s: round trip %.2e, symmetry %.2e", eps, representation, trip, sym)

    bound_rows = []
    for representation in REPRESENTATIONS:
        run.checkpoint()
        for row in bound_probe(eps_list, float(run["s"]), grid, zeta, samples=int(run["bound_samples"]),
                               seed=int(run["seed"]), representation=representation, tol=tol):
            bound_rows.append({"representation": representation, **row})

    probes = pd.DataFrame(rows)
    bounds = pd.DataFrame(bound_rows)
    summary = {
        "s": float(run["s"]),
        "max_round_trip": float(probes["max_round_trip"].max()),
        "max_symmetry_defect": float(probes["max_symmetry_defect"].max()),
        "max_bound_ratio": float(bounds[["w", "sqrt_eps_dw", "eps_d2w"]].to_numpy().max()),
    }
    return StudyResult("opcheck", run.config, {"probes": probes, "bounds": bounds}, summary)
