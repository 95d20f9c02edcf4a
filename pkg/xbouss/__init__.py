"""Extended Boussinesq numerical laboratory.

Library modules:
- `core`: parameters, grids, fields, norms and spatial derivatives.
- `refwaves`: closed-form Green-Naghdi, KdV and standard Boussinesq solitary waves.
- `solitary`: shooting solver for the extended Boussinesq traveling-wave ODE.
- `jets`: Taylor-mode arithmetic used for exact derivatives of the solitary background.
- `corrector`: forcing, d'Alembert transport correctors and the corrected family.
- `residuals`: model operators, residues R1/R2 and the epsilon sweep.
- `oplab`: assembly, inversion and probes of the fourth-order operator I.

Support modules: `errors`, `settings`, `logs`, `output` (result files) and
`ledger` (SQLite record of service runs).
"""

__version__ = "0.3.0"
