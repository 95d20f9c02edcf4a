import json
from pathlib import Path

import numpy as np
import pytest

from xbouss.core import Grid1D, ModelParams
from xbouss.solitary import solve_profile

REFERENCE_SPEEDS = (1.025, 1.01, 1.002)


@pytest.fixture(autouse=True)
def isolated_dirs(tmp_path, monkeypatch):
    """Keep ledger and log files out of the working tree."""
    monkeypatch.setenv("XBOUSS_DATA_DIR", str(tmp_path / "data"))
    monkeypatch.setenv("XBOUSS_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.delenv("XBOUSS_WORKERS", raising=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def periodic_grid():
    return Grid1D(-50.0, 50.0, 256, periodic=True)


@pytest.fixture(scope="session")
def profiles():
    """Solitary profiles shared across tests, keyed by (c, mode, options)."""
    cache = {}

    def get(c, gn_mode=False, **kwargs):
        key = (c, gn_mode, tuple(sorted(kwargs.items())))
        if key not in cache:
            cache[key] = solve_profile(ModelParams(epsilon=1.0, celerity=c), gn_mode=gn_mode, **kwargs)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def golden_solitary():
    """Frozen crest amplitude at c = 1.025, eps = 1."""
    return json.loads((Path(__file__).parent / "golden" / "solitary_c1.025.json").read_text())
