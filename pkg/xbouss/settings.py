"""Environment-driven settings.

Values are read at call time so a changed environment (or a test's
monkeypatch) is picked up without reloading the module.
"""

import logging
import os
from pathlib import Path

logger = logging.getLogger("xbouss.settings")

# Use project-relative directories by default
_PROJECT_ROOT = Path(__file__).resolve().parent.parent

WORKERS_ENV = "XBOUSS_WORKERS"
DATA_DIR_ENV = "XBOUSS_DATA_DIR"
LOG_DIR_ENV = "XBOUSS_LOG_DIR"


def worker_count() -> int:
    """Number of threads used for sweep entries (>= 1)."""
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        logger.warning("Ignoring non-integer %s=%r", WORKERS_ENV, raw)
        return 1
    return max(1, n)


def data_dir() -> Path:
    raw = os.environ.get(DATA_DIR_ENV)
    return Path(raw) if raw else _PROJECT_ROOT / "data"


def log_dir() -> Path:
    raw = os.environ.get(LOG_DIR_ENV)
    return Path(raw) if raw else _PROJECT_ROOT / "logs"
