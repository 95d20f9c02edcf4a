"""SQLite audit trail of studies run through the service."""

import json
import logging
import sqlite3
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

from . import settings

logger = logging.getLogger("ledger")

DB_NAME = "runs.db"


def db_path() -> Path:
    return settings.data_dir() / DB_NAME


def _conn() -> sqlite3.Connection:
    path = db_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    conn = sqlite3.connect(str(path), check_same_thread=False)
    conn.row_factory = sqlite3.Row
    return conn


def init() -> None:
    conn = _conn()
    cur = conn.cursor()
    cur.execute(
        """
        CREATE TABLE IF NOT EXISTS runs (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            ts_ms INTEGER,
            study TEXT,
            config_json TEXT,
            ok INTEGER,
            summary_json TEXT,
            error_text TEXT,
            duration_ms INTEGER
        )
        """
    )
    cur.execute("CREATE INDEX IF NOT EXISTS idx_runs_study ON runs(study, ts_ms)")
    conn.commit()
    conn.close()
    logger.debug("Run ledger ready at %s", db_path())


def log_run(
    study: str,
    *,
    config: Optional[Dict[str, Any]] = None,
    ok: Optional[bool] = None,
    summary: Optional[Dict[str, Any]] = None,
    error_text: Optional[str] = None,
    duration_ms: Optional[int] = None,
) -> int:
    ts = int(time.time() * 1000)
    conn = _conn()
    cur = conn.cursor()
    cur.execute(
        """
        INSERT INTO runs(ts_ms, study, config_json, ok, summary_json, error_text, duration_ms)
        VALUES (?,?,?,?,?,?,?)
        """,
        (
            ts,
            study,
            json.dumps(config) if config is not None else None,
            1 if ok else (0 if ok is not None else None),
            json.dumps(summary) if summary is not None else None,
            error_text,
            duration_ms,
        ),
    )
    run_id = int(cur.lastrowid)
    conn.commit()
    conn.close()
    return run_id


def _row(r: sqlite3.Row) -> Dict[str, Any]:
    return {
        "id": r["id"],
        "ts_ms": r["ts_ms"],
        "study": r["study"],
        "config": json.loads(r["config_json"]) if r["config_json"] else None,
        "ok": None if r["ok"] is None else bool(r["ok"]),
        "summary": json.loads(r["summary_json"]) if r["summary_json"] else None,
        "error_text": r["error_text"],
        "duration_ms": r["duration_ms"],
    }


def list_runs(limit: int = 50) -> List[Dict[str, Any]]:
    """Most recent runs first."""
    conn = _conn()
    cur = conn.cursor()
    cur.execute("SELECT * FROM runs ORDER BY id DESC LIMIT ?", (int(limit),))
    out = [_row(r) for r in cur.fetchall()]
    conn.close()
    return out


def get_run(run_id: int) -> Optional[Dict[str, Any]]:
    conn = _conn()
    cur = conn.cursor()
    cur.execute("SELECT * FROM runs WHERE id=?", (run_id,))
    r = cur.fetchone()
    conn.close()
    return _row(r) if r else None
