"""Result files: CSV with a `#` metadata header, or a single JSON document.

Nothing time-dependent is written, so an identical configuration always
produces identical bytes.
"""

from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np
import pandas as pd

from . import __version__
from .errors import ParameterError

logger = logging.getLogger("xbouss.output")

FORMATS = ("csv", "json")
FLOAT_FORMAT = "%.17g"


@dataclass
class StudyResult:
    """Tables and summary of one study run. The first table is the primary one."""

    study: str
    config: Dict[str, Any]
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def primary(self) -> str:
        return next(iter(self.tables))

    def metadata(self) -> Dict[str, Any]:
        return {"study": self.study, "version": __version__, "config": jsonable(self.config)}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "metadata": self.metadata(),
            "tables": {name: jsonable(df.to_dict(orient="records")) for name, df in self.tables.items()},
            "summary": jsonable(self.summary),
        }


def jsonable(obj: Any) -> Any:
    """Plain JSON types; NaN and infinities become null."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), indent=2, allow_nan=False) + "\n"


def companion_path(out: Path, table: str, suffix: str) -> Path:
    return out.with_name(f"{out.stem}_{table}{suffix}")


def csv_text(df: pd.DataFrame, meta: Dict[str, Any]) -> str:
    header = "".join(f"# {key}: {json.dumps(jsonable(value), allow_nan=False)}\n" for key, value in meta.items())
    return header + df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def write_result(result: StudyResult, out: Path, fmt: str = "csv") -> List[Path]:
    """Write `result` to `out` (plus companions for csv); returns every path written."""
    if fmt not in FORMATS:
        raise ParameterError(f"format must be one of {FORMATS}, got {fmt!r}")
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []

    if fmt == "json":
        out.write_text(dumps(result.to_dict()))
        written.append(out)
    else:
        meta = result.metadata()
        for i, (name, df) in enumerate(result.tables.items()):
            path = out if i == 0 else companion_path(out, name, out.suffix or ".csv")
            path.write_text(csv_text(df, {**meta, "table": name}))
            written.append(path)
        if result.summary:
            path = companion_path(out, "summary", ".json")
            path.write_text(dumps({"metadata": meta, "summary": result.summary}))
            written.append(path)

    for path in written:
        logger.info("Wrote %s", path)
    return written


def read_csv(path: Path) -> Tuple[Dict[str, Any], pd.DataFrame]:
    """Metadata header and table of a CSV written by `write_result`."""
    meta: Dict[str, Any] = {}
    skip = 0
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition(": ")
            meta[key] = json.loads(value)
            skip += 1
    return meta, pd.read_csv(path, skiprows=skip)
