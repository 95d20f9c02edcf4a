from __future__ import annotations

import json
import logging
import threading
from typing import Any, Callable, Dict, Optional, Union

import yaml

from xbouss.errors import LabError, ParameterError
from xbouss.output import StudyResult

logger = logging.getLogger("studies")

# Global registry of studies
_study_registry: Dict[str, "StudyWrapper"] = {}


class StudyAborted(LabError):
    """Raised at a checkpoint after the run was cancelled."""


def parse_config(raw: Union[None, str, Dict[str, Any]]) -> Dict[str, Any]:
    """Config overlay from a dict or a YAML/JSON string (YAML is tried first)."""
    if raw is None:
        return {}
    if isinstance(raw, dict):
        return dict(raw)
    txt = raw.strip()
    if not txt:
        return {}
    try:
        parsed = yaml.safe_load(txt)
    except yaml.YAMLError:
        try:
            parsed = json.loads(txt)
        except ValueError as exc:
            raise ParameterError(f"config is neither YAML nor JSON: {exc}") from exc
    if parsed is None:
        return {}
    if not isinstance(parsed, dict):
        raise ParameterError(f"config must be a mapping, got {type(parsed).__name__}")
    return parsed


class StudyRun:
    """Handle passed to a study: effective config, its logger and a cancel flag."""

    def __init__(self, name: str, config: Dict[str, Any], cancel: Optional[threading.Event] = None):
        self.name = name
        self.config = config
        self.logger = logging.getLogger(f"study.{name}")
        self.cancel = cancel or threading.Event()

    def __getitem__(self, key: str) -> Any:
        return self.config[key]

    def checkpoint(self) -> None:
        if self.cancel.is_set():
            raise StudyAborted(f"study '{self.name}' aborted")


class StudyWrapper:
    """Registered study with its YAML defaults."""

    def __init__(self, func: Callable, name: str = None, label: str = None, config_template: str = None):
        self.func = func
        self.name = name or func.__name__.replace("_study", "").replace("study_", "")
        self.label = label or self.name.replace("_", " ").title()
        self.config_template = config_template or ""
        self.logger = logging.getLogger(f"study.{self.name}")

    def defaults(self) -> Dict[str, Any]:
        return parse_config(self.config_template)

    def resolve(self, *overlays: Union[None, str, Dict[str, Any]]) -> Dict[str, Any]:
        """Template defaults overlaid left to right; None values in an overlay are skipped."""
        config = self.defaults()
        for overlay in overlays:
            for key, value in parse_config(overlay).items():
                if key not in config:
                    raise ParameterError(f"unknown option '{key}' for study '{self.name}'; known: {sorted(config)}")
                if value is not None:
                    config[key] = value
        return config

    def run(self, config: Optional[Dict[str, Any]] = None, cancel: Optional[threading.Event] = None) -> StudyResult:
        effective = self.resolve(config)
        self.logger.info("Running with config: %s", effective)
        try:
            result = self.func(StudyRun(self.name, effective, cancel))
        except Exception as e:
            self.logger.error(f"Study failed: {e}")
            raise
        result.config = effective
        return result


def study(name: str = None, label: str = None, config_template: str = None):
    """Decorator to register a function as a study."""
    def decorator(func: Callable):
        study_name = name or func.__name__
        wrapper = StudyWrapper(func, study_name, label, config_template)
        _study_registry[study_name] = wrapper
        return wrapper
    return decorator


def get_study(name: str) -> Optional[StudyWrapper]:
    return _study_registry.get(name)


def list_studies() -> Dict[str, StudyWrapper]:
    return _study_registry.copy()
