import importlib
import logging
import pkgutil
from typing import Dict

from .study import StudyWrapper, list_studies

logger = logging.getLogger("studies")


def discover_studies() -> Dict[str, StudyWrapper]:
    """Import every `study_*` module so its @study decorators register."""
    package = __name__
    for _, mod_name, _ in pkgutil.iter_modules(__path__):  # type: ignore[name-defined]
        if not mod_name.startswith("study_"):
            continue
        importlib.import_module(f"{package}.{mod_name}")
    studies = list_studies()
    logger.debug("Discovered %d studies: %s", len(studies), sorted(studies))
    return studies
