import logging
import sys
from pathlib import Path
from typing import Optional

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class ColoredConsoleFormatter(logging.Formatter):
    """Formatter that colors the level name for console output."""

    # ANSI color codes
    COLORS = {
        'DEBUG': '\033[36m',      # Cyan
        'INFO': '\033[32m',       # Green
        'WARNING': '\033[33m',    # Yellow
        'ERROR': '\033[31m',      # Red
        'CRITICAL': '\033[41m',   # Red background
    }
    RESET = '\033[0m'

    def format(self, record: logging.LogRecord) -> str:
        formatted = super().format(record)
        color = self.COLORS.get(record.levelname, '')
        if color:
            formatted = formatted.replace(record.levelname, f"{color}{record.levelname}{self.RESET}", 1)
        return formatted


def setup_logging(level: int = logging.INFO, log_dir: Optional[Path] = None, color: bool = True) -> None:
    """Install console (stderr) and optional file handlers on the root logger.

    Existing root handlers are removed first so repeated calls (CLI invoked
    several times in one process, service restarts) do not duplicate output.
    The file handler, when enabled, always records DEBUG.
    """
    root_logger = logging.getLogger()
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
    root_logger.setLevel(logging.DEBUG if log_dir is not None else level)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    formatter_cls = ColoredConsoleFormatter if color and sys.stderr.isatty() else logging.Formatter
    console_handler.setFormatter(formatter_cls(LOG_FORMAT))
    root_logger.addHandler(console_handler)

    if log_dir is not None:
        log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_dir / "xbouss.log", mode='w')
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root_logger.addHandler(file_handler)
