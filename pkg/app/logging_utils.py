"""app.logging_utils

One logger per verify process. Suite starts, per-check verdicts and aborted
suites go to `verify.log` under the configured log directory (rotated at
2 MB, five backups) and are echoed to stderr. Reports own stdout.
"""

from __future__ import annotations

import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path

LOG_FILE = "verify.log"
FILE_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"
CONSOLE_FORMAT = "%(levelname)s %(message)s"


def build_logger(log_dir: str, name: str = "gauge_verify", level: int = logging.INFO) -> logging.Logger:
    logger = logging.getLogger(name)
    logger.setLevel(level)
    # already configured by an earlier runner in this process
    if logger.handlers:
        return logger

    path = Path(log_dir)
    path.mkdir(parents=True, exist_ok=True)
    to_file = RotatingFileHandler(str(path / LOG_FILE), maxBytes=2_000_000, backupCount=5, encoding="utf-8")
    to_file.setFormatter(logging.Formatter(FILE_FORMAT))
    logger.addHandler(to_file)

    to_stderr = logging.StreamHandler(sys.stderr)
    to_stderr.setFormatter(logging.Formatter(CONSOLE_FORMAT))
    logger.addHandler(to_stderr)
    return logger
