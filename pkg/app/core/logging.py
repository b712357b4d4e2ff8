"""Log setup for the gsa command line and scripts."""

import logging
import sys
from pathlib import Path

from app.config import get_settings

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# Third-party modules that log at INFO on import or per call
QUIET_LOGGERS = ("numexpr", "numexpr.utils", "matplotlib", "asyncio")


def setup_logging(level: str | None = None) -> None:
    """
    Route pipeline logs to stderr and, when ``GSA_LOG_FILE`` is set, to a file.

    Stage progress is logged at INFO, skipped gene sets and permutation-count
    warnings at WARNING. Python ``warnings`` (quadrature accuracy, numpy
    runtime warnings) are captured into the same handlers.

    Args:
        level: Level name overriding ``GSA_LOG_LEVEL`` (the CLI ``--log-level``)
    """
    settings = get_settings()
    level_name = (level or settings.log_level).upper()
    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, level_name, logging.INFO))
    root_logger.handlers.clear()

    # stdout stays reserved for command output
    stderr_handler = logging.StreamHandler(sys.stderr)
    stderr_handler.setFormatter(formatter)
    root_logger.addHandler(stderr_handler)

    if settings.log_file:
        log_path = Path(settings.log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

    logging.captureWarnings(True)
    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)

    logging.getLogger(__name__).debug(f"Logging to stderr at {level_name}, file={settings.log_file}")
