import sys
from datetime import datetime
from pathlib import Path
from typing import Optional

from loguru import logger as _logger

from app.config import PROJECT_ROOT, config


_print_level = "INFO"


def define_log_level(
    print_level: str = "INFO",
    logfile_level: str = "DEBUG",
    name: Optional[str] = None,
    log_dir: Optional[str] = None,
):
    """Adjust the log level to above level"""
    global _print_level
    _print_level = print_level

    _logger.remove()
    _logger.add(sys.stderr, level=print_level)

    if log_dir:
        current_date = datetime.now()
        formatted_date = current_date.strftime("%Y%m%d%H%M%S")
        log_name = (
            f"{name}_{formatted_date}" if name else formatted_date
        )  # name a log with prefix name
        directory = Path(log_dir)
        if not directory.is_absolute():
            directory = PROJECT_ROOT / directory
        _logger.add(directory / f"{log_name}.log", level=logfile_level)
    return _logger


logger = define_log_level(
    print_level=config.runtime.log_level, log_dir=config.runtime.log_dir
)
