# utils/logger.py
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Dict, Optional

from utils.config import load_config


# Define a custom formatter to add color to log levels in the console
class ColorFormatter(logging.Formatter):
    """A custom log formatter that adds color to log levels."""
    GREY = "\x1b[38;20m"
    GREEN = "\x1b[32;20m"
    YELLOW = "\x1b[33;20m"
    RED = "\x1b[31;20m"
    BOLD_RED = "\x1b[31;1m"
    RESET = "\x1b[0m"

    BASE = "%(asctime)s - %(name)s - [%(levelname)s] - %(message)s"

    FORMATS = {
        logging.DEBUG: GREY + BASE + RESET,
        logging.INFO: GREEN + BASE + RESET,
        logging.WARNING: YELLOW + BASE + RESET,
        logging.ERROR: RED + BASE + RESET,
        logging.CRITICAL: BOLD_RED + BASE + RESET,
    }

    def format(self, record):
        log_fmt = self.FORMATS.get(record.levelno, self.BASE)
        formatter = logging.Formatter(log_fmt, '%Y-%m-%d %H:%M:%S')
        return formatter.format(record)


# A dictionary to cache loggers so we don't reconfigure them.
_loggers: Dict[Optional[str], logging.Logger] = {}


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """
    Configures and returns a standardized logger for any module.
    It sets up a colored console handler on stderr (stdout is reserved for
    witnesses, tables and JSON lines) and, unless disabled, a rotating file
    handler.

    Args:
        name (Optional[str]): The name for the logger, typically ``__name__``
            from the calling module.

    Returns:
        logging.Logger: A configured logger instance.
    """
    if name in _loggers:
        return _loggers[name]

    config = load_config()
    logger = logging.getLogger(name)
    logger.setLevel(config.LOG_LEVEL.upper())
    # Prevent log messages from being duplicated by the root logger
    logger.propagate = False

    if not logger.handlers:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(ColorFormatter())
        logger.addHandler(console_handler)

        if config.LOG_TO_FILE:
            setup_logging_directory(config.LOG_DIR)
            # Up to 5 backup files of 5MB each.
            file_handler = RotatingFileHandler(
                os.path.join(config.LOG_DIR, 'pathpowers.log'),
                maxBytes=5*1024*1024,
                backupCount=5
            )
            file_handler.setFormatter(logging.Formatter(
                '%(asctime)s - %(name)s - [%(levelname)s] - %(message)s',
                '%Y-%m-%d %H:%M:%S'
            ))
            logger.addHandler(file_handler)

    _loggers[name] = logger
    return logger


def set_log_level(level: str) -> None:
    """Retunes every logger handed out so far (used by the CLI verbosity flags)."""
    for logger in _loggers.values():
        logger.setLevel(level.upper())


def setup_logging_directory(path: str = 'logs'):
    """Creates the log directory if it doesn't exist."""
    os.makedirs(path, exist_ok=True)
