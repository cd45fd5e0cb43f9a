# src/main.py
import sys

from utils.logger import get_logger
from cli.commands import run

logger = get_logger(__name__)


def main(argv=None) -> int:
    """
    Entry point for the command-line driver. All output that scripts consume
    goes to stdout; logs go to stderr and, if enabled, the rotating log file.
    """
    return run(argv)


if __name__ == "__main__":
    try:
        sys.exit(main(sys.argv[1:]))
    except KeyboardInterrupt:
        logger.info("Interrupted by user.")
        sys.exit(130)
    except Exception as e:
        logger.critical(f"Unhandled error: {e}", exc_info=True)
        sys.exit(1)
