# main.py
import asyncio
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional, Sequence

from config.settings import settings
from core.app import ReliacutApp
from core.errors import UsageError


def setup_logging(level: str = settings.LOG_LEVEL, log_file: Optional[Path] = None) -> logging.Logger:
    """Sets up logging on stderr and, when asked, to a file. Standard output is kept for results."""
    logger = logging.getLogger()
    logger.setLevel(level)

    formatter = logging.Formatter('%(asctime)s:%(levelname)s:%(name)s: %(message)s')

    # Clear existing handlers so repeated calls don't duplicate lines
    if logger.hasHandlers():
        logger.handlers.clear()

    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setFormatter(formatter)
    logger.addHandler(stream_handler)

    if log_file is None and settings.LOG_TO_FILE:
        settings.LOGS_DIR.mkdir(exist_ok=True)
        timestamp = datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
        log_file = settings.LOGS_DIR / f"{timestamp}.log"

    if log_file is not None:
        file_handler = logging.FileHandler(filename=log_file, encoding='utf-8', mode='w')
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


async def main(argv: Optional[Sequence[str]] = None) -> int:
    app = ReliacutApp(settings=settings)
    await app.setup()

    try:
        args = app.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return e.exit_code

    level = "DEBUG" if args.debug else "INFO" if args.verbose else settings.LOG_LEVEL
    setup_logging(level, args.log_file)
    return await app.dispatch(args)


if __name__ == "__main__":
    try:
        sys.exit(asyncio.run(main()))
    except KeyboardInterrupt:
        print("Interrupted.", file=sys.stderr)
        sys.exit(130)
