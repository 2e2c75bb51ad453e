# config/settings.py
from pathlib import Path
import logging

# Get a logger for this module
logger = logging.getLogger(__name__)

BASE_DIR = Path(__file__).resolve().parent.parent


def _load_setting_from_file(filename: str, default):
    """
    Loads a single override value from a file within the 'local' directory,
    which is located in the project's root folder. The value is converted to
    the type of the default; a missing file keeps the default.
    """
    local_dir = BASE_DIR / "local"
    file_path = local_dir / filename

    if not file_path.exists():
        logger.debug(f"No local override at '{file_path}', using {default!r}.")
        return default

    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            raw = f.read().strip()
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes", "on")
        return type(default)(raw)
    except Exception as e:
        logger.error(f"Failed to read override from {file_path}, keeping {default!r}", exc_info=e)
        return default


class Settings:
    # Exhaustive enumeration is refused above this many free arcs
    ENUMERATION_LIMIT: int = _load_setting_from_file("enumeration_limit.txt", 30)

    # Trials are sampled and checked in vectorised blocks of this size
    TRIAL_BLOCK_SIZE: int = _load_setting_from_file("trial_block_size.txt", 65536)

    # States per chunk when enumerating 2^m vectors
    ENUMERATION_CHUNK: int = 1 << 16

    FLOAT_DIGITS: int = 10
    DEFAULT_SEED: int = 20240917

    BENCH_WORKERS: int = _load_setting_from_file("bench_workers.txt", 4)

    LOG_LEVEL: str = _load_setting_from_file("log_level.txt", "WARNING")
    LOG_TO_FILE: bool = _load_setting_from_file("log_to_file.txt", False)

    BASE_DIR: Path = BASE_DIR
    DATA_DIR: Path = BASE_DIR / "data"
    NETWORKS_DIR: Path = DATA_DIR / "networks"
    LOGS_DIR: Path = BASE_DIR / "logs"
    COMMANDS_DIR: Path = BASE_DIR / "commands"

settings = Settings()
